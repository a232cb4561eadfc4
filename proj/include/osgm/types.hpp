#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace osgm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error taxonomy. Each maps to one documented error contract.
struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct StationaryPoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedParametrization : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateDirection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  long line;
  ParseError(long line_no, const std::string& msg)
      : std::runtime_error("parse error at line " + std::to_string(line_no) +
                           ": " + msg),
        line(line_no) {}
};

// Feedback denominators below this are treated as stationary and runs stop.
inline constexpr double kDenominatorGuard = 1e-30;

// 17-significant-digit formatting used by every serializer; round-trips
// doubles exactly.
std::string g17(double v);

// Deterministic RNG: explicit Box-Muller over mt19937_64 so that generated
// datasets are bit-stable regardless of the standard library's
// normal_distribution implementation.
class Rng {
 public:
  explicit Rng(unsigned long long seed) : eng_(seed) {}

  double uniform() {  // (0, 1)
    // 53-bit mantissa, never exactly 0.
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Vec normal_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  // Uniform integer in [0, m).
  unsigned long long index(unsigned long long m) { return eng_() % m; }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0;
};

}  // namespace osgm
