#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <optional>

#include <Eigen/Sparse>

#include "osgm/types.hpp"

namespace osgm {

using SpMat = Eigen::SparseMatrix<double>;

// Shared oracle counters. Incremented atomically on every oracle call so
// budget accounting survives any evaluation order.
struct OracleCounts {
  std::atomic<long> value{0};
  std::atomic<long> gradient{0};
  std::atomic<long> hvp{0};
  std::atomic<long> prox{0};
};

// Cheap snapshot of counters for diffs and reporting.
struct OracleStat {
  long value = 0;
  long gradient = 0;
  long hvp = 0;
  long prox = 0;
};

// A smooth objective with known smoothness constant L. Optional extras:
// strong convexity / PL constant mu, optimal value fstar, Hessian Lipschitz
// constant hess_lipschitz, and a Hessian-vector product oracle.
class Objective {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradFn = std::function<void(const Vec&, Vec&)>;
  using HvpFn = std::function<void(const Vec&, const Vec&, Vec&)>;

  Objective() : counts_(std::make_shared<OracleCounts>()) {}

  int dim() const { return dim_; }
  double L() const { return L_; }
  const std::optional<double>& mu() const { return mu_; }
  const std::optional<double>& fstar() const { return fstar_; }
  const std::optional<double>& hess_lipschitz() const {
    return hess_lipschitz_;
  }
  bool is_quadratic() const { return is_quadratic_; }
  bool has_hvp() const { return static_cast<bool>(hvp_); }

  double value(const Vec& x) const {
    counts_->value.fetch_add(1, std::memory_order_relaxed);
    return value_(x);
  }

  void gradient(const Vec& x, Vec& out) const {
    counts_->gradient.fetch_add(1, std::memory_order_relaxed);
    grad_(x, out);
  }

  Vec gradient(const Vec& x) const {
    Vec g(dim_);
    gradient(x, g);
    return g;
  }

  void hvp(const Vec& x, const Vec& v, Vec& out) const {
    if (!hvp_) throw InvalidConfig("objective has no Hessian-vector oracle");
    counts_->hvp.fetch_add(1, std::memory_order_relaxed);
    hvp_(x, v, out);
  }

  Vec hvp(const Vec& x, const Vec& v) const {
    Vec out(dim_);
    hvp(x, v, out);
    return out;
  }

  OracleStat stat() const {
    OracleStat s;
    s.value = counts_->value.load(std::memory_order_relaxed);
    s.gradient = counts_->gradient.load(std::memory_order_relaxed);
    s.hvp = counts_->hvp.load(std::memory_order_relaxed);
    s.prox = counts_->prox.load(std::memory_order_relaxed);
    return s;
  }

  std::shared_ptr<OracleCounts> counts() const { return counts_; }

  // Same oracles, fresh counters. Used when one run must be metered
  // independently of another over the same problem.
  Objective with_fresh_counters() const {
    Objective o(*this);
    o.counts_ = std::make_shared<OracleCounts>();
    return o;
  }

  // Builder used by the factories below.
  struct Init {
    int dim = 0;
    ValueFn value;
    GradFn gradient;
    HvpFn hvp;  // optional
    double L = 0;
    std::optional<double> mu;
    std::optional<double> fstar;
    std::optional<double> hess_lipschitz;
    bool is_quadratic = false;
  };
  explicit Objective(Init init)
      : dim_(init.dim),
        value_(std::move(init.value)),
        grad_(std::move(init.gradient)),
        hvp_(std::move(init.hvp)),
        L_(init.L),
        mu_(init.mu),
        fstar_(init.fstar),
        hess_lipschitz_(init.hess_lipschitz),
        is_quadratic_(init.is_quadratic),
        counts_(std::make_shared<OracleCounts>()) {
    if (dim_ <= 0) throw InvalidParameter("objective dimension must be >= 1");
    if (!(L_ > 0)) throw InvalidParameter("smoothness constant must be > 0");
  }

 private:
  int dim_ = 0;
  ValueFn value_;
  GradFn grad_;
  HvpFn hvp_;
  double L_ = 0;
  std::optional<double> mu_;
  std::optional<double> fstar_;
  std::optional<double> hess_lipschitz_;
  bool is_quadratic_ = false;
  std::shared_ptr<OracleCounts> counts_;
};

// Composite objective phi = f + w with f smooth and w proximable.
// prox(x, t) = argmin_u w(u) + ||u - x||^2 / (2t). When w == 0 the prox is
// the identity and the gradient mapping reduces to the plain gradient.
struct CompositeObjective {
  Objective smooth;
  bool has_w = false;
  std::function<double(const Vec&)> w_value;            // 0 when !has_w
  std::function<double(double, double)> scalar_prox;    // separable w only
  std::optional<double> phistar;

  double phi(const Vec& x) const {
    double v = smooth.value(x);
    return has_w ? v + w_value(x) : v;
  }

  Vec prox(const Vec& x, double t) const {
    smooth.counts()->prox.fetch_add(1, std::memory_order_relaxed);
    if (!has_w) return x;
    Vec u(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) u[i] = scalar_prox(x[i], t);
    return u;
  }

  CompositeObjective with_fresh_counters() const {
    CompositeObjective c(*this);
    c.smooth = smooth.with_fresh_counters();
    return c;
  }
};

// Quadratic f(x) = (1/2) (x-b)' Q diag(eigs) Q' (x-b). Q empty => identity,
// b empty => origin.
struct QuadraticProblem {
  Vec eigs;
  Mat Q;
  Vec b;

  Mat matrix() const;
  Objective to_objective() const;
};

// f(x) = x1^2/2 + kappa*x2^2/2. Requires kappa >= 2.
QuadraticProblem make_quadratic_2d(double kappa);

// Random quadratic: n geometrically spaced eigenvalues in [1, kappa],
// Haar-random orthogonal basis, minimizer b (zero when center_at_origin).
QuadraticProblem make_quadratic(int n, double kappa, unsigned long long seed,
                                bool center_at_origin = true);

// Logistic loss (1/m) sum log(1 + exp(-y_i a_i'x)) + (reg/2)||x||^2.
// Labels must be +-1.
Objective make_logistic(const SpMat& A, const Vec& y, double reg);

// Squared hinge SVM (1/m) sum max(0, 1 - y_i a_i'x)^2 + (reg/2)||x||^2.
// Smooth but not twice differentiable, so no Hessian Lipschitz constant.
Objective make_smooth_svm(const SpMat& A, const Vec& y, double reg);

// Pairwise (extended) Rosenbrock, n even:
//   sum over pairs (x_{2j}, x_{2j+1}) of 100 (x_{2j+1} - x_{2j}^2)^2
//   + (1 - x_{2j})^2.
// Minimum 0 at the all-ones vector. L and the Hessian Lipschitz constant
// are box-local bounds valid for max|x_i| <= 3, which covers unit-sphere
// starts under monotone runs.
Objective make_rosenbrock(int n);

// Lasso phi(x) = (1/2)||Ax - y||^2 + l1_weight * ||x||_1.
CompositeObjective make_lasso(const Mat& A, const Vec& y, double l1_weight);

// Largest eigenvalue of A'A by power iteration (relative tolerance 1e-10).
double spectral_norm_sq(const SpMat& A);

}  // namespace osgm
