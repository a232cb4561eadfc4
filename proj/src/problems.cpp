#include "osgm/problems.hpp"

#include <cmath>

namespace osgm {
namespace {

// Overflow-safe log(1 + exp(s)).
double softplus(double s) {
  double m = s > 0 ? s : 0;
  return m + std::log1p(std::exp(-std::abs(s)));
}

double sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  double e = std::exp(s);
  return e / (1.0 + e);
}

void check_dataset(const SpMat& A, const Vec& y) {
  if (A.rows() == 0 || A.cols() == 0)
    throw InvalidInput("dataset must have at least one row and one column");
  if (y.size() != A.rows())
    throw InvalidInput("label count does not match row count");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 1.0 && y[i] != -1.0)
      throw InvalidInput("labels must be +1 or -1");
}

}  // namespace

double spectral_norm_sq(const SpMat& A) {
  Rng rng(12345);
  Vec v = rng.normal_vec(static_cast<int>(A.cols()));
  v.normalize();
  double lam = 0;
  for (int it = 0; it < 10000; ++it) {
    Vec w = A.transpose() * (A * v);
    double nw = w.norm();
    if (nw == 0) return 0;
    double lam_new = v.dot(w);
    w /= nw;
    bool done = std::abs(lam_new - lam) <= 1e-10 * std::max(1.0, lam_new);
    lam = lam_new;
    v = w;
    if (done && it > 3) break;
  }
  return lam;
}

Mat QuadraticProblem::matrix() const {
  Mat D = eigs.asDiagonal();
  if (Q.size() == 0) return D;
  return Q * D * Q.transpose();
}

Objective QuadraticProblem::to_objective() const {
  if (eigs.size() == 0) throw InvalidParameter("quadratic needs eigenvalues");
  if (eigs.minCoeff() <= 0)
    throw InvalidParameter("quadratic eigenvalues must be positive");
  const Vec eg = eigs;
  const Mat Qm = Q;
  const Vec bm = b;
  const int n = static_cast<int>(eigs.size());
  const bool rotated = Qm.size() != 0;
  const bool shifted = bm.size() != 0;

  auto apply_A = [eg, Qm, rotated](const Vec& v) -> Vec {
    if (!rotated) return eg.cwiseProduct(v);
    Vec t = Qm.transpose() * v;
    t = eg.cwiseProduct(t);
    return Qm * t;
  };

  Objective::Init init;
  init.dim = n;
  init.value = [apply_A, bm, shifted](const Vec& x) {
    Vec d = shifted ? Vec(x - bm) : x;
    return 0.5 * d.dot(apply_A(d));
  };
  init.gradient = [apply_A, bm, shifted](const Vec& x, Vec& out) {
    Vec d = shifted ? Vec(x - bm) : x;
    out = apply_A(d);
  };
  init.hvp = [apply_A](const Vec&, const Vec& v, Vec& out) {
    out = apply_A(v);
  };
  init.L = eigs.maxCoeff();
  init.mu = eigs.minCoeff();
  init.fstar = 0.0;
  init.hess_lipschitz = 0.0;
  init.is_quadratic = true;
  return Objective(std::move(init));
}

QuadraticProblem make_quadratic_2d(double kappa) {
  if (!(kappa >= 2)) throw InvalidParameter("kappa must be >= 2");
  QuadraticProblem q;
  q.eigs = Vec(2);
  q.eigs << 1.0, kappa;
  return q;
}

QuadraticProblem make_quadratic(int n, double kappa, unsigned long long seed,
                                bool center_at_origin) {
  if (n < 2) throw InvalidParameter("dimension must be >= 2");
  if (!(kappa >= 1)) throw InvalidParameter("kappa must be >= 1");
  QuadraticProblem q;
  q.eigs = Vec(n);
  for (int i = 0; i < n; ++i)
    q.eigs[i] = std::pow(kappa, static_cast<double>(i) / (n - 1));
  Rng rng(seed);
  Mat G(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) G(i, j) = rng.normal();
  Eigen::HouseholderQR<Mat> qr(G);
  Mat Qm = qr.householderQ();
  Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix signs so the factor is Haar-distributed.
  for (int j = 0; j < n; ++j)
    if (R(j, j) < 0) Qm.col(j) *= -1.0;
  q.Q = Qm;
  if (!center_at_origin) q.b = rng.normal_vec(n);
  return q;
}

Objective make_logistic(const SpMat& A, const Vec& y, double reg) {
  check_dataset(A, y);
  if (reg < 0) throw InvalidParameter("regularization must be >= 0");
  const double m = static_cast<double>(A.rows());
  const SpMat As = A;
  const Vec ys = y;

  Vec row_norm_sq = Vec::Zero(A.rows());
  for (int k = 0; k < As.outerSize(); ++k)
    for (SpMat::InnerIterator it(As, k); it; ++it)
      row_norm_sq[it.row()] += it.value() * it.value();
  double row_norm_cubes = 0;
  for (Eigen::Index i = 0; i < row_norm_sq.size(); ++i)
    row_norm_cubes += std::pow(std::sqrt(row_norm_sq[i]), 3);

  Objective::Init init;
  init.dim = static_cast<int>(A.cols());
  init.value = [As, ys, m, reg](const Vec& x) {
    Vec t = As * x;
    double s = 0;
    for (Eigen::Index i = 0; i < t.size(); ++i) s += softplus(-ys[i] * t[i]);
    return s / m + 0.5 * reg * x.squaredNorm();
  };
  init.gradient = [As, ys, m, reg](const Vec& x, Vec& out) {
    Vec t = As * x;
    Vec w(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i)
      w[i] = -ys[i] * sigmoid(-ys[i] * t[i]) / m;
    out = As.transpose() * w;
    out += reg * x;
  };
  init.hvp = [As, ys, m, reg](const Vec& x, const Vec& v, Vec& out) {
    Vec t = As * x;
    Vec tv = As * v;
    Vec w(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      double s = sigmoid(-ys[i] * t[i]);
      w[i] = s * (1.0 - s) * tv[i] / m;
    }
    out = As.transpose() * w;
    out += reg * v;
  };
  init.L = spectral_norm_sq(A) / (4.0 * m) + reg;
  if (reg > 0) init.mu = reg;
  init.hess_lipschitz = row_norm_cubes / (6.0 * std::sqrt(3.0) * m);
  return Objective(std::move(init));
}

Objective make_smooth_svm(const SpMat& A, const Vec& y, double reg) {
  check_dataset(A, y);
  if (reg < 0) throw InvalidParameter("regularization must be >= 0");
  const double m = static_cast<double>(A.rows());
  const SpMat As = A;
  const Vec ys = y;

  Objective::Init init;
  init.dim = static_cast<int>(A.cols());
  init.value = [As, ys, m, reg](const Vec& x) {
    Vec t = As * x;
    double s = 0;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      double h = std::max(0.0, 1.0 - ys[i] * t[i]);
      s += h * h;
    }
    return s / m + 0.5 * reg * x.squaredNorm();
  };
  init.gradient = [As, ys, m, reg](const Vec& x, Vec& out) {
    Vec t = As * x;
    Vec w(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      double h = std::max(0.0, 1.0 - ys[i] * t[i]);
      w[i] = -2.0 * ys[i] * h / m;
    }
    out = As.transpose() * w;
    out += reg * x;
  };
  init.L = 2.0 * spectral_norm_sq(A) / m + reg;
  if (reg > 0) init.mu = reg;
  // Squared hinge is C^1 but not C^2: no Hessian Lipschitz constant.
  return Objective(std::move(init));
}

Objective make_rosenbrock(int n) {
  if (n < 2 || n % 2 != 0)
    throw InvalidParameter("dimension must be even and >= 2");

  Objective::Init init;
  init.dim = n;
  init.value = [n](const Vec& x) {
    double s = 0;
    for (int j = 0; j < n; j += 2) {
      double a = x[j], b = x[j + 1];
      double q = b - a * a;
      double p = 1.0 - a;
      s += 100.0 * q * q + p * p;
    }
    return s;
  };
  init.gradient = [n](const Vec& x, Vec& out) {
    out.resize(n);
    for (int j = 0; j < n; j += 2) {
      double a = x[j], b = x[j + 1];
      double q = b - a * a;
      out[j] = -400.0 * a * q - 2.0 * (1.0 - a);
      out[j + 1] = 200.0 * q;
    }
  };
  init.hvp = [n](const Vec& x, const Vec& v, Vec& out) {
    out.resize(n);
    for (int j = 0; j < n; j += 2) {
      double a = x[j], b = x[j + 1];
      double haa = -400.0 * b + 1200.0 * a * a + 2.0;
      double hab = -400.0 * a;
      out[j] = haa * v[j] + hab * v[j + 1];
      out[j + 1] = hab * v[j] + 200.0 * v[j + 1];
    }
  };
  // Box-local bounds for max|x_i| <= 3 (Gershgorin on the pair blocks).
  init.L = 13202.0;
  init.hess_lipschitz = 7600.0;
  init.fstar = 0.0;
  return Objective(std::move(init));
}

CompositeObjective make_lasso(const Mat& A, const Vec& y, double l1_weight) {
  if (A.rows() == 0 || A.cols() == 0)
    throw InvalidInput("design matrix must be nonempty");
  if (y.size() != A.rows())
    throw InvalidInput("label count does not match row count");
  if (l1_weight < 0) throw InvalidParameter("l1 weight must be >= 0");

  const Mat As = A;
  const Vec ys = y;
  Mat gram = A.transpose() * A;
  Eigen::SelfAdjointEigenSolver<Mat> es(gram);
  double lmax = es.eigenvalues().maxCoeff();
  double lmin = es.eigenvalues().minCoeff();

  Objective::Init init;
  init.dim = static_cast<int>(A.cols());
  init.value = [As, ys](const Vec& x) { return 0.5 * (As * x - ys).squaredNorm(); };
  init.gradient = [As, ys](const Vec& x, Vec& out) {
    out = As.transpose() * (As * x - ys);
  };
  init.hvp = [gram](const Vec&, const Vec& v, Vec& out) { out = gram * v; };
  init.L = lmax;
  if (lmin > 1e-12 * lmax) init.mu = lmin;
  init.hess_lipschitz = 0.0;
  init.is_quadratic = true;

  CompositeObjective comp;
  comp.smooth = Objective(std::move(init));
  comp.has_w = l1_weight > 0;
  const double lam = l1_weight;
  comp.w_value = [lam](const Vec& x) { return lam * x.lpNorm<1>(); };
  comp.scalar_prox = [lam](double v, double t) {
    double thr = lam * t;
    if (v > thr) return v - thr;
    if (v < -thr) return v + thr;
    return 0.0;
  };
  return comp;
}

}  // namespace osgm
