#include "osgm/stepsizes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace osgm {

StepKind step_kind_from_string(const std::string& s) {
  if (s == "scalar") return StepKind::Scalar;
  if (s == "diagonal" || s == "diag") return StepKind::Diagonal;
  if (s == "full") return StepKind::Full;
  throw InvalidParameter("unknown parametrization: " + s);
}

std::string to_string(StepKind k) {
  switch (k) {
    case StepKind::Scalar: return "scalar";
    case StepKind::Diagonal: return "diagonal";
    case StepKind::Full: return "full";
  }
  return "?";
}

Stepsize Stepsize::scalar(double a, int n) {
  if (n <= 0) throw InvalidParameter("dimension must be >= 1");
  Stepsize p;
  p.kind = StepKind::Scalar;
  p.n = n;
  p.alpha = a;
  return p;
}

Stepsize Stepsize::diagonal(Vec d) {
  if (d.size() == 0) throw InvalidParameter("empty diagonal");
  Stepsize p;
  p.kind = StepKind::Diagonal;
  p.n = static_cast<int>(d.size());
  p.d = std::move(d);
  return p;
}

Stepsize Stepsize::full(Mat M) {
  if (M.rows() == 0 || M.rows() != M.cols())
    throw InvalidParameter("full preconditioner must be square");
  Stepsize p;
  p.kind = StepKind::Full;
  p.n = static_cast<int>(M.rows());
  p.M = std::move(M);
  return p;
}

Stepsize Stepsize::scaled_identity(double a, int n, StepKind kind) {
  switch (kind) {
    case StepKind::Scalar: return scalar(a, n);
    case StepKind::Diagonal: return diagonal(Vec::Constant(n, a));
    case StepKind::Full: return full(a * Mat::Identity(n, n));
  }
  throw InvalidParameter("bad kind");
}

Stepsize Stepsize::zeros_like(const Stepsize& p) {
  return scaled_identity(0.0, p.n, p.kind);
}

void Stepsize::apply(const Vec& g, Vec& out) const {
  if (static_cast<int>(g.size()) != n)
    throw InvalidInput("vector length does not match preconditioner dimension");
  switch (kind) {
    case StepKind::Scalar: out = alpha * g; return;
    case StepKind::Diagonal: out = d.cwiseProduct(g); return;
    case StepKind::Full: out = M * g; return;
  }
}

Vec Stepsize::apply(const Vec& g) const {
  Vec out;
  apply(g, out);
  return out;
}

Mat Stepsize::embed() const {
  switch (kind) {
    case StepKind::Scalar: return alpha * Mat::Identity(n, n);
    case StepKind::Diagonal: return Mat(d.asDiagonal());
    case StepKind::Full: return M;
  }
  return Mat();
}

double Stepsize::frob_sq() const {
  switch (kind) {
    case StepKind::Scalar: return n * alpha * alpha;
    case StepKind::Diagonal: return d.squaredNorm();
    case StepKind::Full: return M.squaredNorm();
  }
  return 0;
}

void Stepsize::axpy(double c, const Stepsize& g) {
  if (g.kind != kind || g.n != n)
    throw InvalidParameter("mismatched stepsize shapes");
  switch (kind) {
    case StepKind::Scalar: alpha += c * g.alpha; return;
    case StepKind::Diagonal: d += c * g.d; return;
    case StepKind::Full: M += c * g.M; return;
  }
}

Stepsize Stepsize::minus(const Stepsize& o) const {
  Stepsize r = *this;
  r.axpy(-1.0, o);
  return r;
}

double Stepsize::min_entry() const {
  switch (kind) {
    case StepKind::Scalar: return alpha;
    case StepKind::Diagonal: return d.minCoeff();
    case StepKind::Full: return M.minCoeff();
  }
  return 0;
}

double Stepsize::max_entry() const {
  switch (kind) {
    case StepKind::Scalar: return alpha;
    case StepKind::Diagonal: return d.maxCoeff();
    case StepKind::Full: return M.maxCoeff();
  }
  return 0;
}

double inner(const Stepsize& a, const Stepsize& b) {
  if (a.kind != b.kind || a.n != b.n)
    throw InvalidParameter("mismatched stepsize shapes");
  switch (a.kind) {
    case StepKind::Scalar: return a.n * a.alpha * b.alpha;
    case StepKind::Diagonal: return a.d.dot(b.d);
    case StepKind::Full: return (a.M.array() * b.M.array()).sum();
  }
  return 0;
}

double pair_grad(const Stepsize& grad, const Stepsize& dir) {
  if (grad.kind != dir.kind || grad.n != dir.n)
    throw InvalidParameter("mismatched stepsize shapes");
  switch (grad.kind) {
    case StepKind::Scalar: return grad.alpha * dir.alpha;
    case StepKind::Diagonal: return grad.d.dot(dir.d);
    case StepKind::Full: return (grad.M.array() * dir.M.array()).sum();
  }
  return 0;
}

Stepsize restrict_grad(const Mat& G, StepKind kind) {
  switch (kind) {
    case StepKind::Scalar:
      return Stepsize::scalar(G.trace(), static_cast<int>(G.rows()));
    case StepKind::Diagonal:
      return Stepsize::diagonal(G.diagonal());
    case StepKind::Full:
      return Stepsize::full(G);
  }
  throw InvalidParameter("bad kind");
}

CandidateSet CandidateSet::box(double lo, double hi) {
  if (!(lo <= hi)) throw InvalidParameter("box requires lo <= hi");
  CandidateSet c;
  c.bounded = true;
  c.lo = lo;
  c.hi = hi;
  return c;
}

void CandidateSet::project(Stepsize& p) const {
  if (!bounded) return;
  switch (p.kind) {
    case StepKind::Scalar:
      p.alpha = std::clamp(p.alpha, lo, hi);
      return;
    case StepKind::Diagonal:
      p.d = p.d.cwiseMax(lo).cwiseMin(hi);
      return;
    case StepKind::Full:
      p.M = p.M.cwiseMax(lo).cwiseMin(hi);
      return;
  }
}

bool CandidateSet::contains(const Stepsize& p, double tol) const {
  if (!bounded) return true;
  return p.min_entry() >= lo - tol && p.max_entry() <= hi + tol;
}

double CandidateSet::diameter_frob(int n, StepKind kind) const {
  if (!bounded) return std::numeric_limits<double>::infinity();
  double w = hi - lo;
  switch (kind) {
    case StepKind::Scalar: return w * std::sqrt(static_cast<double>(n));
    case StepKind::Diagonal: return w * std::sqrt(static_cast<double>(n));
    case StepKind::Full: return w * static_cast<double>(n);
  }
  return 0;
}

Interval Interval::box(double lo, double hi) {
  if (!(lo <= hi)) throw InvalidParameter("box requires lo <= hi");
  Interval b;
  b.bounded = true;
  b.lo = lo;
  b.hi = hi;
  return b;
}

double Interval::project(double b) const {
  return bounded ? std::clamp(b, lo, hi) : b;
}

double Interval::diameter() const {
  return bounded ? hi - lo : std::numeric_limits<double>::infinity();
}

double product_norm(const Stepsize& P, double beta, double L) {
  return std::sqrt(P.frob_sq() + beta * beta / (L * L));
}

double product_dual_norm(const Stepsize& P, double beta, double L) {
  return std::sqrt(P.frob_sq() + L * L * beta * beta);
}

}  // namespace osgm
