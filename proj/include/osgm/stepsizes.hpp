#pragma once

#include "osgm/types.hpp"

namespace osgm {

// Preconditioner parametrizations. Scalar stores alpha (embeds as alpha*I),
// Diagonal stores the diagonal, Full stores a dense matrix.
enum class StepKind { Scalar, Diagonal, Full };

StepKind step_kind_from_string(const std::string& s);
std::string to_string(StepKind k);

// A stepsize object is either a candidate preconditioner or a restricted
// feedback gradient, both shaped by the parametrization. For Scalar objects
// used as gradients, alpha stores the trace pairing coefficient, so
// pair_grad(grad, dir) always equals the Frobenius inner product of the
// embedded full-matrix gradient with the embedded direction.
struct Stepsize {
  StepKind kind = StepKind::Scalar;
  int n = 0;
  double alpha = 0;  // Scalar
  Vec d;             // Diagonal
  Mat M;             // Full

  static Stepsize scalar(double a, int n);
  static Stepsize diagonal(Vec d);
  static Stepsize full(Mat M);
  // a * identity in the given parametrization.
  static Stepsize scaled_identity(double a, int n, StepKind kind);
  static Stepsize zeros_like(const Stepsize& p);

  void apply(const Vec& g, Vec& out) const;  // out = P g
  Vec apply(const Vec& g) const;

  Mat embed() const;  // dense n x n matrix

  // Squared Frobenius norm of the embedded matrix (Scalar: n * alpha^2).
  double frob_sq() const;

  void axpy(double c, const Stepsize& g);  // this += c * g
  Stepsize minus(const Stepsize& o) const;

  double min_entry() const;
  double max_entry() const;
};

// Frobenius inner product of two embedded objects of the same kind
// (Scalar: n * a.alpha * b.alpha).
double inner(const Stepsize& a, const Stepsize& b);

// Pairing of a restricted gradient with a direction in the parametrization:
// plain coordinate dot product. Coincides with the embedded Frobenius
// pairing by construction of the restriction.
double pair_grad(const Stepsize& grad, const Stepsize& dir);

// Restriction of a full-matrix gradient G onto a parametrization, preserving
// pairings: Scalar keeps trace(G), Diagonal keeps diag(G), Full keeps G.
Stepsize restrict_grad(const Mat& G, StepKind kind);

// Entrywise box for the preconditioner. Unbounded sets are legal and leave
// projection as the identity.
struct CandidateSet {
  bool bounded = false;
  double lo = 0;
  double hi = 0;

  static CandidateSet unbounded() { return CandidateSet{}; }
  static CandidateSet box(double lo, double hi);

  void project(Stepsize& p) const;
  bool contains(const Stepsize& p, double tol = 0) const;
  // Frobenius diameter of the embedded set; +inf when unbounded.
  double diameter_frob(int n, StepKind kind) const;
};

// Box for the momentum coefficient.
struct Interval {
  bool bounded = false;
  double lo = 0;
  double hi = 0;

  static Interval unbounded() { return Interval{}; }
  static Interval box(double lo, double hi);

  double project(double b) const;
  double diameter() const;
};

// Norms on (P, beta) pairs used by the heavy-ball analysis:
// primal ||(P, beta)|| = sqrt(||P||_F^2 + beta^2 / L^2),
// dual   ||(P, beta)||* = sqrt(||P||_F^2 + L^2 beta^2).
double product_norm(const Stepsize& P, double beta, double L);
double product_dual_norm(const Stepsize& P, double beta, double L);

}  // namespace osgm
