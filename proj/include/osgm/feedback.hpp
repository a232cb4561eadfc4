#pragma once

#include "osgm/problems.hpp"
#include "osgm/stepsizes.hpp"

namespace osgm {

// Value and restricted gradient of an online feedback function at one
// (P, beta) query. dual_sq is the squared dual norm of the gradient of the
// unrestricted (full-matrix) feedback at the embedded query, computed from
// the rank-1 structure without forming n x n intermediates.
struct FeedbackEval {
  double value = 0;
  Stepsize grad_P;
  double grad_beta = 0;
  bool has_beta = false;
  double dual_sq = 0;
};

// Single-point feedback
//   h_x(P) = (f(x - P grad f(x)) - f(x)) / ||grad f(x)||^2,
// evaluated with the caller's cached f(x) and grad f(x). Costs one value and
// one gradient oracle (at the trial point), both returned for reuse.
struct HypergradResult {
  FeedbackEval eval;
  Vec xplus;
  double f_xplus = 0;
  Vec grad_xplus;
};

HypergradResult hypergrad_feedback(const Objective& obj, const Vec& x,
                                   double fx, const Vec& gx,
                                   const Stepsize& P);

// h_x(P) + (lambda/2) ||P - (1/L) I||_F^2 in the embedded Frobenius
// geometry; the gradient gains lambda (P - (1/L) I) restricted.
HypergradResult regularized_feedback(const Objective& obj, const Vec& x,
                                     double fx, const Vec& gx,
                                     const Stepsize& P, double lambda);

// Estimate of the weak convexity modulus of h_x over a candidate set of
// Frobenius diameter diam_D, clamped to [0, L]. Uses the cheapest available
// bound: L always works; a curvature probe (one Hessian-vector product)
// sharpens it for the scalar parametrization; a PL-based bound applies when
// mu > 0. Requires a Hessian Lipschitz constant for the sharper bounds.
double weak_convexity_bound(const Objective& obj, const Vec& x, const Vec& gx,
                            double diam_D, StepKind kind);

// Heavy-ball machinery. State z = (z1, z2) with z2 the previous iterate.
struct HBState {
  Vec z1;
  Vec z2;
};

struct HBParams {
  double omega = 0;  // potential weight
  double tau = 0;    // denominator weight; tau >= 2 L^2 gives joint convexity
  static HBParams for_smoothness(double L, double omega_mult = 3.0,
                                 double tau_mult = 16.0);
};

// phi_omega(z) = f(z1) - fstar + (omega/2) ||z1 - z2||^2. When fstar is
// unknown the potential is reported shifted by it (differences are exact).
double hb_potential(const Objective& obj, const HBState& z, double omega);

// Heavy-ball feedback at (P, beta):
//   z+ = (z1 - P grad f(z1) + beta (z1 - z2), z1),
//   h_z(P, beta) = (phi(z+) - phi(z)) / (||grad f(z1)||^2
//                  + (tau/2) ||z1 - z2||^2).
// With r = grad f(z1+) + omega (z1+ - z1):
//   grad_P h = -r grad f(z1)' / den,  grad_beta h = <r, z1 - z2> / den.
// Costs one value oracle and (when need_grad) one gradient oracle at z1+.
struct HBFeedbackResult {
  FeedbackEval eval;
  Vec z1plus;
  double f_z1plus = 0;
  Vec grad_z1plus;  // empty when !need_grad
  Vec r;            // empty when !need_grad
  double den = 0;
  double phi_z = 0;
  double phi_zplus = 0;
};

HBFeedbackResult hb_feedback(const Objective& obj, const HBState& z,
                             double fz1, const Vec& gz1, const Stepsize& P,
                             double beta, const HBParams& hb,
                             bool need_grad = true);

// Composite machinery. gamma-gradient mapping
//   G_gamma(x) = gamma (x - prox_{w/gamma}(x - grad f(x)/gamma)).
Vec gradient_map(const CompositeObjective& comp, const Vec& x, double gamma,
                 const Vec& gx);
Vec gradient_map(const CompositeObjective& comp, const Vec& x, double gamma);

// Prox feedback h_x(P) = (phi(x - P G_L(x)) - phi(x)) / ||G_L(x)||^2.
struct ProxFeedback {
  double value = 0;
  Vec xplus;
  double phi_xplus = 0;
};
ProxFeedback prox_feedback(const CompositeObjective& comp, const Vec& x,
                           double phix, const Vec& GL, const Stepsize& P);

// Gradient of the smooth part of the partially linearized prox feedback:
// the full-matrix form is -grad f(x - P G_L) G_L' / ||G_L||^2, restricted to
// the parametrization. The fresh gradient is returned for reuse.
struct ProxLinearized {
  Stepsize grad;
  Vec xplus;
  Vec grad_at_xplus;
};
ProxLinearized prox_linearized_grad(const CompositeObjective& comp,
                                    const Vec& x, const Vec& GL,
                                    const Stepsize& P);

// Gradient-norm ratio feedback g_x(alpha) = ||grad f(x - alpha grad f(x))||
// / ||grad f(x)||.
double gradnorm_feedback(const Objective& obj, const Vec& x, const Vec& gx,
                         double alpha);

// Central difference (phi(h) - phi(-h)) / (2h) with h = 1e-6 max(1, scale).
double central_difference(const std::function<double(double)>& phi,
                          double scale);

}  // namespace osgm
