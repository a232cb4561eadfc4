#pragma once

#include "osgm/feedback.hpp"

namespace osgm {

struct LearnerConfig {
  double eta_P = 0;
  double eta_beta = 0;
  CandidateSet setP;  // unbounded by default
  Interval setB;
};

// Projected online gradient descent on (P, beta). beta may be null when the
// feedback carries no momentum coordinate.
void ogd_step(Stepsize& P, double* beta, const FeedbackEval& fb,
              const LearnerConfig& cfg);

// Entrywise AdaGrad accumulators, same shape as P.
struct AdaGradState {
  Stepsize U;
  double v = 0;
  double eps = 1e-12;
  static AdaGradState init_like(const Stepsize& P);
};

// P' = proj(P - eta_P (U + eps)^{-1/2} o grad), U accumulating squared
// gradient entries; beta analogous with scalar accumulator v.
void adagrad_step(Stepsize& P, double* beta, const FeedbackEval& fb,
                  AdaGradState& st, const LearnerConfig& cfg);

// One online proximal point step on the scalar feedback h_x:
//   alpha' = argmin_a h_x(a) + (a - alpha_k)^2 / (2 eta).
// Quadratic objectives with a Hessian oracle use the closed form
//   alpha' = (eta + alpha_k) / (a eta + 1),  a = <g, Hg> / ||g||^2,
// where eta = +inf degenerates to the curvature-ratio step 1/a. Other
// objectives bracket [alpha_k +- 10 eta |h'(alpha_k)|] and run golden
// section to absolute tolerance 1e-10 (finite eta only).
// grad_at_trial, when given, must be grad f(x - alpha_k gx) and saves the
// bracketing gradient oracle on the non-quadratic path.
double online_prox_point_step(const Objective& obj, const Vec& x, double fx,
                              const Vec& gx, double alpha_k, double eta,
                              const Vec* grad_at_trial = nullptr);

// One prescient prox-gradient step on the partially linearized prox
// feedback for a separable composite: the smooth part is linearized at P_k
// (lin_grad, from prox_linearized_grad), the nonsmooth part is kept exact,
// and the subproblem splits coordinatewise with a scalar-prox closed form.
// Diagonal parametrization only.
void online_prox_grad_step(const CompositeObjective& comp, const Vec& x,
                           const Vec& GL, const Stepsize& lin_grad,
                           Stepsize& P, double eta, const CandidateSet& setP);

}  // namespace osgm
