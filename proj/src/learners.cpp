#include "osgm/learners.hpp"

#include <cmath>

namespace osgm {
namespace {

// Golden-section minimization on [lo, hi] to absolute tolerance tol.
double golden_section(const std::function<double(double)>& q, double lo,
                      double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = q(x1), f2 = q(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = q(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = q(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

void ogd_step(Stepsize& P, double* beta, const FeedbackEval& fb,
              const LearnerConfig& cfg) {
  P.axpy(-cfg.eta_P, fb.grad_P);
  cfg.setP.project(P);
  if (beta && fb.has_beta) {
    *beta -= cfg.eta_beta * fb.grad_beta;
    *beta = cfg.setB.project(*beta);
  }
}

AdaGradState AdaGradState::init_like(const Stepsize& P) {
  AdaGradState st;
  st.U = Stepsize::zeros_like(P);
  return st;
}

void adagrad_step(Stepsize& P, double* beta, const FeedbackEval& fb,
                  AdaGradState& st, const LearnerConfig& cfg) {
  const Stepsize& g = fb.grad_P;
  if (g.kind != P.kind || g.n != P.n)
    throw InvalidParameter("mismatched stepsize shapes");
  switch (P.kind) {
    case StepKind::Scalar:
      st.U.alpha += g.alpha * g.alpha;
      P.alpha -= cfg.eta_P * g.alpha / std::sqrt(st.U.alpha + st.eps);
      break;
    case StepKind::Diagonal:
      st.U.d += g.d.cwiseProduct(g.d);
      P.d -= cfg.eta_P *
             g.d.cwiseQuotient((st.U.d.array() + st.eps).sqrt().matrix());
      break;
    case StepKind::Full:
      st.U.M += g.M.cwiseProduct(g.M);
      P.M -= cfg.eta_P *
             g.M.cwiseQuotient((st.U.M.array() + st.eps).sqrt().matrix());
      break;
  }
  cfg.setP.project(P);
  if (beta && fb.has_beta) {
    st.v += fb.grad_beta * fb.grad_beta;
    *beta -= cfg.eta_beta * fb.grad_beta / std::sqrt(st.v + st.eps);
    *beta = cfg.setB.project(*beta);
  }
}

double online_prox_point_step(const Objective& obj, const Vec& x, double fx,
                              const Vec& gx, double alpha_k, double eta,
                              const Vec* grad_at_trial) {
  if (!(eta > 0)) throw InvalidParameter("eta must be > 0");
  const double g_sq = gx.squaredNorm();
  if (!(g_sq > kDenominatorGuard))
    throw StationaryPoint("gradient too small for a prox point step");

  if (obj.is_quadratic() && obj.has_hvp()) {
    const double a = gx.dot(obj.hvp(x, gx)) / g_sq;
    if (!std::isfinite(eta)) return 1.0 / a;
    return (eta + alpha_k) / (a * eta + 1.0);
  }
  if (!std::isfinite(eta))
    throw InvalidConfig(
        "infinite eta needs a quadratic objective with a Hessian oracle");

  // h'(alpha_k) from one gradient at the trial point sizes the bracket.
  double hprime;
  if (grad_at_trial) {
    hprime = -grad_at_trial->dot(gx) / g_sq;
  } else {
    Vec xp = x - alpha_k * gx;
    hprime = -obj.gradient(xp).dot(gx) / g_sq;
  }
  const double radius = 10.0 * eta * std::abs(hprime);
  if (radius == 0) return alpha_k;

  auto q = [&](double a) {
    double h = (obj.value(x - a * gx) - fx) / g_sq;
    double da = a - alpha_k;
    return h + da * da / (2.0 * eta);
  };
  return golden_section(q, alpha_k - radius, alpha_k + radius, 1e-10);
}

void online_prox_grad_step(const CompositeObjective& comp, const Vec& x,
                           const Vec& GL, const Stepsize& lin_grad,
                           Stepsize& P, double eta, const CandidateSet& setP) {
  if (!(eta > 0) || !std::isfinite(eta))
    throw InvalidParameter("eta must be positive and finite");
  if (P.kind != StepKind::Diagonal || lin_grad.kind != StepKind::Diagonal)
    throw UnsupportedParametrization(
        "prescient prox-gradient steps need a diagonal parametrization");
  const double S = GL.squaredNorm();
  if (!(S > kDenominatorGuard))
    throw StationaryPoint("gradient mapping too small for a prox step");

  for (int i = 0; i < P.n; ++i) {
    const double c = GL[i];
    const double dgi = lin_grad.d[i];
    if (c == 0.0) {
      P.d[i] -= eta * dgi;
      continue;
    }
    if (!comp.has_w) {
      P.d[i] -= eta * dgi;
      continue;
    }
    // Substituting u = x_i - p c reduces the coordinate subproblem to a
    // scalar prox of w at m + eta c d with weight t/S, t = eta c^2.
    const double t = eta * c * c;
    const double m = x[i] - P.d[i] * c;
    const double u = comp.scalar_prox(m + eta * c * dgi, t / S);
    P.d[i] = (x[i] - u) / c;
  }
  setP.project(P);
}

}  // namespace osgm
