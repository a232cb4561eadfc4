#include "osgm/feedback.hpp"

#include <algorithm>
#include <cmath>

namespace osgm {
namespace {

void check_denominator(double den) {
  if (!(den > kDenominatorGuard))
    throw StationaryPoint("feedback denominator below guard");
}

// Restriction of the rank-1 matrix -(u v') / den onto a parametrization.
Stepsize rank1_restrict(const Vec& u, const Vec& v, double den,
                        StepKind kind) {
  const int n = static_cast<int>(u.size());
  switch (kind) {
    case StepKind::Scalar:
      return Stepsize::scalar(-u.dot(v) / den, n);
    case StepKind::Diagonal:
      return Stepsize::diagonal(Vec(-u.cwiseProduct(v) / den));
    case StepKind::Full:
      return Stepsize::full(Mat(-(u * v.transpose()) / den));
  }
  throw InvalidParameter("bad kind");
}

}  // namespace

HypergradResult hypergrad_feedback(const Objective& obj, const Vec& x,
                                   double fx, const Vec& gx,
                                   const Stepsize& P) {
  const double den = gx.squaredNorm();
  check_denominator(den);
  HypergradResult r;
  r.xplus = x - P.apply(gx);
  r.f_xplus = obj.value(r.xplus);
  r.grad_xplus = obj.gradient(r.xplus);
  r.eval.value = (r.f_xplus - fx) / den;
  r.eval.grad_P = rank1_restrict(r.grad_xplus, gx, den, P.kind);
  r.eval.dual_sq = r.grad_xplus.squaredNorm() / den;
  return r;
}

HypergradResult regularized_feedback(const Objective& obj, const Vec& x,
                                     double fx, const Vec& gx,
                                     const Stepsize& P, double lambda) {
  if (lambda < 0) throw InvalidParameter("lambda must be >= 0");
  HypergradResult r = hypergrad_feedback(obj, x, fx, gx, P);
  if (lambda == 0) return r;
  const double c = 1.0 / obj.L();
  Stepsize shift = P;
  shift.axpy(-1.0, Stepsize::scaled_identity(c, P.n, P.kind));
  // Value gains (lambda/2) ||P - cI||_F^2 in the embedded geometry.
  r.eval.value += 0.5 * lambda * shift.frob_sq();
  // Full-matrix gradient becomes G = -(g+ g') / den + lambda (P - cI);
  // track the exact Frobenius norm via the rank-1 cross term.
  const double den = gx.squaredNorm();
  double cross = 0;  // <g+ g', embed(shift)>_F = g+' embed(shift) g
  switch (P.kind) {
    case StepKind::Scalar:
      cross = shift.alpha * r.grad_xplus.dot(gx);
      break;
    case StepKind::Diagonal:
      cross = r.grad_xplus.dot(shift.d.cwiseProduct(gx));
      break;
    case StepKind::Full:
      cross = r.grad_xplus.dot(shift.M * gx);
      break;
  }
  r.eval.dual_sq += -2.0 * lambda * cross / den +
                    lambda * lambda * shift.frob_sq();
  Stepsize reg_grad = shift;
  if (P.kind == StepKind::Scalar) reg_grad.alpha *= P.n;  // trace pairing
  r.eval.grad_P.axpy(lambda, reg_grad);
  return r;
}

double weak_convexity_bound(const Objective& obj, const Vec& x, const Vec& gx,
                            double diam_D, StepKind kind) {
  const double L = obj.L();
  double lam = L;
  const auto& H = obj.hess_lipschitz();
  const bool finite_D = std::isfinite(diam_D);
  if (H && finite_D) {
    const double gnorm = gx.norm();
    if (kind == StepKind::Scalar && obj.has_hvp() && gnorm > 0) {
      Vec ghat = gx / gnorm;
      double curv = ghat.dot(obj.hvp(x, ghat));
      lam = std::min(lam, std::max(-curv + *H * diam_D * gnorm, 0.0));
    }
    if (obj.mu() && *obj.mu() > 0) {
      lam = std::min(lam, (*H / *obj.mu() + *H * diam_D) * gnorm);
    }
  }
  return std::clamp(lam, 0.0, L);
}

HBParams HBParams::for_smoothness(double L, double omega_mult,
                                  double tau_mult) {
  if (!(L > 0)) throw InvalidParameter("L must be > 0");
  if (!(omega_mult > 0) || !(tau_mult > 0))
    throw InvalidParameter("heavy-ball multipliers must be > 0");
  HBParams p;
  p.omega = omega_mult * L;
  p.tau = tau_mult * L * L;
  // tau >= 2*L*omega keeps the potential reduction valid; tau >= 2L^2 keeps
  // the feedback (L+omega)-smooth in the product norm.
  if (!(p.tau >= 2.0 * L * p.omega))
    throw InvalidParameter("tau must be at least 2*L*omega");
  if (!(p.tau >= 2.0 * L * L))
    throw InvalidParameter("tau must be at least 2*L^2");
  return p;
}

double hb_potential(const Objective& obj, const HBState& z, double omega) {
  double shift = obj.fstar() ? *obj.fstar() : 0.0;
  return obj.value(z.z1) - shift + 0.5 * omega * (z.z1 - z.z2).squaredNorm();
}

HBFeedbackResult hb_feedback(const Objective& obj, const HBState& z,
                             double fz1, const Vec& gz1, const Stepsize& P,
                             double beta, const HBParams& hb,
                             bool need_grad) {
  const Vec dz = z.z1 - z.z2;
  const double dz_sq = dz.squaredNorm();
  const double g_sq = gz1.squaredNorm();
  HBFeedbackResult r;
  r.den = g_sq + 0.5 * hb.tau * dz_sq;
  check_denominator(r.den);

  const double shift = obj.fstar() ? *obj.fstar() : 0.0;
  r.z1plus = z.z1 - P.apply(gz1) + beta * dz;
  r.f_z1plus = obj.value(r.z1plus);
  const Vec step = r.z1plus - z.z1;  // z+ keeps z1 as its trailing point
  r.phi_z = fz1 - shift + 0.5 * hb.omega * dz_sq;
  r.phi_zplus = r.f_z1plus - shift + 0.5 * hb.omega * step.squaredNorm();
  r.eval.value = (r.phi_zplus - r.phi_z) / r.den;
  r.eval.has_beta = true;

  if (need_grad) {
    r.grad_z1plus = obj.gradient(r.z1plus);
    r.r = r.grad_z1plus + hb.omega * step;
    r.eval.grad_P = rank1_restrict(r.r, gz1, r.den, P.kind);
    r.eval.grad_beta = r.r.dot(dz) / r.den;
    const double L = obj.L();
    r.eval.dual_sq = r.r.squaredNorm() * g_sq / (r.den * r.den) +
                     L * L * r.eval.grad_beta * r.eval.grad_beta;
  }
  return r;
}

Vec gradient_map(const CompositeObjective& comp, const Vec& x, double gamma,
                 const Vec& gx) {
  if (!(gamma > 0)) throw InvalidParameter("gamma must be > 0");
  Vec trial = x - gx / gamma;
  Vec u = comp.prox(trial, 1.0 / gamma);
  return gamma * (x - u);
}

Vec gradient_map(const CompositeObjective& comp, const Vec& x, double gamma) {
  return gradient_map(comp, x, gamma, comp.smooth.gradient(x));
}

ProxFeedback prox_feedback(const CompositeObjective& comp, const Vec& x,
                           double phix, const Vec& GL, const Stepsize& P) {
  const double den = GL.squaredNorm();
  check_denominator(den);
  ProxFeedback r;
  r.xplus = x - P.apply(GL);
  r.phi_xplus = comp.phi(r.xplus);
  r.value = (r.phi_xplus - phix) / den;
  return r;
}

ProxLinearized prox_linearized_grad(const CompositeObjective& comp,
                                    const Vec& x, const Vec& GL,
                                    const Stepsize& P) {
  const double den = GL.squaredNorm();
  check_denominator(den);
  ProxLinearized r;
  r.xplus = x - P.apply(GL);
  r.grad_at_xplus = comp.smooth.gradient(r.xplus);
  r.grad = rank1_restrict(r.grad_at_xplus, GL, den, P.kind);
  return r;
}

double gradnorm_feedback(const Objective& obj, const Vec& x, const Vec& gx,
                         double alpha) {
  const double gn = gx.norm();
  check_denominator(gn * gn);
  Vec xp = x - alpha * gx;
  return obj.gradient(xp).norm() / gn;
}

double central_difference(const std::function<double(double)>& phi,
                          double scale) {
  const double h = 1e-6 * std::max(1.0, scale);
  return (phi(h) - phi(-h)) / (2.0 * h);
}

}  // namespace osgm
