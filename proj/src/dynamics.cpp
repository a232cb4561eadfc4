#include "osgm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include <Eigen/Eigenvalues>

#include "osgm/problems.hpp"

namespace osgm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMinEigGap = 1e-8;
constexpr double kDirectionGuard = 1e-300;

void validate_lambda(const Vec& lambda) {
  if (lambda.size() < 1) throw InvalidParameter("spectrum must be nonempty");
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (!(lambda[i] > 0))
      throw InvalidParameter("spectrum entries must be positive");
  if (lambda.size() < 2) return;
  std::vector<double> sorted(lambda.data(), lambda.data() + lambda.size());
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i + 1 < sorted.size(); ++i)
    if (sorted[i + 1] - sorted[i] < kMinEigGap)
      throw InvalidParameter("spectrum entries closer than 1e-8");
}

DynState step_common(const DynState& s, const Vec& lambda, double eta,
                     bool scale_by_alpha_plus) {
  validate_lambda(lambda);
  if (s.zhat.size() != lambda.size())
    throw InvalidInput("direction and spectrum dimensions differ");
  const double zn = s.zhat.norm();
  if (!(zn > 0)) throw InvalidInput("direction must be nonzero");
  Vec z = s.zhat / zn;
  const double ap = alpha_plus(s, lambda, eta);
  const double mult = scale_by_alpha_plus ? ap : s.alpha;
  Vec w = (1.0 - mult * lambda.array()) * z.array();
  const double wn = w.norm();
  if (wn < kDirectionGuard)
    throw DegenerateDirection("direction annihilated by (I - alpha*Lambda)");
  DynState out;
  out.alpha = ap;
  out.zhat = w / wn;
  return out;
}

}  // namespace

double alpha_plus(const DynState& s, const Vec& lambda, double eta) {
  if (s.zhat.size() != lambda.size())
    throw InvalidInput("direction and spectrum dimensions differ");
  double q2 = 0, q3 = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double zz = s.zhat[i] * s.zhat[i];
    q2 += lambda[i] * lambda[i] * zz;
    q3 += lambda[i] * lambda[i] * lambda[i] * zz;
  }
  if (!(q2 > 0)) throw InvalidInput("direction must be nonzero");
  return s.alpha + eta - s.alpha * eta * (q3 / q2);
}

DynState step_hdm(const DynState& s, const Vec& lambda, double eta) {
  return step_common(s, lambda, eta, true);
}

DynState step_osgm(const DynState& s, const Vec& lambda, double eta) {
  return step_common(s, lambda, eta, false);
}

Vec dynamics_spectrum(double L, double mu, int n) {
  if (!(L > mu && mu > 0)) throw InvalidParameter("need L > mu > 0");
  if (n < 2) throw InvalidParameter("spectrum needs n >= 2");
  Vec lam(n);
  for (int i = 0; i < n; ++i)
    lam[i] = L + (mu - L) * static_cast<double>(i) / (n - 1);
  validate_lambda(lam);
  return lam;
}

std::pair<DynState, DynState> two_point_orbit(double L, double mu, int n,
                                              int delta_sign) {
  if (!(L > mu && mu > 0)) throw InvalidParameter("need L > mu > 0");
  if (n < 2) throw InvalidParameter("orbit needs n >= 2");
  if (delta_sign != 1 && delta_sign != -1)
    throw InvalidParameter("delta_sign must be +1 or -1");
  const double r = std::hypot(L, mu);
  const double gamma = mu / r;
  const double delta = delta_sign * L / r;
  DynState s1, s2;
  s1.alpha = s2.alpha = 2.0 / (L + mu);
  s1.zhat = Vec::Zero(n);
  s1.zhat[0] = gamma;
  s1.zhat[n - 1] = delta;
  s2.zhat = Vec::Zero(n);
  s2.zhat[0] = -gamma;
  s2.zhat[n - 1] = delta;
  return {s1, s2};
}

Mat numeric_jacobian(const DynMap& map, const DynState& s, const Vec& lambda,
                     double eta) {
  const Eigen::Index n = lambda.size();
  const double h = 1e-7;
  auto eval = [&](const Vec& u) {
    DynState in;
    in.alpha = u[0];
    in.zhat = u.tail(n);
    DynState out = map(in, lambda, eta);
    Vec v(n + 1);
    v[0] = out.alpha;
    v.tail(n) = out.zhat;
    return v;
  };
  Vec u0(n + 1);
  u0[0] = s.alpha;
  u0.tail(n) = s.zhat;
  Mat J(n + 1, n + 1);
  for (Eigen::Index j = 0; j <= n; ++j) {
    Vec up = u0, um = u0;
    up[j] += h;
    um[j] -= h;
    J.col(j) = (eval(up) - eval(um)) / (2 * h);
  }
  return J;
}

Vec orbit_product_spectrum(const std::string& map_kind, double L, double mu,
                           int n) {
  DynMap map;
  if (map_kind == "hdm")
    map = step_hdm;
  else if (map_kind == "osgm")
    map = step_osgm;
  else
    throw InvalidParameter("map kind must be \"hdm\" or \"osgm\"");
  const Vec lam = dynamics_spectrum(L, mu, n);
  const double eta = 1.0 / L;
  auto [s1, s2] = two_point_orbit(L, mu, n);
  Mat J1 = numeric_jacobian(map, s1, lam, eta);
  Mat J2 = numeric_jacobian(map, s2, lam, eta);
  Eigen::EigenSolver<Mat> es(J2 * J1, false);
  Vec moduli = es.eigenvalues().cwiseAbs();
  std::sort(moduli.data(), moduli.data() + moduli.size(),
            std::greater<double>());
  return moduli;
}

double orbit_spectral_radius(const std::string& map_kind, double L, double mu,
                             int n) {
  return orbit_product_spectrum(map_kind, L, mu, n)[0];
}

double osgm_radius_closed_form(double kappa) {
  if (!(kappa > 1)) throw InvalidParameter("condition number must be > 1");
  return (3 * kappa + 1) / (2 * kappa);
}

std::vector<SweepRow> radius_sweep(const std::vector<double>& kappas, int n) {
  std::vector<SweepRow> rows;
  rows.reserve(2 * kappas.size());
  for (double kappa : kappas) {
    if (!(kappa > 1)) throw InvalidParameter("condition number must be > 1");
    SweepRow o;
    o.kind = "osgm";
    o.kappa = kappa;
    o.rho_numeric = orbit_spectral_radius("osgm", kappa, 1.0, n);
    o.rho_closed_form = osgm_radius_closed_form(kappa);
    o.abs_err = std::abs(o.rho_numeric - o.rho_closed_form);
    rows.push_back(std::move(o));
    SweepRow h;
    h.kind = "hdm";
    h.kappa = kappa;
    h.rho_numeric = orbit_spectral_radius("hdm", kappa, 1.0, n);
    h.rho_closed_form = kNaN;
    h.abs_err = kNaN;
    rows.push_back(std::move(h));
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "kind,kappa,rho_numeric,rho_closed_form,abs_err\n";
  for (const auto& r : rows) {
    out += r.kind;
    out += ',';
    out += g17(r.kappa);
    out += ',';
    out += g17(r.rho_numeric);
    out += ',';
    out += g17(r.rho_closed_form);
    out += ',';
    out += g17(r.abs_err);
    out += '\n';
  }
  return out;
}

namespace {

struct SpikeProbe {
  long spike_iter = -1;  // first row with f > f(x^1), -1 when none
  double max_ratio = 0.0;
  RunTrace trace;
};

SpikeProbe probe_delta(const Objective& obj, double delta, double eta,
                       long max_iters) {
  RunConfig cfg;
  cfg.x1 = Vec(2);
  cfg.x1[0] = 1.0;
  cfg.x1[1] = delta;
  cfg.pkind = StepKind::Scalar;
  cfg.p1_scale = 0.0;
  cfg.eta = eta;
  cfg.tol = 0;
  cfg.budget = 0;
  cfg.max_iters = max_iters;
  SpikeProbe p;
  p.trace = run_osgm_h(obj.with_fresh_counters(), cfg, Landscape::Vanilla);
  if (p.trace.rows.empty()) return p;
  const double f1 = p.trace.rows[0].f;
  for (size_t i = 1; i < p.trace.rows.size(); ++i) {
    const double f = p.trace.rows[i].f;
    if (!std::isfinite(f)) break;
    if (f > f1) {
      if (p.spike_iter < 0) p.spike_iter = p.trace.rows[i].k;
      p.max_ratio = std::max(p.max_ratio, f / f1);
    }
  }
  return p;
}

}  // namespace

SpikeResult spike_scenario(double kappa, double eta, long target_K) {
  if (!(kappa >= 24)) throw InvalidParameter("spike needs 2/kappa << 1/6");
  if (!(eta > 0)) throw InvalidParameter("learning rate must be positive");
  if (target_K < 1) throw InvalidParameter("target iteration must be >= 1");

  const Objective obj = make_quadratic_2d(kappa).to_objective();
  const long probe_iters = std::max<long>(3 * target_K, 300);

  // Spike time grows as delta shrinks, so bisect on log10(delta). The best
  // spiking probe is tracked throughout: when target_K is not attainable the
  // bisection walks to the matching endpoint and the closest spike wins.
  double lo = -300.0, hi = -2.0;
  bool have_best = false;
  double best_delta = 0;
  long best_gap = std::numeric_limits<long>::max();
  long best_iter = -1;
  auto consider = [&](double t) {
    const double delta = std::pow(10.0, t);
    SpikeProbe p = probe_delta(obj, delta, eta, probe_iters);
    if (p.spike_iter < 0) return p.spike_iter;
    const long gap = std::abs(p.spike_iter - target_K);
    if (!have_best || gap < best_gap) {
      have_best = true;
      best_gap = gap;
      best_delta = delta;
      best_iter = p.spike_iter;
    }
    return p.spike_iter;
  };
  long k_lo = consider(lo);
  long k_hi = consider(hi);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const long k_mid = consider(mid);
    // No spike reads as "infinitely late", the small-delta side.
    const bool late = k_mid < 0 || k_mid > target_K;
    (late ? lo : hi) = mid;
    if (best_gap == 0) break;
  }
  (void)k_lo;
  (void)k_hi;

  SpikeResult res;
  if (!have_best) {
    // No probed delta spiked; report the small-delta endpoint run.
    res.delta = std::pow(10.0, lo);
    SpikeProbe p = probe_delta(obj, res.delta, eta, probe_iters);
    res.x1 = Vec(2);
    res.x1[0] = 1.0;
    res.x1[1] = res.delta;
    res.max_ratio = p.max_ratio;
    res.trace = std::move(p.trace);
    return res;
  }
  SpikeProbe p = probe_delta(obj, best_delta, eta, probe_iters);
  res.found = true;
  res.delta = best_delta;
  res.x1 = Vec(2);
  res.x1[0] = 1.0;
  res.x1[1] = best_delta;
  res.spike_iter = best_iter;
  res.max_ratio = p.max_ratio;
  res.trace = std::move(p.trace);
  return res;
}

}  // namespace osgm
