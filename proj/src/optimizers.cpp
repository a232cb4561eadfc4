#include "osgm/optimizers.hpp"

#include <cmath>

namespace osgm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double defaulted(double v, double dflt) { return std::isnan(v) ? dflt : v; }

Vec initial_point(const Objective& obj, const RunConfig& cfg) {
  if (cfg.x1.size() != 0) {
    if (cfg.x1.size() != obj.dim())
      throw InvalidConfig("initial point dimension mismatch");
    return cfg.x1;
  }
  Rng rng(cfg.seed);
  Vec v = rng.normal_vec(obj.dim());
  double n = v.norm();
  if (n == 0)
    v[0] = 1;
  else
    v /= n;
  return v;
}

std::string summarize(const Stepsize& P) {
  switch (P.kind) {
    case StepKind::Scalar: return "alpha=" + g17(P.alpha);
    case StepKind::Diagonal:
      return "dmin=" + g17(P.d.minCoeff()) + ";dmax=" + g17(P.d.maxCoeff());
    case StepKind::Full: return "pfro=" + g17(std::sqrt(P.frob_sq()));
  }
  return "";
}

std::string summarize(const Stepsize& P, double beta) {
  return summarize(P) + ";beta=" + g17(beta);
}

// Shared bookkeeping: budget metering, trace rows, stop conditions,
// observer dispatch.
struct RunCtx {
  const RunConfig& cfg;
  std::shared_ptr<OracleCounts> counts;
  long grad_base;
  RunTrace trace;

  RunCtx(const Objective& obj, const RunConfig& c)
      : cfg(c),
        counts(obj.counts()),
        grad_base(obj.stat().gradient) {}

  long grads() const {
    return counts->gradient.load(std::memory_order_relaxed) - grad_base;
  }

  void add_row(long k, double f, const Vec& g, double pot, double fb,
               double prog, std::string step) {
    if (!cfg.record_trace) return;
    TraceRow r;
    r.k = k;
    r.f = f;
    r.gnorm_inf = g.lpNorm<Eigen::Infinity>();
    r.gnorm_2 = g.norm();
    r.potential = pot;
    r.feedback = fb;
    r.progress = prog;
    r.step_summary = std::move(step);
    r.oracles = grads();
    trace.rows.push_back(std::move(r));
  }

  bool should_stop(long k, const Vec& g) {
    if (cfg.tol > 0 && g.lpNorm<Eigen::Infinity>() <= cfg.tol) {
      trace.status = "solved";
      return true;
    }
    if (cfg.budget > 0 && grads() >= cfg.budget) {
      trace.status = "budget";
      return true;
    }
    if (cfg.max_iters > 0 && k > cfg.max_iters) {
      trace.status = "iterations";
      return true;
    }
    return false;
  }

  void observe(const IterObs& o) {
    if (cfg.observer) cfg.observer(o);
  }

  RunTrace finish(long iters, double f, const Vec& g) {
    trace.iterations = iters;
    trace.grad_oracles = grads();
    trace.final_f = f;
    trace.final_gnorm_inf = g.lpNorm<Eigen::Infinity>();
    return std::move(trace);
  }
};

void require_no_preset(const RunConfig& cfg) {
  if (!cfg.preset.empty())
    throw InvalidConfig("this algorithm has no preset named " + cfg.preset);
}

}  // namespace

std::string RunTrace::to_csv() const {
  std::string out =
      "k,f,gnorm_inf,gnorm_2,potential,feedback,progress,step_summary,"
      "oracles\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k);
    out += ',';
    out += g17(r.f);
    out += ',';
    out += g17(r.gnorm_inf);
    out += ',';
    out += g17(r.gnorm_2);
    out += ',';
    out += g17(r.potential);
    out += ',';
    out += g17(r.feedback);
    out += ',';
    out += g17(r.progress);
    out += ',';
    out += r.step_summary;
    out += ',';
    out += std::to_string(r.oracles);
    out += '\n';
  }
  return out;
}

std::string RunTrace::summary_json() const {
  // Non-finite values are quoted: JSON has no nan/inf literals.
  auto num = [](double v) {
    return std::isfinite(v) ? g17(v) : "\"" + g17(v) + "\"";
  };
  std::string out = "{\"status\":\"" + status + "\"";
  out += ",\"iterations\":" + std::to_string(iterations);
  out += ",\"oracles\":" + std::to_string(grad_oracles);
  out += ",\"final_f\":" + num(final_f);
  out += ",\"final_gnorm_inf\":" + num(final_gnorm_inf);
  out += "}";
  return out;
}

RunTrace run_gd(const Objective& obj, const RunConfig& cfg) {
  require_no_preset(cfg);
  RunCtx ctx(obj, cfg);
  const double lr = defaulted(cfg.lr, 1.0 / obj.L());
  Vec x = initial_point(obj, cfg);
  double f = obj.value(x);
  Vec g = obj.gradient(x);
  const std::string step = "lr=" + g17(lr);
  ctx.add_row(0, f, g, kNaN, kNaN, kNaN, step);
  long k = 1;
  for (;; ++k) {
    if (ctx.should_stop(k, g)) break;
    const double f_old = f;
    const double gsq = g.squaredNorm();
    x -= lr * g;
    f = obj.value(x);
    g = obj.gradient(x);
    const double prog = gsq > 0 ? (f - f_old) / gsq : kNaN;
    ctx.add_row(k, f, g, kNaN, kNaN, prog, step);
    IterObs o;
    o.k = k;
    o.x = &x;
    o.f = f;
    o.g = &g;
    o.progress = prog;
    ctx.observe(o);
  }
  return ctx.finish(k - 1, f, g);
}

RunTrace run_gd_hb(const Objective& obj, const RunConfig& cfg) {
  require_no_preset(cfg);
  RunCtx ctx(obj, cfg);
  const double lr = defaulted(cfg.lr, 1.0 / obj.L());
  const double beta = cfg.momentum;
  Vec x = initial_point(obj, cfg);
  Vec x_prev = x;
  double f = obj.value(x);
  Vec g = obj.gradient(x);
  const std::string step = "lr=" + g17(lr) + ";beta=" + g17(beta);
  ctx.add_row(0, f, g, kNaN, kNaN, kNaN, step);
  long k = 1;
  for (;; ++k) {
    if (ctx.should_stop(k, g)) break;
    Vec xn = x - lr * g + beta * (x - x_prev);
    x_prev = x;
    x = std::move(xn);
    f = obj.value(x);
    g = obj.gradient(x);
    ctx.add_row(k, f, g, kNaN, kNaN, kNaN, step);
    IterObs o;
    o.k = k;
    o.x = &x;
    o.x_prev = &x_prev;
    o.f = f;
    o.g = &g;
    ctx.observe(o);
  }
  return ctx.finish(k - 1, f, g);
}

RunTrace run_agd_cvx(const Objective& obj, const RunConfig& cfg) {
  require_no_preset(cfg);
  RunCtx ctx(obj, cfg);
  const double lr = defaulted(cfg.lr, 1.0 / obj.L());
  Vec x = initial_point(obj, cfg);
  Vec x_prev = x;
  double f = obj.value(x);
  Vec gy = obj.gradient(x);  // y_1 = x_1, reused by the first iteration
  const std::string step = "lr=" + g17(lr);
  ctx.add_row(0, f, gy, kNaN, kNaN, kNaN, step);
  long k = 1;
  for (;; ++k) {
    if (ctx.should_stop(k, gy)) break;
    Vec y = x + ((k - 1.0) / (k + 2.0)) * (x - x_prev);
    if (k > 1) gy = obj.gradient(y);
    Vec xn = y - lr * gy;
    x_prev = x;
    x = std::move(xn);
    f = obj.value(x);
    ctx.add_row(k, f, gy, kNaN, kNaN, kNaN, step);
    IterObs o;
    o.k = k;
    o.x = &x;
    o.x_prev = &x_prev;
    o.f = f;
    o.g = &gy;
    ctx.observe(o);
  }
  return ctx.finish(k - 1, f, gy);
}

RunTrace run_agd_scvx(const Objective& obj, const RunConfig& cfg) {
  require_no_preset(cfg);
  if (!obj.mu() || !(*obj.mu() > 0))
    throw InvalidConfig("strongly convex acceleration needs mu > 0");
  RunCtx ctx(obj, cfg);
  const double L = obj.L();
  const double mu = *obj.mu();
  const double sq = std::sqrt(L / mu);
  Vec x = initial_point(obj, cfg);
  Vec z = x;
  double f = obj.value(x);
  Vec gy = obj.gradient(x);  // y_1 = x_1 because z_1 = x_1
  const std::string step = "lr=" + g17(1.0 / L);
  ctx.add_row(0, f, gy, kNaN, kNaN, kNaN, step);
  long k = 1;
  for (;; ++k) {
    if (ctx.should_stop(k, gy)) break;
    Vec y = x + (z - x) / (sq + 1.0);
    if (k > 1) gy = obj.gradient(y);
    x = y - gy / L;
    z = (1.0 - 1.0 / sq) * z + (1.0 / sq) * (y - gy / mu);
    f = obj.value(x);
    ctx.add_row(k, f, gy, kNaN, kNaN, kNaN, step);
    IterObs o;
    o.k = k;
    o.x = &x;
    o.x_prev = &z;
    o.f = f;
    o.g = &gy;
    ctx.observe(o);
  }
  return ctx.finish(k - 1, f, gy);
}

RunTrace run_adam(const Objective& obj, const RunConfig& cfg) {
  require_no_preset(cfg);
  RunCtx ctx(obj, cfg);
  const double lr = defaulted(cfg.lr, 1.0 / obj.L());
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  Vec x = initial_point(obj, cfg);
  double f = obj.value(x);
  Vec g = obj.gradient(x);
  Vec m = Vec::Zero(obj.dim());
  Vec v = Vec::Zero(obj.dim());
  const std::string step = "lr=" + g17(lr);
  ctx.add_row(0, f, g, kNaN, kNaN, kNaN, step);
  long k = 1;
  for (;; ++k) {
    if (ctx.should_stop(k, g)) break;
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(k));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(k));
    x -= lr * (m / c1).cwiseQuotient(((v / c2).cwiseSqrt().array() + eps)
                                          .matrix());
    f = obj.value(x);
    g = obj.gradient(x);
    ctx.add_row(k, f, g, kNaN, kNaN, kNaN, step);
    IterObs o;
    o.k = k;
    o.x = &x;
    o.f = f;
    o.g = &g;
    ctx.observe(o);
  }
  return ctx.finish(k - 1, f, g);
}

RunTrace run_adagrad(const Objective& obj, const RunConfig& cfg) {
  require_no_preset(cfg);
  RunCtx ctx(obj, cfg);
  const double lr = defaulted(cfg.lr, 1.0 / obj.L());
  const double eps = 1e-8;
  Vec x = initial_point(obj, cfg);
  double f = obj.value(x);
  Vec g = obj.gradient(x);
  Vec acc = Vec::Zero(obj.dim());
  const std::string step = "lr=" + g17(lr);
  ctx.add_row(0, f, g, kNaN, kNaN, kNaN, step);
  long k = 1;
  for (;; ++k) {
    if (ctx.should_stop(k, g)) break;
    acc += g.cwiseProduct(g);
    x -= lr * g.cwiseQuotient((acc.cwiseSqrt().array() + eps).matrix());
    f = obj.value(x);
    g = obj.gradient(x);
    ctx.add_row(k, f, g, kNaN, kNaN, kNaN, step);
    IterObs o;
    o.k = k;
    o.x = &x;
    o.f = f;
    o.g = &g;
    ctx.observe(o);
  }
  return ctx.finish(k - 1, f, g);
}

RunTrace run_classic_hdm(const Objective& obj, const RunConfig& cfg) {
  require_no_preset(cfg);
  RunCtx ctx(obj, cfg);
  const double L = obj.L();
  Stepsize P = Stepsize::scaled_identity(defaulted(cfg.p1_scale, 0.0),
                                         obj.dim(), cfg.pkind);
  LearnerConfig lc;
  lc.eta_P = defaulted(cfg.eta, 1.0 / L);
  if (cfg.setP_given) lc.setP = cfg.setP;
  Vec x = initial_point(obj, cfg);
  double f = obj.value(x);
  Vec g = obj.gradient(x);
  ctx.add_row(0, f, g, kNaN, kNaN, kNaN, summarize(P));
  long k = 1;
  for (;; ++k) {
    if (ctx.should_stop(k, g)) break;
    const double gsq = g.squaredNorm();
    if (!(gsq > kDenominatorGuard)) {
      ctx.trace.status = "stationary";
      break;
    }
    HypergradResult h = hypergrad_feedback(obj, x, f, g, P);
    ogd_step(P, nullptr, h.eval, lc);  // fresh P takes the step
    const double f_old = f;
    x -= P.apply(g);
    f = obj.value(x);
    g = obj.gradient(x);
    const double prog = (f - f_old) / gsq;
    ctx.add_row(k, f, g, kNaN, h.eval.value, prog, summarize(P));
    IterObs o;
    o.k = k;
    o.x = &x;
    o.f = f;
    o.g = &g;
    o.P = &P;
    o.feedback = h.eval.value;
    o.progress = prog;
    ctx.observe(o);
  }
  return ctx.finish(k - 1, f, g);
}

RunTrace run_osgm_h(const Objective& obj, const RunConfig& cfg,
                    Landscape landscape) {
  require_no_preset(cfg);
  RunCtx ctx(obj, cfg);
  const double L = obj.L();
  Stepsize P = Stepsize::scaled_identity(defaulted(cfg.p1_scale, 1.0 / L),
                                         obj.dim(), cfg.pkind);
  LearnerConfig lc;
  lc.eta_P = defaulted(cfg.eta, 1.0 / L);
  if (cfg.setP_given) lc.setP = cfg.setP;
  Vec x = initial_point(obj, cfg);
  double f = obj.value(x);
  Vec g = obj.gradient(x);
  ctx.add_row(0, f, g, kNaN, kNaN, kNaN, summarize(P));
  long k = 1;
  for (;; ++k) {
    if (ctx.should_stop(k, g)) break;
    const double gsq = g.squaredNorm();
    if (!(gsq > kDenominatorGuard)) {
      ctx.trace.status = "stationary";
      break;
    }
    HypergradResult h = hypergrad_feedback(obj, x, f, g, P);
    const double f_old = f;
    switch (landscape) {
      case Landscape::Vanilla:
        x = h.xplus;
        f = h.f_xplus;
        g = h.grad_xplus;
        break;
      case Landscape::Monotone:
        if (h.f_xplus <= f) {
          x = h.xplus;
          f = h.f_xplus;
          g = h.grad_xplus;
        }
        break;
      case Landscape::MonotoneLookahead: {
        Vec xlook = h.xplus - h.grad_xplus / L;
        double flook = obj.value(xlook);
        if (flook <= f) {
          x = std::move(xlook);
          f = flook;
          g = obj.gradient(x);
        }
        break;
      }
    }
    ogd_step(P, nullptr, h.eval, lc);
    const double prog = (f - f_old) / gsq;
    ctx.add_row(k, f, g, kNaN, h.eval.value, prog, summarize(P));
    IterObs o;
    o.k = k;
    o.x = &x;
    o.f = f;
    o.g = &g;
    o.P = &P;
    o.feedback = h.eval.value;
    o.progress = prog;
    ctx.observe(o);
  }
  return ctx.finish(k - 1, f, g);
}

RunTrace run_osgm_h_nonconvex(const Objective& obj, const RunConfig& cfg) {
  RunCtx ctx(obj, cfg);
  const double L = obj.L();
  double eta_default = 1.0 / (2.0 * L);
  if (cfg.preset == "thm-statement")
    eta_default = 1.0 / (4.0 * L);
  else if (!cfg.preset.empty())
    throw InvalidConfig("unknown preset: " + cfg.preset);
  Stepsize P = Stepsize::scaled_identity(defaulted(cfg.p1_scale, 1.0 / L),
                                         obj.dim(), cfg.pkind);
  LearnerConfig lc;
  lc.eta_P = defaulted(cfg.eta, eta_default);
  lc.setP = cfg.setP_given ? cfg.setP : CandidateSet::box(-10.0 / L, 10.0 / L);
  if (!lc.setP.bounded)
    throw InvalidConfig("nonconvex runs need a bounded candidate box");
  const double D = lc.setP.diameter_frob(obj.dim(), cfg.pkind);
  lc.setP.project(P);
  Vec x = initial_point(obj, cfg);
  double f = obj.value(x);
  Vec g = obj.gradient(x);
  ctx.add_row(0, f, g, kNaN, kNaN, kNaN, summarize(P));
  long k = 1;
  for (;; ++k) {
    if (ctx.should_stop(k, g)) break;
    const double gsq = g.squaredNorm();
    if (!(gsq > kDenominatorGuard)) {
      ctx.trace.status = "stationary";
      break;
    }
    const double lambda = weak_convexity_bound(obj, x, g, D, cfg.pkind);
    HypergradResult h = regularized_feedback(obj, x, f, g, P, lambda);
    const double f_old = f;
    Vec xlook = h.xplus - h.grad_xplus / L;
    double flook = obj.value(xlook);
    if (flook <= f) {
      x = std::move(xlook);
      f = flook;
      g = obj.gradient(x);
    }
    ogd_step(P, nullptr, h.eval, lc);
    const double prog = (f - f_old) / gsq;
    ctx.add_row(k, f, g, kNaN, h.eval.value, prog, summarize(P));
    IterObs o;
    o.k = k;
    o.x = &x;
    o.f = f;
    o.g = &g;
    o.P = &P;
    o.feedback = h.eval.value;
    o.progress = prog;
    o.lambda = lambda;
    ctx.observe(o);
  }
  return ctx.finish(k - 1, f, g);
}

RunTrace run_osgm_best(const Objective& obj, const RunConfig& cfg) {
  RunCtx ctx(obj, cfg);
  const double L = obj.L();
  const HBParams hb = HBParams::for_smoothness(L, cfg.omega_mult,
                                               cfg.tau_mult);
  double etaP_default = 1.0 / (2.0 * L);
  if (cfg.preset == "thm-appendix")
    etaP_default = 1.0 / (4.0 * L);
  else if (!cfg.preset.empty() && cfg.preset != "thm-main")
    throw InvalidConfig("unknown preset: " + cfg.preset);
  LearnerConfig lc;
  lc.eta_P = defaulted(cfg.eta_P, etaP_default);
  lc.eta_beta = defaulted(cfg.eta_beta, L * L * lc.eta_P);
  if (cfg.setP_given) lc.setP = cfg.setP;
  if (cfg.setB_given) lc.setB = cfg.setB;

  Stepsize P = Stepsize::scaled_identity(
      defaulted(cfg.p1_scale, 1.0 / (4.0 * L)), obj.dim(), cfg.pkind);
  double beta = defaulted(cfg.beta1, 0.5);
  lc.setP.project(P);
  beta = lc.setB.project(beta);

  const double shift = obj.fstar() ? *obj.fstar() : 0.0;
  Vec z1 = initial_point(obj, cfg);
  Vec z2 = z1;
  double f1 = obj.value(z1);
  Vec g1 = obj.gradient(z1);
  ctx.add_row(0, f1, g1, f1 - shift, kNaN, kNaN, summarize(P, beta));
  {
    IterObs o;
    o.k = 0;
    o.x = &z1;
    o.x_prev = &z2;
    o.f = f1;
    o.g = &g1;
    o.P = &P;
    o.beta = beta;
    o.potential = f1 - shift;
    ctx.observe(o);
  }
  long k = 1;
  for (;; ++k) {
    if (ctx.should_stop(k, g1)) break;
    HBFeedbackResult fb;
    try {
      fb = hb_feedback(obj, {z1, z2}, f1, g1, P, beta, hb, true);
    } catch (const StationaryPoint&) {
      ctx.trace.status = "stationary";
      break;
    }
    Vec zlook = fb.z1plus - fb.r / (L + hb.omega);
    const double flook = obj.value(zlook);
    const double phi_look =
        flook - shift + 0.5 * hb.omega * (zlook - z1).squaredNorm();
    double phi_next = fb.phi_z;
    if (phi_look <= fb.phi_z) {
      z2 = z1;
      z1 = std::move(zlook);
      f1 = flook;
      g1 = obj.gradient(z1);
      phi_next = phi_look;
    }
    const double prog = (phi_next - fb.phi_z) / fb.den;
    ogd_step(P, &beta, fb.eval, lc);
    ctx.add_row(k, f1, g1, phi_next, fb.eval.value, prog,
                summarize(P, beta));
    IterObs o;
    o.k = k;
    o.x = &z1;
    o.x_prev = &z2;
    o.f = f1;
    o.g = &g1;
    o.P = &P;
    o.beta = beta;
    o.feedback = fb.eval.value;
    o.progress = prog;
    o.potential = phi_next;
    ctx.observe(o);
  }
  return ctx.finish(k - 1, f1, g1);
}

RunTrace run_osgm_hb_adagrad(const Objective& obj, const RunConfig& cfg) {
  require_no_preset(cfg);
  RunCtx ctx(obj, cfg);
  const double L = obj.L();
  const HBParams hb = HBParams::for_smoothness(L, cfg.omega_mult,
                                               cfg.tau_mult);
  LearnerConfig lc;
  lc.eta_P = defaulted(cfg.eta_P, 1.0 / L);
  lc.eta_beta = defaulted(cfg.eta_beta, lc.eta_P);
  lc.setP = cfg.setP_given ? cfg.setP : CandidateSet::box(-10.0 / L, 10.0 / L);
  lc.setB = cfg.setB_given ? cfg.setB : Interval::box(0.0, 1.0);

  Stepsize P = Stepsize::scaled_identity(
      defaulted(cfg.p1_scale, 1.0 / (4.0 * L)), obj.dim(), cfg.pkind);
  double beta = defaulted(cfg.beta1, 0.5);
  lc.setP.project(P);
  beta = lc.setB.project(beta);
  AdaGradState st = AdaGradState::init_like(P);

  const double shift = obj.fstar() ? *obj.fstar() : 0.0;
  Vec z1 = initial_point(obj, cfg);
  Vec z2 = z1;
  double f1 = obj.value(z1);
  Vec g1 = obj.gradient(z1);
  ctx.add_row(0, f1, g1, f1 - shift, kNaN, kNaN, summarize(P, beta));
  long k = 1;
  for (;; ++k) {
    if (ctx.should_stop(k, g1)) break;
    HBFeedbackResult fb;
    try {
      fb = hb_feedback(obj, {z1, z2}, f1, g1, P, beta, hb, true);
    } catch (const StationaryPoint&) {
      ctx.trace.status = "stationary";
      break;
    }
    double phi_next = fb.phi_z;
    if (fb.phi_zplus <= fb.phi_z) {
      z2 = z1;
      z1 = fb.z1plus;
      f1 = fb.f_z1plus;
      g1 = fb.grad_z1plus;  // reuse: one fresh gradient per iteration
      phi_next = fb.phi_zplus;
    }
    const double prog = (phi_next - fb.phi_z) / fb.den;
    adagrad_step(P, &beta, fb.eval, st, lc);
    ctx.add_row(k, f1, g1, phi_next, fb.eval.value, prog,
                summarize(P, beta));
    IterObs o;
    o.k = k;
    o.x = &z1;
    o.x_prev = &z2;
    o.f = f1;
    o.g = &g1;
    o.P = &P;
    o.beta = beta;
    o.feedback = fb.eval.value;
    o.progress = prog;
    o.potential = phi_next;
    ctx.observe(o);
  }
  return ctx.finish(k - 1, f1, g1);
}

RunTrace run_osgm_bb(const Objective& obj, const RunConfig& cfg) {
  require_no_preset(cfg);
  RunCtx ctx(obj, cfg);
  const double L = obj.L();
  double alpha = defaulted(cfg.p1_scale, 1.0 / L);
  const double prox_eta = defaulted(cfg.prox_eta, 1.0 / L);
  Vec x = initial_point(obj, cfg);
  double f = obj.value(x);
  Vec g = obj.gradient(x);
  ctx.add_row(0, f, g, kNaN, kNaN, kNaN, "alpha=" + g17(alpha));
  long k = 1;
  for (;; ++k) {
    if (ctx.should_stop(k, g)) break;
    const double gsq = g.squaredNorm();
    if (!(gsq > kDenominatorGuard)) {
      ctx.trace.status = "stationary";
      break;
    }
    Vec prop = x - alpha * g;
    const double fprop = obj.value(prop);
    const Vec gprop = obj.gradient(prop);
    const double fbval = (fprop - f) / gsq;
    Vec xlook = prop - gprop / L;
    const double flook = obj.value(xlook);
    const double f_old = f;
    alpha = online_prox_point_step(obj, x, f, g, alpha, prox_eta, &gprop);
    if (flook <= f) {
      x = std::move(xlook);
      f = flook;
      g = obj.gradient(x);
    }
    const double prog = (f - f_old) / gsq;
    ctx.add_row(k, f, g, kNaN, fbval, prog, "alpha=" + g17(alpha));
    IterObs o;
    o.k = k;
    o.x = &x;
    o.f = f;
    o.g = &g;
    o.feedback = fbval;
    o.progress = prog;
    ctx.observe(o);
  }
  return ctx.finish(k - 1, f, g);
}

RunTrace run_prox_osgm(const CompositeObjective& comp, const RunConfig& cfg) {
  require_no_preset(cfg);
  const Objective& obj = comp.smooth;
  if (cfg.pkind != StepKind::Diagonal)
    throw UnsupportedParametrization(
        "composite runs need a diagonal parametrization");
  RunCtx ctx(obj, cfg);
  const double L = obj.L();
  Stepsize P = Stepsize::scaled_identity(defaulted(cfg.p1_scale, 1.0 / L),
                                         obj.dim(), StepKind::Diagonal);
  LearnerConfig lc;
  lc.eta_P = defaulted(cfg.eta, 1.0 / L);
  if (cfg.setP_given) lc.setP = cfg.setP;
  lc.setP.project(P);

  Vec x = initial_point(obj, cfg);
  double phix = comp.phi(x);
  Vec gx = obj.gradient(x);
  Vec GL = gradient_map(comp, x, L, gx);
  ctx.add_row(0, phix, GL, kNaN, kNaN, kNaN, summarize(P));
  long k = 1;
  for (;; ++k) {
    if (ctx.should_stop(k, GL)) break;
    const double S = GL.squaredNorm();
    if (!(S > kDenominatorGuard)) {
      ctx.trace.status = "stationary";
      break;
    }
    ProxLinearized plin = prox_linearized_grad(comp, x, GL, P);
    online_prox_grad_step(comp, x, GL, plin.grad, P, lc.eta_P, lc.setP);
    Vec xprop = x - P.apply(GL);
    const double phiprop = comp.phi(xprop);
    const double fbval = (phiprop - phix) / S;
    const double phi_old = phix;
    if (phiprop <= phix) {
      x = std::move(xprop);
      phix = phiprop;
      gx = obj.gradient(x);
      GL = gradient_map(comp, x, L, gx);
    }
    const double prog = (phix - phi_old) / S;
    ctx.add_row(k, phix, GL, kNaN, fbval, prog, summarize(P));
    IterObs o;
    o.k = k;
    o.x = &x;
    o.f = phix;
    o.g = &GL;
    o.P = &P;
    o.feedback = fbval;
    o.progress = prog;
    ctx.observe(o);
  }
  return ctx.finish(k - 1, phix, GL);
}

double agd_quadratic_potential(const Objective& obj, const Vec& x,
                               const Vec& z) {
  if (!obj.fstar() || !obj.mu() || !(*obj.mu() > 0))
    throw InvalidConfig("potential needs fstar and mu > 0");
  Vec g = obj.gradient(x);
  return obj.value(z) - *obj.fstar() + g.squaredNorm() / (2.0 * *obj.mu());
}

double agd_contraction_factor(double kappa) {
  if (!(kappa > 1)) throw InvalidParameter("kappa must be > 1");
  const double first = (kappa - 1.0) * (kappa - 1.0) /
                       (kappa * (std::sqrt(kappa) + 1.0) *
                        (std::sqrt(kappa) + 1.0));
  const double second = 1.0 + 1.0 / (2.0 * kappa) +
                        std::sqrt(4.0 * kappa + 1.0) / (2.0 * kappa);
  return first * second;
}

BoundReport bound_report(const Objective& obj, const RunTrace& trace) {
  BoundReport r;
  if (trace.rows.empty()) return r;
  r.K = static_cast<long>(trace.rows.size()) - 1;
  const double L = obj.L();
  r.sum_neg_progress = 0;
  for (size_t i = 1; i < trace.rows.size(); ++i) {
    const double b = trace.rows[i].progress;
    if (std::isfinite(b)) r.sum_neg_progress -= b;
  }
  if (r.K >= 1) {
    // min over x^1..x^K, the points the nonconvex reduction quantifies over
    double best = std::numeric_limits<double>::infinity();
    for (long i = 0; i < r.K; ++i) {
      const double gn = trace.rows[i].gnorm_2;
      best = std::min(best, gn * gn);
    }
    r.min_gradnorm_sq = best;
  }
  if (!obj.fstar()) return r;
  const double fstar = *obj.fstar();
  r.gap1 = trace.rows.front().f - fstar;
  r.final_gap = trace.rows.back().f - fstar;
  const bool strongly = obj.mu() && *obj.mu() > 0;
  if (strongly && obj.is_quadratic() && r.gap1 > 0) {
    // Level-set radius of a centered quadratic: Delta^2 = 2 gap / mu.
    r.Delta = std::sqrt(2.0 * r.gap1 / *obj.mu());
    r.V = std::min(r.gap1 / (4.0 * r.Delta * r.Delta), L / 2.0);
    r.partial = false;
  } else {
    r.V = L / 2.0;
    r.partial = true;
  }
  const double denom = 1.0 + r.V * r.sum_neg_progress;
  if (denom > 0) r.hb_convex_bound = r.gap1 / denom;
  if (r.K >= 1) {
    r.nonconvex_envelope = 2.0 * L * r.gap1 / static_cast<double>(r.K);
    if (strongly) {
      const double mu = *obj.mu();
      r.hb_strongly_convex_bound =
          r.gap1 *
          std::pow(1.0 - (mu / static_cast<double>(r.K)) * r.sum_neg_progress,
                   static_cast<double>(r.K));
      const double kappa = L / mu;
      r.linear_rate_envelope =
          r.gap1 * std::pow(1.0 - 1.0 / (8.0 * kappa),
                            static_cast<double>(r.K));
    }
  }
  return r;
}

}  // namespace osgm
