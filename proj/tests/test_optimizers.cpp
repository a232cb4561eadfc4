#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "osgm/feedback.hpp"
#include "osgm/optimizers.hpp"
#include "osgm/problems.hpp"

using osgm::CandidateSet;
using osgm::CompositeObjective;
using osgm::Landscape;
using osgm::Mat;
using osgm::Objective;
using osgm::RunConfig;
using osgm::RunTrace;
using osgm::StepKind;
using osgm::Stepsize;
using osgm::Vec;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

osgm::Objective quad_1d() {
  osgm::QuadraticProblem qp;
  qp.eigs = Vec::Constant(1, 1.0);
  return qp.to_objective();
}

// Post-update scalar stepsize recorded in a trace row.
double parse_alpha(const std::string& summary) {
  auto pos = summary.find("alpha=");
  REQUIRE(pos != std::string::npos);
  return std::strtod(summary.c_str() + pos + 6, nullptr);
}

RunConfig exact_run(const Vec& x1, long iters) {
  RunConfig cfg;
  cfg.x1 = x1;
  cfg.tol = 0;
  cfg.budget = 0;
  cfg.max_iters = iters;
  return cfg;
}

CompositeObjective seeded_lasso(double l1) {
  osgm::Rng rng(17);
  Mat A(8, 5);
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) A(i, j) = rng.normal();
  Vec y = rng.normal_vec(8);
  return osgm::make_lasso(A, y, l1);
}

}  // namespace

TEST_SUITE("optimizers") {

TEST_CASE("gradient descent solves a one dimensional quadratic in one step") {
  Objective obj = quad_1d();
  RunConfig cfg;
  cfg.x1 = Vec::Ones(1);
  RunTrace tr = osgm::run_gd(obj, cfg);
  CHECK(tr.rows.size() == 2);
  CHECK(tr.rows[0].f == 0.5);
  CHECK(tr.rows[1].f == 0.0);
  CHECK(tr.status == "solved");
  CHECK(tr.iterations == 1);
  CHECK(tr.final_f == 0.0);
  CHECK(tr.final_gnorm_inf == 0.0);
  CHECK(tr.final_gnorm_inf <= cfg.tol);
  CHECK(tr.rows[1].oracles > tr.rows[0].oracles);
  CHECK(tr.rows[0].step_summary == "lr=1");
}

TEST_CASE("momentum at zero reproduces plain gradient descent") {
  osgm::QuadraticProblem qp = osgm::make_quadratic(6, 10.0, 3);
  Objective obj = qp.to_objective();
  RunConfig cfg;
  cfg.seed = 7;
  cfg.tol = 0;
  cfg.budget = 0;
  cfg.max_iters = 12;
  RunTrace plain = osgm::run_gd(obj.with_fresh_counters(), cfg);
  RunConfig hb = cfg;
  hb.momentum = 0.0;
  RunTrace mom = osgm::run_gd_hb(obj.with_fresh_counters(), hb);
  REQUIRE(plain.rows.size() == mom.rows.size());
  for (size_t k = 0; k < plain.rows.size(); ++k)
    CHECK(plain.rows[k].f == mom.rows[k].f);
}

TEST_CASE("run caps and config validation") {
  osgm::QuadraticProblem qp = osgm::make_quadratic(4, 8.0, 1);
  Objective obj = qp.to_objective();

  RunConfig budgeted;
  budgeted.tol = 0;
  budgeted.budget = 5;
  RunTrace tr = osgm::run_gd(obj.with_fresh_counters(), budgeted);
  CHECK(tr.status == "budget");
  CHECK(tr.grad_oracles == 5);

  RunConfig capped;
  capped.tol = 0;
  capped.budget = 0;
  capped.max_iters = 3;
  RunTrace tr2 = osgm::run_gd(obj.with_fresh_counters(), capped);
  CHECK(tr2.status == "iterations");
  CHECK(tr2.iterations == 3);
  CHECK(tr2.rows.size() == 4);

  RunConfig named;
  named.preset = "fast";
  CHECK_THROWS_AS(osgm::run_gd(obj, named), osgm::InvalidConfig);
  CHECK_THROWS_AS(osgm::run_adam(obj, named), osgm::InvalidConfig);
  CHECK_THROWS_AS(osgm::run_agd_cvx(obj, named), osgm::InvalidConfig);
  CHECK_THROWS_AS(osgm::run_osgm_hb_adagrad(obj, named), osgm::InvalidConfig);

  RunConfig wrong;
  wrong.x1 = Vec::Ones(3);
  CHECK_THROWS_AS(osgm::run_gd(obj, wrong), osgm::InvalidConfig);
}

TEST_CASE("identical seeds reproduce runs and different seeds vary") {
  osgm::QuadraticProblem qp = osgm::make_quadratic(5, 20.0, 2);
  Objective obj = qp.to_objective();
  RunConfig cfg;
  cfg.seed = 5;
  cfg.tol = 0;
  cfg.budget = 50;
  RunTrace a = osgm::run_gd(obj.with_fresh_counters(), cfg);
  RunTrace b = osgm::run_gd(obj.with_fresh_counters(), cfg);
  CHECK(a.to_csv() == b.to_csv());
  cfg.seed = 6;
  RunTrace c = osgm::run_gd(obj.with_fresh_counters(), cfg);
  CHECK(a.rows[0].f != c.rows[0].f);
}

TEST_CASE("accelerated strongly convex method contracts its potential") {
  CHECK(osgm::agd_contraction_factor(4.0) ==
        doctest::Approx(0.4100970508005519).epsilon(1e-14));
  for (double kappa : {2.0, 4.0, 25.0, 100.0, 1e4})
    CHECK(osgm::agd_contraction_factor(kappa) <=
          1.0 - 1.0 / std::sqrt(kappa) + 1e-12);
  CHECK_THROWS_AS(osgm::agd_contraction_factor(1.0), osgm::InvalidParameter);

  osgm::QuadraticProblem qp = osgm::make_quadratic(10, 25.0, 11);
  Objective obj = qp.to_objective();
  Objective fresh = obj.with_fresh_counters();
  const double fac = osgm::agd_contraction_factor(obj.L() / *obj.mu());
  REQUIRE(fac < 1.0);

  Vec x1 = Vec::Ones(10);
  double phi_prev = osgm::agd_quadratic_potential(fresh, x1, x1);
  const double phi1 = phi_prev;
  RunConfig cfg = exact_run(x1, 60);
  cfg.observer = [&](const osgm::IterObs& o) {
    double phi = osgm::agd_quadratic_potential(fresh, *o.x, *o.x_prev);
    CHECK(phi <= fac * phi_prev * (1.0 + 1e-10) + 1e-300);
    CHECK(phi <= phi1 * std::pow(fac, static_cast<double>(o.k)) *
                     (1.0 + 1e-9));
    CHECK(o.f <= phi * (1.0 + 1e-10) + 1e-12);
    phi_prev = phi;
  };
  osgm::run_agd_scvx(obj, cfg);

  Objective ros = osgm::make_rosenbrock(4);
  RunConfig plain;
  CHECK_THROWS_AS(osgm::run_agd_scvx(ros, plain), osgm::InvalidConfig);
  CHECK_THROWS_AS(osgm::agd_quadratic_potential(ros, Vec::Zero(4), Vec::Zero(4)),
                  osgm::InvalidConfig);
}

TEST_CASE("baseline methods make progress and meter their oracles") {
  osgm::QuadraticProblem qp = osgm::make_quadratic(5, 10.0, 4);
  Objective obj = qp.to_objective();
  RunConfig cfg;
  cfg.seed = 3;
  cfg.tol = 1e-6;
  cfg.budget = 400;

  for (auto runner : {osgm::run_agd_cvx, osgm::run_adam, osgm::run_adagrad}) {
    Objective fresh = obj.with_fresh_counters();
    RunTrace tr = runner(fresh, cfg);
    REQUIRE(tr.rows.size() >= 2);
    CHECK(tr.rows.back().f < tr.rows.front().f);
    CHECK((tr.status == "solved" || tr.status == "budget"));
    CHECK(tr.grad_oracles == fresh.stat().gradient);
    for (size_t i = 1; i < tr.rows.size(); ++i)
      CHECK(tr.rows[i].oracles >= tr.rows[i - 1].oracles);
  }
}

TEST_CASE("frozen prescient scalar run matches fixed step descent") {
  osgm::QuadraticProblem qp = osgm::make_quadratic(5, 12.0, 2);
  Objective obj = qp.to_objective();
  Vec x1 = Vec::Ones(5);

  RunConfig fixed = exact_run(x1, 25);
  RunTrace gd = osgm::run_gd(obj.with_fresh_counters(), fixed);

  RunConfig frozen = exact_run(x1, 25);
  frozen.pkind = StepKind::Scalar;
  frozen.p1_scale = 1.0 / obj.L();
  frozen.eta = 0.0;
  Objective metered = obj.with_fresh_counters();
  RunTrace hdm = osgm::run_classic_hdm(metered, frozen);

  REQUIRE(gd.rows.size() == hdm.rows.size());
  for (size_t k = 0; k < gd.rows.size(); ++k)
    CHECK(gd.rows[k].f == hdm.rows[k].f);
  // one start gradient plus two fresh gradients per prescient iteration
  CHECK(hdm.grad_oracles == 1 + 2 * 25);
  CHECK(metered.stat().gradient == hdm.grad_oracles);
}

TEST_CASE("prescient scalar run learns the stabilizing stepsize") {
  osgm::QuadraticProblem qp = osgm::make_quadratic_2d(10.0);
  Objective obj = qp.to_objective();
  Vec x1(2);
  x1 << 1.0, 1.0;

  // At alpha1 = 0 the proposal is a null move, so the first hypergradient is
  // exactly -1 and the learned stepsize lands on eta.
  RunConfig one = exact_run(x1, 1);
  one.pkind = StepKind::Scalar;
  one.eta = 0.037;
  double alpha_seen = -1;
  one.observer = [&](const osgm::IterObs& o) {
    if (o.k == 1) alpha_seen = o.P->alpha;
  };
  osgm::run_classic_hdm(obj.with_fresh_counters(), one);
  CHECK(alpha_seen == 0.037);

  RunConfig longrun = exact_run(x1, 2500);
  longrun.pkind = StepKind::Scalar;
  const double target = 2.0 / (obj.L() + *obj.mu());
  longrun.observer = [&](const osgm::IterObs& o) {
    if (o.k >= 2000)
      CHECK(std::abs(o.P->alpha - target) <= 0.05 * target);
  };
  osgm::run_classic_hdm(obj.with_fresh_counters(), longrun);
}

TEST_CASE("single point online method variants respect their landscapes") {
  osgm::QuadraticProblem qp = osgm::make_quadratic(6, 30.0, 4);
  Objective obj = qp.to_objective();
  RunConfig cfg;
  cfg.seed = 9;
  cfg.tol = 0;
  cfg.budget = 0;
  cfg.max_iters = 60;
  RunTrace mono = osgm::run_osgm_h(obj.with_fresh_counters(), cfg,
                                   Landscape::Monotone);
  for (size_t k = 1; k < mono.rows.size(); ++k)
    CHECK(mono.rows[k].f <=
          mono.rows[k - 1].f + 1e-12 * std::max(1.0, mono.rows[k - 1].f));

  // Vanilla takes the proposal as-is.
  osgm::QuadraticProblem q2 = osgm::make_quadratic_2d(10.0);
  Objective obj2 = q2.to_objective();
  Vec x1(2);
  x1 << 1.0, 1.0;
  RunConfig van = exact_run(x1, 1);
  RunTrace tv = osgm::run_osgm_h(obj2.with_fresh_counters(), van,
                                 Landscape::Vanilla);
  CHECK(tv.rows[1].f == doctest::Approx(0.405).epsilon(1e-15));

  // An equal-value proposal is still taken.
  Objective one = quad_1d();
  RunConfig tie = exact_run(Vec::Ones(1), 1);
  tie.pkind = StepKind::Scalar;
  tie.p1_scale = 2.0;
  tie.eta = 0.0;
  double moved = 0;
  tie.observer = [&](const osgm::IterObs& o) { moved = (*o.x)(0); };
  RunTrace tt = osgm::run_osgm_h(one.with_fresh_counters(), tie,
                                 Landscape::Monotone);
  CHECK(moved == -1.0);
  CHECK(tt.rows[1].f == 0.5);

  // The lookahead repairs a wildly overshooting proposal in one extra step.
  RunConfig wild;
  wild.x1 = Vec::Ones(1);
  wild.pkind = StepKind::Scalar;
  wild.p1_scale = 100.0;
  RunTrace tw = osgm::run_osgm_h(one.with_fresh_counters(), wild,
                                 Landscape::MonotoneLookahead);
  CHECK(tw.rows[1].f == 0.0);
  CHECK(tw.status == "solved");
}

TEST_CASE("safeguarded nonconvex run certifies stationarity at the rate") {
  Objective ros = osgm::make_rosenbrock(2);
  const double L = ros.L();
  Vec x1(2);
  x1 << -0.5, 0.8;
  RunConfig cfg = exact_run(x1, 200);
  cfg.observer = [&](const osgm::IterObs& o) {
    CHECK(std::isfinite(o.lambda));
    CHECK(o.lambda >= 0.0);
    CHECK(o.lambda <= L);
  };
  RunTrace tr = osgm::run_osgm_h_nonconvex(ros, cfg);
  const double gap1 = tr.rows[0].f;
  double minsq = kInf;
  for (size_t i = 0; i + 1 < tr.rows.size(); ++i) {
    minsq = std::min(minsq, tr.rows[i].gnorm_2 * tr.rows[i].gnorm_2);
    const double K = static_cast<double>(i + 1);
    CHECK(minsq * K <= 2.0 * L * gap1 * (1.0 + 1e-10));
  }

  // Convexity repair is inactive on a convex quadratic.
  osgm::QuadraticProblem qp = osgm::make_quadratic(4, 5.0, 8);
  Objective obj = qp.to_objective();
  RunConfig conv;
  conv.seed = 2;
  conv.tol = 0;
  conv.budget = 0;
  conv.max_iters = 20;
  conv.observer = [&](const osgm::IterObs& o) { CHECK(o.lambda == 0.0); };
  osgm::run_osgm_h_nonconvex(obj, conv);

  RunConfig open;
  open.setP_given = true;
  open.setP = CandidateSet();
  CHECK_THROWS_AS(osgm::run_osgm_h_nonconvex(ros, open), osgm::InvalidConfig);

  RunConfig stated;
  stated.seed = 1;
  stated.budget = 60;
  stated.preset = "thm-statement";
  RunTrace ts = osgm::run_osgm_h_nonconvex(ros.with_fresh_counters(), stated);
  CHECK(ts.rows.size() >= 2);
  RunConfig bogus;
  bogus.preset = "zzz";
  CHECK_THROWS_AS(osgm::run_osgm_h_nonconvex(ros, bogus), osgm::InvalidConfig);
}

TEST_CASE("heavy ball online method matches its hand computed first step") {
  Objective obj = quad_1d();
  RunConfig cfg = exact_run(Vec::Ones(1), 1);
  bool saw0 = false, saw1 = false;
  cfg.observer = [&](const osgm::IterObs& o) {
    if (o.k == 0) {
      saw0 = true;
      CHECK(o.f == 0.5);
      CHECK(o.potential == 0.5);
      CHECK(o.beta == 0.5);
      CHECK(o.P->d(0) == 0.25);
      CHECK(std::isnan(o.feedback));
    } else {
      saw1 = true;
      CHECK(o.feedback == -0.125);
      CHECK(o.progress == -0.125);
      CHECK(o.potential == 0.375);
      // a vanishing residual leaves both hyperparameters untouched
      CHECK(o.P->d(0) == 0.25);
      CHECK(o.beta == 0.5);
      CHECK((*o.x)(0) == 0.75);
    }
  };
  RunTrace tr = osgm::run_osgm_best(obj, cfg);
  CHECK(saw0);
  CHECK(saw1);
  CHECK(tr.rows[0].potential == 0.5);
  CHECK(tr.rows[1].potential == 0.375);
  CHECK(tr.rows[1].f == 0.28125);
  CHECK(tr.rows[1].feedback == -0.125);
  CHECK(tr.rows[1].progress == -0.125);
}

TEST_CASE("heavy ball online method achieves the promised linear envelope") {
  osgm::QuadraticProblem qp = osgm::make_quadratic(8, 20.0, 9);
  Objective obj = qp.to_objective();
  const double L = obj.L();
  const double kappa = L / *obj.mu();
  const double rate = 1.0 - 1.0 / (8.0 * kappa);
  osgm::HBParams hb = osgm::HBParams::for_smoothness(L);

  Objective fresh = obj.with_fresh_counters();
  Vec pz1, pz2;
  Stepsize pP = Stepsize::scaled_identity(0.0, 8, StepKind::Diagonal);
  double pbeta = 0;

  RunConfig cfg = exact_run(Vec::Ones(8), 250);
  cfg.observer = [&](const osgm::IterObs& o) {
    if (o.k == 0) {
      pz1 = *o.x;
      pz2 = *o.x_prev;
      pP = *o.P;
      pbeta = o.beta;
      return;
    }
    // Recompute the queried feedback at the pre-update state: the reported
    // progress must clear the lookahead guarantee at that query.
    double f1 = fresh.value(pz1);
    Vec g1 = fresh.gradient(pz1);
    auto fb = osgm::hb_feedback(fresh, {pz1, pz2}, f1, g1, pP, pbeta, hb);
    CHECK(o.feedback == doctest::Approx(fb.eval.value).epsilon(1e-12));
    const double cap =
        std::min(o.feedback - fb.eval.dual_sq / (2.0 * (L + hb.omega)), 0.0);
    CHECK(o.progress <= cap + 1e-9);
    pz1 = *o.x;
    pz2 = *o.x_prev;
    pP = *o.P;
    pbeta = o.beta;
  };
  RunTrace tr = osgm::run_osgm_best(obj, cfg);

  const double gap1 = tr.rows[0].f;
  for (size_t k = 0; k < tr.rows.size(); ++k) {
    CHECK(tr.rows[k].f <=
          gap1 * std::pow(rate, static_cast<double>(k)) * (1.0 + 1e-9) +
              1e-14);
    if (k >= 1)
      CHECK(tr.rows[k].potential <=
            tr.rows[k - 1].potential * (1.0 + 1e-12) + 1e-15);
  }

  RunConfig still = exact_run(Vec::Zero(8), 10);
  RunTrace ts = osgm::run_osgm_best(obj.with_fresh_counters(), still);
  CHECK(ts.status == "stationary");
  RunConfig eased;
  eased.x1 = Vec::Zero(8);
  RunTrace te = osgm::run_osgm_best(obj.with_fresh_counters(), eased);
  CHECK(te.status == "solved");

  RunConfig appendix = exact_run(Vec::Ones(8), 5);
  appendix.preset = "thm-appendix";
  RunTrace ta = osgm::run_osgm_best(obj.with_fresh_counters(), appendix);
  CHECK(ta.rows.size() == 6);
  RunConfig bogus;
  bogus.preset = "bogus";
  CHECK_THROWS_AS(osgm::run_osgm_best(obj, bogus), osgm::InvalidConfig);
}

TEST_CASE("heavy ball adagrad variant is monotone and frugal with gradients") {
  osgm::QuadraticProblem qp = osgm::make_quadratic(6, 15.0, 5);
  Objective obj = qp.to_objective();
  const double L = obj.L();
  const long K = 50;

  Objective lean = obj.with_fresh_counters();
  RunConfig cfg = exact_run(Vec::Ones(6), K);
  cfg.observer = [&](const osgm::IterObs& o) {
    for (int i = 0; i < o.P->d.size(); ++i) {
      CHECK(o.P->d(i) >= -10.0 / L - 1e-12);
      CHECK(o.P->d(i) <= 10.0 / L + 1e-12);
    }
    CHECK(o.beta >= 0.0);
    CHECK(o.beta <= 1.0);
  };
  RunTrace tr = osgm::run_osgm_hb_adagrad(lean, cfg);
  // the accepted gradient is reused as the next query's gradient
  CHECK(tr.grad_oracles == K + 1);
  CHECK(lean.stat().gradient == K + 1);
  CHECK(tr.rows.back().f < tr.rows.front().f);
  for (size_t k = 1; k < tr.rows.size(); ++k)
    CHECK(tr.rows[k].potential <=
          tr.rows[k - 1].potential * (1.0 + 1e-12) + 1e-15);

  Objective rich = obj.with_fresh_counters();
  RunConfig best = exact_run(Vec::Ones(6), K);
  RunTrace tb = osgm::run_osgm_best(rich, best);
  CHECK(tb.grad_oracles <= 2 * K + 1);
  CHECK(tb.grad_oracles > K + 1);
  CHECK(tr.grad_oracles < tb.grad_oracles);
}

TEST_CASE("curvature ratio steps emerge from the proximal stepsize learner") {
  osgm::QuadraticProblem qp;
  qp.eigs = Vec(3);
  qp.eigs << 1.0, 4.0, 10.0;
  Objective obj = qp.to_objective();
  Mat A = qp.matrix();

  std::vector<Vec> xs;
  Vec x1 = Vec::Ones(3);
  xs.push_back(x1);
  RunConfig cfg = exact_run(x1, 8);
  cfg.prox_eta = kInf;
  cfg.observer = [&](const osgm::IterObs& o) { xs.push_back(*o.x); };
  RunTrace tr = osgm::run_osgm_bb(obj.with_fresh_counters(), cfg);
  REQUIRE(tr.rows.size() == 9);
  for (size_t k = 1; k < tr.rows.size(); ++k) {
    Vec g = A * xs[k - 1];
    const double want = g.squaredNorm() / g.dot(A * g);
    CHECK(parse_alpha(tr.rows[k].step_summary) ==
          doctest::Approx(want).epsilon(1e-12));
    CHECK(std::isfinite(tr.rows[k].feedback));
  }

  // Finite eta: each update is the exact proximal point of the local
  // quadratic model, so the envelope identity holds at every iteration.
  std::vector<Vec> ys;
  Vec y1 = Vec::Ones(3);
  ys.push_back(y1);
  RunConfig fin = exact_run(y1, 8);
  fin.prox_eta = 0.25;
  fin.p1_scale = 0.3;
  fin.observer = [&](const osgm::IterObs& o) { ys.push_back(*o.x); };
  RunTrace tf = osgm::run_osgm_bb(obj.with_fresh_counters(), fin);
  const double eta = 0.25;
  for (size_t k = 1; k < tf.rows.size(); ++k) {
    Vec g = A * ys[k - 1];
    const double a = g.dot(A * g) / g.squaredNorm();
    const double al = parse_alpha(tf.rows[k - 1].step_summary);
    const double an = parse_alpha(tf.rows[k].step_summary);
    CHECK(an == doctest::Approx((eta + al) / (a * eta + 1.0)).epsilon(1e-12));
    auto h = [&](double t) { return 0.5 * a * t * t - t; };
    const double hp = a * al - 1.0;
    const double lhs = h(an) + (an - al) * (an - al) / (2.0 * eta);
    const double rhs = h(al) - hp * hp / (2.0 * (a + 1.0 / eta));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(h(al))));
  }

  // A vanishing prox weight freezes the stepsize; the run then coincides
  // with the frozen scalar lookahead method.
  osgm::QuadraticProblem q4 = osgm::make_quadratic(4, 12.0, 6);
  Objective obj4 = q4.to_objective();
  RunConfig frozen = exact_run(Vec::Ones(4), 30);
  frozen.prox_eta = 1e-300;
  frozen.p1_scale = 0.09;
  RunTrace bb = osgm::run_osgm_bb(obj4.with_fresh_counters(), frozen);
  RunConfig look = exact_run(Vec::Ones(4), 30);
  look.pkind = StepKind::Scalar;
  look.p1_scale = 0.09;
  look.eta = 0.0;
  RunTrace lk = osgm::run_osgm_h(obj4.with_fresh_counters(), look,
                                 Landscape::MonotoneLookahead);
  REQUIRE(bb.rows.size() == lk.rows.size());
  for (size_t k = 0; k < bb.rows.size(); ++k)
    CHECK(bb.rows[k].f == lk.rows[k].f);
  CHECK(bb.status == lk.status);
}

TEST_CASE("composite online method tracks the frozen reference loop") {
  CompositeObjective plain = seeded_lasso(0.0);
  const double L = plain.smooth.L();
  Vec x1 = Vec::Constant(5, 0.3);
  RunConfig cfg = exact_run(x1, 10);
  RunTrace tr = osgm::run_prox_osgm(plain.with_fresh_counters(), cfg);
  REQUIRE(tr.rows.size() == 11);

  CompositeObjective ref = plain.with_fresh_counters();
  Stepsize P = Stepsize::scaled_identity(1.0 / L, 5, StepKind::Diagonal);
  Vec x = x1;
  double phix = ref.phi(x);
  Vec gx = ref.smooth.gradient(x);
  Vec GL = osgm::gradient_map(ref, x, L, gx);
  CHECK(tr.rows[0].f == phix);
  for (long k = 1; k <= 10; ++k) {
    auto lin = osgm::prox_linearized_grad(ref, x, GL, P);
    osgm::online_prox_grad_step(ref, x, GL, lin.grad, P, 1.0 / L,
                                CandidateSet());
    Vec xprop = x - P.apply(GL);
    double phiprop = ref.phi(xprop);
    if (phiprop <= phix) {
      x = xprop;
      phix = phiprop;
    }
    gx = ref.smooth.gradient(x);
    GL = osgm::gradient_map(ref, x, L, gx);
    CHECK(tr.rows[static_cast<size_t>(k)].f == phix);
  }

  CompositeObjective lasso = seeded_lasso(0.3);
  RunConfig solve;
  solve.x1 = Vec::Zero(5);
  solve.tol = 1e-2;
  solve.budget = 5000;
  solve.max_iters = 4000;
  RunTrace ts = osgm::run_prox_osgm(lasso.with_fresh_counters(), solve);
  CHECK(ts.status == "solved");
  CHECK(ts.final_gnorm_inf <= 1e-2);
  CHECK(ts.final_gnorm_inf == ts.rows.back().gnorm_inf);
  for (size_t k = 1; k < ts.rows.size(); ++k)
    CHECK(ts.rows[k].f <= ts.rows[k - 1].f + 1e-12);

  RunConfig scal;
  scal.pkind = StepKind::Scalar;
  CHECK_THROWS_AS(osgm::run_prox_osgm(lasso, scal),
                  osgm::UnsupportedParametrization);
  RunConfig full;
  full.pkind = StepKind::Full;
  CHECK_THROWS_AS(osgm::run_prox_osgm(lasso, full),
                  osgm::UnsupportedParametrization);
  RunConfig named;
  named.preset = "x";
  CHECK_THROWS_AS(osgm::run_prox_osgm(lasso, named), osgm::InvalidConfig);
}

TEST_CASE("rate certificates from a finished trace bound the realized gap") {
  osgm::QuadraticProblem qp = osgm::make_quadratic(6, 30.0, 13);
  Objective obj = qp.to_objective();
  RunConfig cfg = exact_run(Vec::Ones(6), 150);
  RunTrace tr = osgm::run_osgm_best(obj.with_fresh_counters(), cfg);
  osgm::BoundReport r = osgm::bound_report(obj, tr);

  CHECK(r.K == 150);
  CHECK(r.partial == false);
  CHECK(r.gap1 == tr.rows.front().f);
  CHECK(r.final_gap == tr.rows.back().f);
  CHECK(r.V == doctest::Approx(*obj.mu() / 8.0).epsilon(1e-12));
  CHECK(r.Delta ==
        doctest::Approx(std::sqrt(2.0 * r.gap1 / *obj.mu())).epsilon(1e-12));
  CHECK(r.sum_neg_progress >= 0.0);

  double minsq = kInf;
  for (long i = 0; i < r.K; ++i)
    minsq = std::min(minsq,
                     tr.rows[static_cast<size_t>(i)].gnorm_2 *
                         tr.rows[static_cast<size_t>(i)].gnorm_2);
  CHECK(r.min_gradnorm_sq == minsq);

  CHECK(r.final_gap <= r.hb_convex_bound * (1.0 + 1e-9));
  CHECK(r.final_gap <= r.hb_strongly_convex_bound * (1.0 + 1e-9));
  CHECK(r.final_gap <= r.linear_rate_envelope * (1.0 + 1e-9));
  CHECK(r.min_gradnorm_sq * r.sum_neg_progress <= r.gap1 * (1.0 + 1e-10));
  CHECK(r.nonconvex_envelope ==
        doctest::Approx(2.0 * obj.L() * r.gap1 / 150.0).epsilon(1e-15));

  Objective ros = osgm::make_rosenbrock(2);
  Vec x1(2);
  x1 << -0.5, 0.8;
  RunConfig ncfg = exact_run(x1, 50);
  RunTrace tn = osgm::run_osgm_h_nonconvex(ros, ncfg);
  osgm::BoundReport rn = osgm::bound_report(ros, tn);
  CHECK(rn.partial == true);
  CHECK(rn.V == ros.L() / 2.0);
  CHECK(rn.min_gradnorm_sq <= rn.nonconvex_envelope * (1.0 + 1e-10));

  // Without fstar only the trace-local certificates survive.
  osgm::Rng rng(8);
  Mat D(12, 4);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 4; ++j) D(i, j) = rng.normal();
  Vec labels(12);
  for (int i = 0; i < 12; ++i) labels(i) = rng.uniform() < 0.5 ? -1.0 : 1.0;
  Objective logi = osgm::make_logistic(D.sparseView(), labels, 0.1);
  RunConfig lcfg;
  lcfg.seed = 2;
  lcfg.budget = 60;
  RunTrace tl = osgm::run_osgm_h(logi, lcfg, Landscape::Monotone);
  osgm::BoundReport rl = osgm::bound_report(logi, tl);
  CHECK(std::isnan(rl.gap1));
  CHECK(std::isnan(rl.hb_convex_bound));
  CHECK(rl.partial == true);
  CHECK(rl.K == static_cast<long>(tl.rows.size()) - 1);
}

TEST_CASE("chained per step contraction composes into the overall rate") {
  osgm::QuadraticProblem qp = osgm::make_quadratic(4, 9.0, 3);
  Objective obj = qp.to_objective();
  RunConfig cfg = exact_run(Vec::Ones(4), 40);
  RunTrace tr = osgm::run_osgm_h(obj, cfg, Landscape::Monotone);
  double sum = 0;
  size_t last = 0;
  for (size_t k = 1; k < tr.rows.size(); ++k) {
    if (tr.rows[k].f < 1e-280 || tr.rows[k - 1].f < 1e-280) break;
    sum += std::log(tr.rows[k].f / tr.rows[k - 1].f);
    last = k;
  }
  REQUIRE(last == tr.rows.size() - 1);
  CHECK(std::abs(sum - std::log(tr.rows[last].f / tr.rows[0].f)) <= 1e-10);
}

TEST_CASE("trace serialization emits stable headers and quotes non finite") {
  Objective obj = quad_1d();
  RunConfig cfg;
  cfg.x1 = Vec::Ones(1);
  RunTrace tr = osgm::run_gd(obj, cfg);
  const std::string csv = tr.to_csv();
  const std::string header =
      "k,f,gnorm_inf,gnorm_2,potential,feedback,progress,step_summary,"
      "oracles\n";
  CHECK(csv.rfind(header, 0) == 0);
  CHECK(csv.find(",nan,") != std::string::npos);
  CHECK(tr.summary_json().find("\"status\":\"solved\"") != std::string::npos);

  RunTrace manual;
  manual.status = "budget";
  manual.iterations = 1;
  manual.grad_oracles = 2;
  manual.final_f = std::numeric_limits<double>::quiet_NaN();
  manual.final_gnorm_inf = 0.5;
  const std::string js = manual.summary_json();
  CHECK(js.find("\"final_f\":\"nan\"") != std::string::npos);
  CHECK(js.find("\"final_gnorm_inf\":0.5") != std::string::npos);
}

}  // TEST_SUITE
