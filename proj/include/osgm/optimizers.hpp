#pragma once

#include <limits>
#include <vector>

#include "osgm/learners.hpp"

namespace osgm {

// What the scheduler's proposal is allowed to become.
enum class Landscape { Vanilla, Monotone, MonotoneLookahead };

// Per-iteration callback payload. Pointers are only valid for the duration
// of the callback. x is the current iterate (z1 for heavy-ball runs) and
// x_prev the trailing heavy-ball point.
struct IterObs {
  long k = 0;
  const Vec* x = nullptr;
  const Vec* x_prev = nullptr;
  double f = std::numeric_limits<double>::quiet_NaN();
  const Vec* g = nullptr;
  const Stepsize* P = nullptr;
  double beta = std::numeric_limits<double>::quiet_NaN();
  double feedback = std::numeric_limits<double>::quiet_NaN();
  double progress = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double potential = std::numeric_limits<double>::quiet_NaN();
};

struct RunConfig {
  Vec x1;  // empty: unit-norm standard normal from seed
  unsigned long long seed = 0;
  double tol = 1e-3;  // sup-norm gradient target; <= 0 disables
  long budget = 1000;  // gradient oracles; <= 0 disables
  long max_iters = 0;  // 0: unlimited

  StepKind pkind = StepKind::Diagonal;
  double p1_scale = std::numeric_limits<double>::quiet_NaN();
  double beta1 = std::numeric_limits<double>::quiet_NaN();
  std::string preset;  // algorithm-specific named stepsizes
  double eta_P = std::numeric_limits<double>::quiet_NaN();
  double eta_beta = std::numeric_limits<double>::quiet_NaN();
  double eta = std::numeric_limits<double>::quiet_NaN();
  double omega_mult = 3.0;
  double tau_mult = 16.0;
  bool setP_given = false;
  CandidateSet setP;
  bool setB_given = false;
  Interval setB;

  double lr = std::numeric_limits<double>::quiet_NaN();  // baselines; 1/L
  double momentum = 0.9;                                 // gd_hb
  double prox_eta = std::numeric_limits<double>::quiet_NaN();  // osgm_bb

  std::function<void(const IterObs&)> observer;
  bool record_trace = true;
};

struct TraceRow {
  long k = 0;
  double f = 0;
  double gnorm_inf = 0;
  double gnorm_2 = 0;
  double potential = std::numeric_limits<double>::quiet_NaN();
  double feedback = std::numeric_limits<double>::quiet_NaN();
  double progress = std::numeric_limits<double>::quiet_NaN();
  std::string step_summary;
  long oracles = 0;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  std::string status;  // solved | budget | iterations | stationary
  long iterations = 0;
  long grad_oracles = 0;
  double final_f = std::numeric_limits<double>::quiet_NaN();
  double final_gnorm_inf = std::numeric_limits<double>::quiet_NaN();

  std::string to_csv() const;
  // Flat JSON object: status, iterations, oracles, final f, final gnorm_inf.
  std::string summary_json() const;
};

// Baselines. lr defaults to 1/L.
RunTrace run_gd(const Objective& obj, const RunConfig& cfg);
RunTrace run_gd_hb(const Objective& obj, const RunConfig& cfg);
RunTrace run_agd_cvx(const Objective& obj, const RunConfig& cfg);
RunTrace run_agd_scvx(const Objective& obj, const RunConfig& cfg);
RunTrace run_adam(const Objective& obj, const RunConfig& cfg);
RunTrace run_adagrad(const Objective& obj, const RunConfig& cfg);

// Prescient single-point method: the preconditioner is updated first and
// the fresh preconditioner takes the step. Two fresh gradients per
// iteration. Scalar parametrization and alpha1 = 0 by default.
RunTrace run_classic_hdm(const Objective& obj, const RunConfig& cfg);

// Online scaled gradient method on the single-point feedback. The proposal
// is taken as-is (Vanilla), guarded against ascent (Monotone), or guarded
// after an extra 1/L lookahead step (MonotoneLookahead).
RunTrace run_osgm_h(const Objective& obj, const RunConfig& cfg,
                    Landscape landscape = Landscape::Vanilla);

// Nonconvex-safe variant: monotone lookahead plus per-iteration convexity
// repair with lambda from weak_convexity_bound over a bounded candidate
// box (default entries in [-10/L, 10/L]). eta defaults to 1/(2L); preset
// "thm-statement" selects 1/(4L).
RunTrace run_osgm_h_nonconvex(const Objective& obj, const RunConfig& cfg);

// Heavy-ball online method with lookahead and null steps; online gradient
// descent on (P, beta). Default eta_P = 1/(2L), eta_beta = L^2 eta_P
// (preset "thm-main"); preset "thm-appendix" selects eta_P = 1/(4L).
// P1 = (1/(4L)) I, beta1 = 1/2.
RunTrace run_osgm_best(const Objective& obj, const RunConfig& cfg);

// Monotone heavy-ball variant driven by AdaGrad on a bounded box; one fresh
// gradient per iteration. eta_P = eta_beta = 1/L by default.
RunTrace run_osgm_hb_adagrad(const Objective& obj, const RunConfig& cfg);

// Scalar stepsize learned by online proximal point steps, with monotone
// lookahead. prox_eta = +inf recovers curvature-ratio steps on quadratics.
RunTrace run_osgm_bb(const Objective& obj, const RunConfig& cfg);

/// Composite prox variant (diagonal parametrization): prescient prox-gradient
// learner on the partially linearized feedback, null steps on the composite
// value. Stops on the sup norm of the gradient mapping.
RunTrace run_prox_osgm(const CompositeObjective& comp, const RunConfig& cfg);

// Momentum potential f(z) - fstar + ||grad f(x)||^2 / (2 mu) for the
// strongly convex accelerated method; requires fstar and mu.
double agd_quadratic_potential(const Objective& obj, const Vec& x,
                               const Vec& z);

/// One-step contraction factor of that potential on quadratics:
//   (k-1)^2 / (k (sqrt(k)+1)^2) * (1 + 1/(2k) + sqrt(4k+1)/(2k)).
double agd_contraction_factor(double kappa);

// Rate certificates evaluated from a finished run's trace.  Envelopes are
// upper bounds the corresponding theory guarantees for the final gap (or the
// best squared gradient norm); NaN marks a certificate the problem metadata
// cannot support (no fstar, no mu, ...).
struct BoundReport {
  long K = 0;                  // iterations covered by the certificates
  double gap1 = nan_value();   // f(z^1) - fstar
  double final_gap = nan_value();
  double sum_neg_progress = 0;  // sum over the trace of -b_k
  // V = min{ (f(z^1)-fstar)/(4 Delta^2), L/2 } with Delta the level-set
  // radius.  Delta is exact for strongly convex quadratics; otherwise only
  // the L/2 branch is available and the certificate is marked partial.
  double V = nan_value();
  double Delta = nan_value();
  bool partial = true;
  double hb_convex_bound = nan_value();     // gap1 / (1 + V sum(-b_k))
  double hb_strongly_convex_bound = nan_value();
  double linear_rate_envelope = nan_value();  // gap1 (1 - 1/(8 kappa))^K
  double nonconvex_envelope = nan_value();    // 2 L gap1 / K
  double min_gradnorm_sq = nan_value();       // observed over the trace

  static double nan_value() {
    return std::numeric_limits<double>::quiet_NaN();
  }
};

// Builds the report from a heavy-ball-style trace whose progress column
// holds b_k. gap1 uses the first row's potential when present (heavy-ball
// runs), else its f column.
BoundReport bound_report(const Objective& obj, const RunTrace& trace);

}  // namespace osgm
