#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "osgm/optimizers.hpp"
#include "osgm/types.hpp"

namespace osgm {

// State of the scale-free recursion a scalar-stepsize learner induces on a
// diagonal quadratic: the stepsize alpha and the unit direction zhat.
struct DynState {
  double alpha = 0.0;
  Vec zhat;
};

// alpha + eta - alpha * eta * <z, Lam^3 z> / <z, Lam^2 z>.
// The quadratic-form ratio is scale-invariant in zhat.
double alpha_plus(const DynState& s, const Vec& lambda, double eta);

// One step of either map.  The prescient map scales the direction by
// (I - alpha_plus * Lam), the hindsight map by (I - alpha * Lam); both
// renormalize the output direction.
DynState step_hdm(const DynState& s, const Vec& lambda, double eta);
DynState step_osgm(const DynState& s, const Vec& lambda, double eta);

using DynMap = std::function<DynState(const DynState&, const Vec&, double)>;

// Equally spaced eigenvalues from L down to mu, consecutive gap >= 1e-8.
Vec dynamics_spectrum(double L, double mu, int n);

// The period-2 orbit shared by both maps: alpha* = 2/(L+mu), directions
// +-gamma e_1 + delta e_n with gamma = mu/sqrt(L^2+mu^2) and
// delta = delta_sign * L/sqrt(L^2+mu^2).
std::pair<DynState, DynState> two_point_orbit(double L, double mu, int n,
                                              int delta_sign = 1);

// Central-difference Jacobian of the map on the ambient (alpha, z) chart,
// (n+1) x (n+1).  The map's internal renormalization is part of the
// differentiated function, so the radial direction contributes a zero mode.
Mat numeric_jacobian(const DynMap& map, const DynState& s, const Vec& lambda,
                     double eta);

// Eigenvalue moduli (descending) of J(s2) J(s1) over the period-2 orbit with
// spectrum dynamics_spectrum(L, mu, n) and eta = 1/L.  map_kind is "hdm" or
// "osgm".
Vec orbit_product_spectrum(const std::string& map_kind, double L, double mu,
                           int n);
double orbit_spectral_radius(const std::string& map_kind, double L, double mu,
                             int n);

// (3 kappa + 1) / (2 kappa): product spectral radius of the hindsight map.
double osgm_radius_closed_form(double kappa);

struct SweepRow {
  std::string kind;
  double kappa = 0.0;
  double rho_numeric = 0.0;
  double rho_closed_form = 0.0;  // NaN for the prescient map
  double abs_err = 0.0;          // NaN when there is no closed form
};

std::vector<SweepRow> radius_sweep(const std::vector<double>& kappas,
                                   int n = 2);
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct SpikeResult {
  bool found = false;
  double delta = 0.0;
  Vec x1;
  long spike_iter = -1;    // first trace row whose f exceeds f(x^1)
  double max_ratio = 0.0;  // max over the trace of f(x^k)/f(x^1)
  RunTrace trace;          // vanilla hypergradient run started at (1, delta)
};

// Searches delta in [1e-300, 1e-2] for a start (1, delta) whose vanilla
// scalar hypergradient run on f(x) = x_1^2/2 + kappa x_2^2/2, started at
// alpha_1 = 0, first exceeds f(x^1) as close to iteration target_K as the
// recursion allows.  found=false means no probed delta spiked; callers
// report that outcome, it is not fatal.
SpikeResult spike_scenario(double kappa, double eta, long target_K);

}  // namespace osgm
