#pragma once

#include <dnls/energy_components.hpp>
#include <dnls/stationary.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace dnls {

/// u sampled at x_i = i L / n, i = 0..n, on the half-line; even extension implied.
struct GridProfile {
  double L = 1.0;
  int n = 2;
  std::vector<double> values;

  double h() const { return L / n; }
  double x(int i) const { return L * i / n; }
  double peak() const;
  /// u(L) <= tol * peak
  bool decayed(double tol = 1e-8) const;
};

/// max(50, 20/sqrt(lambda)) for lambda > 0, 1e3 for lambda = 0.
double default_domain_length(double lambda);

GridProfile materialize(const BranchPoint& point, double L, int n);
GridProfile materialize(const BranchPoint& point, int n = 200000);

/// Even Gaussian exp(-(x/width)^2) scaled to trapezoid mass mu, pinned to zero at L.
GridProfile gaussian_profile(double mu, double width, double L, int n);

/// Largest |a_i - b_i| over common nodes; the grids must coincide.
double sup_distance(const GridProfile& a, const GridProfile& b);
/// sup_x |u(x) - profile(point, x)| over the nodes of g.
double sup_distance(const GridProfile& g, const BranchPoint& point);

void write_csv(std::ostream& os, const GridProfile& g);
GridProfile read_csv(std::istream& is);

/// How a shooting trajectory ended.
enum class ShotOutcome {
  Decayed,     ///< reached the linear regime with a negligible growing mode
  SignChange,  ///< u crossed zero: initial height on the overshoot side
  TurnedBack,  ///< u' >= 0 while u > 0: undershoot, u grows from here on
  BlowUp,      ///< |u| > 1e3 u0
  NotDecayed,  ///< reached L without any of the above
};

const char* shot_outcome_name(ShotOutcome o);

struct ShootingOptions {
  int n = 20000;
  double rel_tol = 1e-12;
  /// switch to the exact linear tail once u <= tail_switch * u0
  double tail_switch = 1e-5;
  /// largest admissible |growing| / |decaying| mode ratio at the switch
  double growing_mode_tol = 1e-2;
  double decay_tol = 1e-7;
  double blowup_factor = 1e3;
};

struct ShootingResult {
  double u0 = 0.0;
  double lambda = 0.0;
  bool decay_ok = false;
  double mass = 0.0;
  GridProfile profile;

  ShotOutcome outcome = ShotOutcome::NotDecayed;
  /// x where the trajectory stopped (or where the linear tail took over)
  double x_stop = 0.0;
  double growing_mode_ratio = 0.0;
  /// max |C(x) - C(0)| / (u'(0)^2 + lambda u0^2 + (2/p) u0^p) over integrated steps,
  /// C = u'^2 - lambda u^2 - (2/p) u^p
  double first_integral_drift = 0.0;
  /// +1 if the height is above the decaying one, -1 below, from the outcome
  int side = 0;
};

/// Integrates u'' = lambda u + u^(p-1) outward from (u0, -u0^(q-1)/2) with an
/// adaptive Runge-Kutta-Fehlberg 7(8) stepper. For lambda > 0 the decaying
/// linear mode u ~ exp(-sqrt(lambda) x) replaces the integration once u is
/// small, so the result on long domains is not swamped by the growing mode.
ShootingResult shoot(const Params& params, double lambda, double u0, double L,
                     const ShootingOptions& opt = {});

/// Bisection in u0 on the overshoot/undershoot dichotomy; [lo, hi] must
/// straddle it. Returns the final shot at the midpoint.
ShootingResult bisect_shoot(const Params& params, double lambda, double lo, double hi, double L,
                            const ShootingOptions& opt = {}, double rel_tol = 1e-14);

struct FunctionalValues {
  double mass = 0.0;
  EnergyBreakdown energy;
};

/// Trapezoid mass and energy with centered differences (one-sided second
/// order at the ends) for u'.
FunctionalValues functional_eval(const Params& params, const GridProfile& g);

/// Grid functional minimized by the flow: forward differences for the
/// kinetic term, trapezoid weights for the bulk and the mass, the point term
/// at node 0 only.
double discrete_energy(const Params& params, const GridProfile& g);
double discrete_mass(const GridProfile& g);
/// Euclidean gradient of discrete_energy with respect to the nodal values.
std::vector<double> discrete_gradient(const Params& params, const GridProfile& g);

struct MinimizeOptions {
  int max_iters = 20000;
  double stall_rel = 1e-10;
  int stall_window = 5;
  bool probe = false;
  double probe_floor = -1e6;
  double armijo = 1e-4;
};

struct MinimizeResult {
  GridProfile profile;
  std::vector<double> energy_trace;
  int iterations = 0;
  bool converged = false;
  bool probe_triggered = false;
  bool failed = false;
  double max_mass_drift = 0.0;
  std::string status;
};

/// Mass-constrained descent on discrete_energy from profile0, which is first
/// rescaled to mass mu. Sobolev-preconditioned gradient, tangent projection,
/// renormalization after every step, Armijo halving; the node at L stays 0.
MinimizeResult constrained_minimize(const Params& params, double mu, const GridProfile& profile0,
                                    const MinimizeOptions& opt = {});

/// u = c on [0, k^2], linear down to 0 on [k^2, k^2 + 1], with c fixing mass mu.
GridProfile tent_profile(double mu, double k, double L, int n);
double tent_height(double mu, double k);

}  // namespace dnls
