#pragma once

#include <dnls/energy_components.hpp>
#include <dnls/massmap.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dnls {

enum class EnergyFlag { Attained, NotAttained, MinusInfinity, Unknown };

const char* energy_flag_name(EnergyFlag f);

/// Branch ids used in energy samples.
inline constexpr int kVanishingBranch = -1;
/// The lambda = 0 solution at mass mu0, competing on the plateau mu > mu0.
inline constexpr int kPlateauBranch = 100;

struct EnergyCandidate {
  int branch_id;
  double energy;
  double lambda;
  double t;  // +inf for lambda = 0
};

struct EnergySample {
  double mu = 0.0;
  std::optional<double> E;
  std::optional<double> lambda;
  int branch_id = kVanishingBranch;
  EnergyFlag flag = EnergyFlag::Unknown;
  std::vector<EnergyCandidate> candidates;
};

struct EnergyCurve {
  Params params;
  std::vector<EnergySample> samples;
};

/// E(mu) from branch enumeration plus the vanishing value 0.
EnergySample energy_at(const MassMap& map, double mu);
EnergySample energy_at(const Params& params, double mu);

EnergyCurve energy_curve(const Params& params, const std::vector<double>& mu_grid, int jobs = 1);

/// Whether the ground-state level is -inf for every mass (D, E); G is -inf only above 2.
bool energy_unbounded_everywhere(const Params& params);

/// Plain statement of why an energy curve is refused, or empty if it is not.
std::string energy_refusal_reason(const Params& params);

/// |dE/dmu + lambda(mu)/2| with dE/dmu from Richardson-refined central
/// differences at steps `step` and `step`/2.
double multiplier_consistency(const Params& params, double mu, double step);

/// inf { mu(t) : branch energy at t <= 0 } for regions C, F, H.
std::optional<double> mu_tilde(const Params& params);

struct ProbeResult {
  double infimum = 0.0;
  bool below_floor = false;  // descended past -probe_floor
  std::optional<double> lower_bound;
  std::string family;
};

inline constexpr double kProbeFloor = 1e6;

/// Scans closed-form trial families: delta e^(-delta^2 |x|) rescaled to mass mu' <= mu
/// for q != 4, and sigma^(1/2) c e^(-b sigma |x|) at mass mu for q = 4.
ProbeResult unboundedness_probe(const Params& params, double mu);

/// Analytic lower bounds on E(mu) when q < 4 or q < p/2 + 1; none otherwise.
std::optional<double> energy_lower_bound(const Params& params, double mu);

struct ConvexityReport {
  bool resolved = false;
  int sign_changes = 0;
  std::optional<double> mu_bar;      // second-difference crossing
  std::optional<double> mu_lambda_max;  // grid argmax of lambda(mu)
  std::string note;
};

/// Locates the concave-to-convex switch of E on an increasing mass grid.
ConvexityReport convexity_scan(const Params& params, const std::vector<double>& mu_grid, int jobs = 1);

}  // namespace dnls
