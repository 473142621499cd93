#pragma once

#include <dnls/algebra.hpp>
#include <dnls/energy_components.hpp>
#include <dnls/params.hpp>
#include <dnls/stationary.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dnls {

/// mu(t) = C_pq f(t)^((6-p)/(2q-p-2)) I(t); t = inf gives mu0 (p < 6 only).
ScalarEval mass_of_t(const Params& params, BranchCoord t, const QuadOptions& opt = {});
ScalarEval mass_of_t(const Params& params, double t, const QuadOptions& opt = {});
double log_mass_of_t(const Params& params, BranchCoord t, const QuadOptions& opt = {});

/// Mass of a branch solution from its own (lambda, t) scaling,
/// 4 (p lambda / 2)^(2/(p-2)) I(t) / ((p-2) sqrt(lambda)); independent of C_pq.
double mass_of_point(const BranchPoint& point, const QuadOptions& opt = {});

/// 2 int_0^inf u^2 by adaptive quadrature of the materialized profile.
double profile_mass_quadrature(const BranchPoint& point);

/// Diagonal (p > 8) mass M lambda^((6-p)/(2(p-2))).
ScalarEval mass_of_lambda_diagonal(const Params& params, double lambda);
ScalarEval diagonal_mass_constant(const Params& params);

struct MassAsymptotics {
  /// mu ~ t1_coefficient (t - 1)^t1_exponent as t -> 1+
  double t1_exponent = 0.0;
  double t1_coefficient = 0.0;
  double t1_limit = 0.0;  // 0, the coefficient, or +inf

  enum class Tail { Plateau, Logarithmic, Power };
  Tail tail = Tail::Plateau;
  /// mu0 for the plateau, +inf otherwise
  double tinf_limit = 0.0;
  /// exponent of t (Power) or of log t (Logarithmic)
  double tinf_exponent = 0.0;
  /// C_{6,q} for p = 6; fitted intercept exp(b) of log mu = r log t + b for p > 6
  std::optional<double> tinf_coefficient;
  std::optional<double> tinf_fitted_slope;
};

MassAsymptotics asymptotics(const Params& params);

/// Polynomial extrapolation to t = 1 of mu(t) / (t - 1)^t1_exponent along
/// t - 1 = s0 2^-j; approaches t1_coefficient.
double extrapolate_t1_prefactor(const Params& params, double s0 = 1e-2, int levels = 8);

struct MassSample {
  double y;  // log(t - 1)
  double t;
  double mu;
  double mu_err;
  int h_sign;
};

struct MassExtremum {
  double t;
  double mu;
  bool minimum;
};

struct MassCurve {
  Params params;
  std::vector<MassSample> samples;
  double limit_t1 = 0.0;
  double limit_tinf = 0.0;
  std::vector<MassExtremum> extrema;

  bool strictly_increasing() const;
};

struct MassMapOptions {
  int scan_points = 2048;
  double y_lo = -30.0;
  double y_hi = 30.0;
  double y_min = -700.0;
  double y_max = 700.0;
  double plateau_rel = 1e-12;
  double tangency_rel = 1e-12;
  double mass_gate_rel = 1e-6;
};

MassCurve mass_curve(const Params& params, double y_lo, double y_hi, int points);

struct NormalizedSolution {
  BranchPoint point;
  double mass;
  double energy;
  /// |profile quadrature mass - mass| / mass
  double mass_gate_residual;
};

/// Mass minimum for non-monotone maps (C, F): t from the h root, mu there.
struct MassMinimum {
  double t;
  double mu;
  double t_direct;
  double mu_direct;
};
MassMinimum mass_minimum(const Params& params);

/// Mass map of one exponent pair. The scan used by non-monotone regimes is
/// computed once at construction; afterwards the object is immutable.
class MassMap {
 public:
  explicit MassMap(const Params& params, const MassMapOptions& opt = {});

  const Params& params() const { return params_; }
  /// Branch coordinates with mu(t) = mu, ascending (t = inf last). Off-diagonal only.
  std::vector<BranchCoord> branch_roots(double mu) const;
  std::vector<NormalizedSolution> solutions(double mu) const;

 private:
  Params params_;
  MassMapOptions opt_;
  std::optional<MassMinimum> minimum_;
  std::vector<double> scan_y_;
  std::vector<double> scan_log_mu_;
};

/// Every branch solution with L^2 mass mu, ascending t (t = inf last).
std::vector<NormalizedSolution> normalized_solutions(const Params& params, double mu,
                                                     const MassMapOptions& opt = {});

/// Branch point at coordinate t with lambda = g^-1(f(t)).
BranchPoint branch_point_at(const Params& params, BranchCoord t);

enum class ThresholdSource { None, ClosedForm, Minimized, Constant };

const char* threshold_source_name(ThresholdSource s);

struct ThresholdReport {
  Region region;
  ExistenceRule rule;
  ThresholdSource source = ThresholdSource::None;
  /// right endpoint of G's window, left endpoint of A/E/C/F intervals
  std::optional<double> mu_pq;
  /// the fixed lower endpoint 2 for G and H
  std::optional<double> mu_lower;
  /// interior minimizer of mu(t) in C and F, from the root of h
  std::optional<double> t_min;
  std::optional<double> mu_min_h_root;
  std::optional<double> mu_min_direct;
  std::optional<double> certification_gap;
};

ThresholdReport mass_threshold(const Params& params);


}  // namespace dnls
