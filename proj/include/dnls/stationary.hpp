#pragma once

#include <dnls/algebra.hpp>
#include <dnls/params.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dnls {

/// One positive even solution of the stationary problem at frequency lambda.
/// t = inf (BranchCoord::infinity()) marks the algebraically decaying lambda = 0 profile.
struct BranchPoint {
  Params params;
  BranchCoord t;
  double lambda;
  double a;
  double u0;

  bool lambda_zero() const { return t.is_infinite(); }
};

/// Fills a and u(0) for a branch coordinate at frequency lambda > 0. Does not
/// check the matching condition; see matching_residual.
BranchPoint make_branch_point(const Params& params, BranchCoord t, double lambda);

/// The lambda = 0 solution c_p (|x| + a)^(-2/(p-2)); present only for p < 6 off the diagonal.
std::optional<BranchPoint> lambda_zero_point(const Params& params);

struct StationaryOptions {
  double root_rel = 1e-12;
  /// roots closer than this in t are reported as one tangential root
  double tangency_t = 1e-9;
  /// |log g - log min f| below this is treated as tangency
  double tangency_log = 1e-12;
  double residual_rel = 1e-8;
  /// y = log(t - 1) search window
  double y_min = -700.0;
  double y_max = 700.0;
};

struct SolutionSet {
  std::vector<BranchPoint> points;  // ascending t
  double lambda = 0.0;
  std::size_t count() const { return points.size(); }
};

/// Critical point of f for q < p/2 + 1.
std::optional<double> f_minimizer(const Params& params);

/// Closed-form route g^-1(min f); none above the diagonal. Throws on it.
std::optional<double> lambda_bar(const Params& params);

/// Independent route: bisection in lambda on the number of roots of f = g
/// found by scanning (y grid plus refinement of sampled local minima).
double lambda_bar_by_root_count(const Params& params, double rel_tol = 1e-10);

/// Roots of f = g counted on a y = log(t - 1) grid, no closed-form knowledge used.
int count_roots_scan(const Params& params, double lambda, int points = 4000, double y_lo = -40,
                     double y_hi = 40);

struct DiagonalExistence {
  bool exists = false;
  std::optional<double> t;
};

DiagonalExistence diagonal_exists(const Params& params);

SolutionSet solve_for_lambda(const Params& params, double lambda,
                             const StationaryOptions& opt = {});

/// u(x), even in x.
double profile(const BranchPoint& point, double x);

/// u'(x) for x > 0; at x = 0 the right derivative u'(0+). Odd extension for x < 0.
double profile_derivative(const BranchPoint& point, double x);

/// |-2 u'(0+) - u0^(q-1)|, from the analytic derivative.
double vertex_residual(const BranchPoint& point);

/// vertex_residual / u0^(q-1)
double vertex_residual_rel(const BranchPoint& point);

/// |u'^2 - lambda u^2 - (2/p) u^p| / u'^2 at x != 0, evaluated after dividing by u^2.
double first_integral_residual(const BranchPoint& point, double x);

/// Relative residual of 2 sqrt(lambda) coth((p-2) sqrt(lambda) a / 2) = u0^(q-2),
/// or of the lambda = 0 analogue 2 m c_p a^(-m-1) = c_p^(q-1) a^(-m(q-1)).
double matching_residual(const BranchPoint& point);

/// Off the diagonal, |log f(t) - log g(lambda)|; 0 on the diagonal grid point.
double branch_equation_residual(const BranchPoint& point);

std::string describe(const BranchPoint& point);

}  // namespace dnls
