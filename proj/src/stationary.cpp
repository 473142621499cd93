#include <dnls/stationary.hpp>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dnls {

namespace {

double log_sinh(double x) {
  if (x < 20.0) return std::log(std::sinh(x));
  return x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x));
}

double coth(double x) {
  if (x > 20.0) return 1.0 + 2.0 * std::exp(-2.0 * x) / (1.0 - std::exp(-2.0 * x));
  return 1.0 / std::tanh(x);
}

double bulk_exponent_m(const Params& params) { return 2.0 / (params.p() - 2.0); }

// phi(y) = log f(1 + e^y) - log g(lambda)
struct BranchEquation {
  const Params& params;
  double log_g;
  double operator()(double y) const {
    return log_f_of_t(params, BranchCoord::from_log_excess(y)) - log_g;
  }
  // d phi / d y = s f'(t) / f(t)
  double derivative(double y) const {
    const BranchCoord t = BranchCoord::from_log_excess(y);
    const double p = params.p(), q = params.q();
    const double tt = t.t();
    const double num = (p + 2.0 - 2.0 * q) / (p - 2.0) * tt * tt - 1.0;
    return t.excess() * num / (tt * t.t2m1());
  }
};

double bracket_root(const BranchEquation& phi, double lo, double hi, double root_rel) {
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(phi, lo, hi, tol, iters);
  double y = 0.5 * (r.first + r.second);
  // safeguarded Newton polish inside the final bracket
  for (int k = 0; k < 3; ++k) {
    const double v = phi(y);
    const double d = phi.derivative(y);
    if (v == 0.0 || d == 0.0 || !std::isfinite(d)) break;
    const double next = y - v / d;
    if (!(next >= r.first && next <= r.second)) break;
    if (std::fabs(phi(next)) >= std::fabs(v)) break;
    y = next;
    if (std::fabs(v / d) <= root_rel * 1e-3) break;
  }
  return y;
}

double t_from_y(double y) { return 1.0 + std::exp(y); }

}  // namespace

BranchPoint make_branch_point(const Params& params, BranchCoord t, double lambda) {
  if (t.is_infinite()) throw std::domain_error("use lambda_zero_point for t = inf");
  if (!(lambda > 0.0)) throw std::domain_error("branch point requires lambda > 0");
  const double p = params.p();
  const double a = 2.0 / ((p - 2.0) * std::sqrt(lambda)) * t.acoth();
  const double u0 = std::exp((std::log(p * lambda / 2.0) + t.log_t2m1()) / (p - 2.0));
  return BranchPoint{params, t, lambda, a, u0};
}

std::optional<BranchPoint> lambda_zero_point(const Params& params) {
  const double p = params.p(), q = params.q();
  if (!(p < 6.0) || params.diagonal()) return std::nullopt;
  const double cp = c_p(p);
  const double a = std::pow((p - 2.0) * std::pow(cp, q - 2.0) / 4.0, (p - 2.0) / (2.0 * q - p - 2.0));
  const double u0 = cp * std::pow(a, -bulk_exponent_m(params));
  return BranchPoint{params, BranchCoord::infinity(), 0.0, a, u0};
}

std::optional<double> f_minimizer(const Params& params) {
  if (params.side() >= 0) return std::nullopt;
  const double p = params.p(), q = params.q();
  return std::sqrt((p - 2.0) / (p + 2.0 - 2.0 * q));
}

std::optional<double> lambda_bar(const Params& params) {
  if (params.diagonal()) throw std::domain_error("lambda_bar is undefined on the diagonal; use diagonal_exists");
  const auto ts = f_minimizer(params);
  if (!ts) return std::nullopt;
  return MatchingRhs(params).inverse_log(log_f_of_t(params, BranchCoord::from_t(*ts)));
}

int count_roots_scan(const Params& params, double lambda, int points, double y_lo, double y_hi) {
  if (params.diagonal()) throw std::domain_error("root scan needs an off-diagonal pair");
  const BranchEquation phi{params, MatchingRhs(params).log_value(lambda)};
  std::vector<double> ys(points), vs(points);
  for (int i = 0; i < points; ++i) {
    ys[i] = y_lo + (y_hi - y_lo) * i / (points - 1);
    vs[i] = phi(ys[i]);
  }
  int roots = 0;
  for (int i = 1; i < points; ++i) {
    if ((vs[i - 1] > 0) != (vs[i] > 0)) ++roots;
  }
  // a pair of roots may hide between two samples near a sampled minimum
  for (int i = 1; i + 1 < points; ++i) {
    if (vs[i] > 0 && vs[i] <= vs[i - 1] && vs[i] <= vs[i + 1]) {
      const auto m = boost::math::tools::brent_find_minima(phi, ys[i - 1], ys[i + 1], 52);
      if (m.second < 0 && vs[i - 1] > 0 && vs[i + 1] > 0) roots += 2;
    }
  }
  return roots;
}

double lambda_bar_by_root_count(const Params& params, double rel_tol) {
  if (params.side() >= 0) throw std::domain_error("root-count threshold exists only below the diagonal");
  double lo = 1.0, hi = 1.0;
  while (count_roots_scan(params, lo) < 2) lo *= 0.25;
  hi = lo;
  while (count_roots_scan(params, hi) >= 1) hi *= 4.0;
  while (hi - lo > rel_tol * hi) {
    const double mid = std::sqrt(lo * hi);
    if (count_roots_scan(params, mid) >= 1) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi);
}

DiagonalExistence diagonal_exists(const Params& params) {
  if (!params.diagonal()) throw std::domain_error("diagonal_exists requires q = p/2 + 1");
  const double p = params.p();
  if (!(p > 8.0)) return {false, std::nullopt};
  return {true, std::sqrt(p / (p - 8.0))};
}

SolutionSet solve_for_lambda(const Params& params, double lambda, const StationaryOptions& opt) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and non-negative");
  }
  SolutionSet out;
  out.lambda = lambda;
  if (lambda == 0.0) {
    if (auto z = lambda_zero_point(params)) out.points.push_back(*z);
    return out;
  }
  if (params.diagonal()) {
    const auto d = diagonal_exists(params);
    if (d.exists) out.points.push_back(make_branch_point(params, BranchCoord::from_t(*d.t), lambda));
    return out;
  }
  const BranchEquation phi{params, MatchingRhs(params).log_value(lambda)};
  auto point_at = [&](double y) {
    return make_branch_point(params, BranchCoord::from_log_excess(y), lambda);
  };
  if (params.side() > 0) {
    // f decreases from +inf to 0
    if (phi(opt.y_min) < 0 || phi(opt.y_max) > 0) return out;
    out.points.push_back(point_at(bracket_root(phi, opt.y_min, opt.y_max, opt.root_rel)));
    return out;
  }
  const double ts = *f_minimizer(params);
  const BranchCoord tsc = BranchCoord::from_t(ts);
  const double ys = std::log(tsc.excess());
  const double gap = phi(ys);
  if (gap > opt.tangency_log) return out;
  if (gap >= -opt.tangency_log) {
    out.points.push_back(make_branch_point(params, tsc, lambda));
    return out;
  }
  if (phi(opt.y_min) < 0 || phi(opt.y_max) < 0) {
    throw std::runtime_error("branch roots fall outside the search window for lambda");
  }
  const double y1 = bracket_root(phi, opt.y_min, ys, opt.root_rel);
  const double y2 = bracket_root(phi, ys, opt.y_max, opt.root_rel);
  if (t_from_y(y2) - t_from_y(y1) <= opt.tangency_t) {
    out.points.push_back(make_branch_point(params, tsc, lambda));
    return out;
  }
  out.points.push_back(point_at(y1));
  out.points.push_back(point_at(y2));
  return out;
}

namespace {

double log_profile(const BranchPoint& point, double x) {
  const double p = point.params.p();
  const double r = std::fabs(x) + point.a;
  if (point.lambda_zero()) {
    return std::log(c_p(p)) - bulk_exponent_m(point.params) * std::log(r);
  }
  const double z = 0.5 * (p - 2.0) * std::sqrt(point.lambda) * r;
  return (std::log(p * point.lambda / 2.0) - 2.0 * log_sinh(z)) / (p - 2.0);
}

// u'(x) / u(x) for x > 0
double log_slope(const BranchPoint& point, double x) {
  const double p = point.params.p();
  const double r = std::fabs(x) + point.a;
  if (point.lambda_zero()) return -bulk_exponent_m(point.params) / r;
  const double sl = std::sqrt(point.lambda);
  return -sl * coth(0.5 * (p - 2.0) * sl * r);
}

}  // namespace

double profile(const BranchPoint& point, double x) { return std::exp(log_profile(point, x)); }

double profile_derivative(const BranchPoint& point, double x) {
  const double sign = x < 0 ? -1.0 : 1.0;
  return sign * log_slope(point, x) * profile(point, x);
}

double vertex_residual(const BranchPoint& point) {
  const double q = point.params.q();
  return std::fabs(-2.0 * profile_derivative(point, 0.0) - std::pow(profile(point, 0.0), q - 1.0));
}

double vertex_residual_rel(const BranchPoint& point) {
  return vertex_residual(point) / std::pow(point.u0, point.params.q() - 1.0);
}

double first_integral_residual(const BranchPoint& point, double x) {
  // divided through by u^2 so that deep tails do not underflow
  const double p = point.params.p();
  const double r = log_slope(point, x);
  const double up = std::exp((p - 2.0) * log_profile(point, x));
  return std::fabs(r * r - point.lambda - 2.0 / p * up) / (r * r);
}

double matching_residual(const BranchPoint& point) {
  const double p = point.params.p(), q = point.params.q();
  if (point.lambda_zero()) {
    const double m = bulk_exponent_m(point.params);
    const double cp = c_p(p);
    const double lhs = 2.0 * m * cp * std::pow(point.a, -m - 1.0);
    const double rhs = std::pow(cp, q - 1.0) * std::pow(point.a, -m * (q - 1.0));
    return std::fabs(lhs - rhs) / rhs;
  }
  const double sl = std::sqrt(point.lambda);
  const double lhs = 2.0 * sl * coth(0.5 * (p - 2.0) * sl * point.a);
  const double rhs = std::pow(point.u0, q - 2.0);
  return std::fabs(lhs - rhs) / rhs;
}

double branch_equation_residual(const BranchPoint& point) {
  if (point.lambda_zero() || point.params.diagonal()) return 0.0;
  return std::fabs(log_f_of_t(point.params, point.t) - MatchingRhs(point.params).log_value(point.lambda));
}

std::string describe(const BranchPoint& point) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s t=%.17g lambda=%.17g a=%.17g u0=%.17g",
                point.params.to_string().c_str(), point.t.t(), point.lambda, point.a, point.u0);
  return buf;
}

}  // namespace dnls
