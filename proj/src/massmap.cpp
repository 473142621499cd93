#include <dnls/massmap.hpp>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dnls {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mass_exponent_alpha(const Params& params) {
  return (6.0 - params.p()) / (2.0 * params.q() - params.p() - 2.0);
}

double bulk_m(const Params& params) { return 2.0 / (params.p() - 2.0); }

template <class F>
double solve_in_y(const F& fn, double lo, double hi) {
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(fn, lo, hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

double mass_at_y(const Params& params, double y) {
  return std::exp(log_mass_of_t(params, BranchCoord::from_log_excess(y)));
}

int h_sign(const Params& params, BranchCoord t) {
  const ScalarEval h = h_of_t(params, t);
  if (std::fabs(h.value) <= 4.0 * h.abs_error_estimate) return 0;
  return h.value > 0 ? 1 : -1;
}

}  // namespace

double log_mass_of_t(const Params& params, BranchCoord t, const QuadOptions& opt) {
  if (params.diagonal()) throw std::domain_error("mu(t) is undefined on the diagonal; use mass_of_lambda_diagonal");
  if (t.is_infinite()) {
    const auto m0 = mu0(params);
    if (!m0) throw std::domain_error("mu(t) diverges as t -> inf for p >= 6");
    return std::log(*m0);
  }
  return log_C_pq(params) + mass_exponent_alpha(params) * log_f_of_t(params, t) +
         log_I_of_t(params, t, opt).log_value;
}

ScalarEval mass_of_t(const Params& params, BranchCoord t, const QuadOptions& opt) {
  if (params.diagonal()) throw std::domain_error("mu(t) is undefined on the diagonal; use mass_of_lambda_diagonal");
  if (t.is_infinite()) return {std::exp(log_mass_of_t(params, t, opt)), 0.0};
  const LogEval li = log_I_of_t(params, t, opt);
  const double v = std::exp(log_C_pq(params) + mass_exponent_alpha(params) * log_f_of_t(params, t) +
                            li.log_value);
  return {v, v * li.rel_error};
}

ScalarEval mass_of_t(const Params& params, double t, const QuadOptions& opt) {
  return mass_of_t(params, BranchCoord::from_t(t), opt);
}

double mass_of_point(const BranchPoint& point, const QuadOptions& opt) {
  const Params& pq = point.params;
  const double p = pq.p(), m = bulk_m(pq);
  if (point.lambda_zero()) {
    const double cp = c_p(p);
    return 2.0 * cp * cp * std::pow(point.a, 1.0 - 2.0 * m) / (2.0 * m - 1.0);
  }
  const double lam = point.lambda;
  return std::exp(std::log(4.0) + m * std::log(p * lam / 2.0) - std::log(p - 2.0) - 0.5 * std::log(lam) +
                  log_I_of_t(pq, point.t, opt).log_value);
}

double profile_mass_quadrature(const BranchPoint& point) {
  QuadOptions opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = 1e-11;
  opt.max_panels = 20000;
  if (point.lambda_zero()) {
    // x + a = a w^-k with k = 1/(2m - 1) makes the algebraic tail integrand flat in w
    const double a = point.a;
    const double k = 1.0 / (2.0 * bulk_m(point.params) - 1.0);
    auto integrand = [&](double w) {
      const double x = a * (std::pow(w, -k) - 1.0);
      const double u = profile(point, x);
      return u * u * a * k * std::pow(w, -k - 1.0);
    };
    return 2.0 * integrate(integrand, 0.0, 1.0, opt).value;
  }
  const double X = 45.0 / std::sqrt(point.lambda);
  auto integrand = [&](double x) {
    const double u = profile(point, x);
    return u * u;
  };
  const double split = std::min(point.a, X);
  return 2.0 * (integrate(integrand, 0.0, split, opt).value + integrate(integrand, split, X, opt).value);
}

ScalarEval diagonal_mass_constant(const Params& params) {
  const auto d = diagonal_exists(params);
  if (!d.exists) throw std::domain_error("diagonal mass requires p > 8");
  const double p = params.p(), m = bulk_m(params);
  const ScalarEval I = I_of_t(params, *d.t);
  const double pref = 4.0 * std::pow(p / 2.0, m) / (p - 2.0);
  return {pref * I.value, pref * I.abs_error_estimate};
}

ScalarEval mass_of_lambda_diagonal(const Params& params, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("diagonal mass requires lambda > 0");
  const ScalarEval M = diagonal_mass_constant(params);
  const double scale = std::pow(lambda, (6.0 - params.p()) / (2.0 * (params.p() - 2.0)));
  return {M.value * scale, M.abs_error_estimate * scale};
}

MassAsymptotics asymptotics(const Params& params) {
  if (params.diagonal()) throw std::domain_error("mass asymptotics are defined off the diagonal");
  const double p = params.p(), q = params.q();
  const double d = 2.0 * q - p - 2.0;
  MassAsymptotics out;
  out.t1_exponent = (q - 4.0) / d;
  out.t1_coefficient = std::pow(p, out.t1_exponent) * std::pow(2.0, (6.0 - p) / d);
  if (out.t1_exponent > 0) {
    out.t1_limit = 0.0;
  } else if (out.t1_exponent < 0) {
    out.t1_limit = kInf;
  } else {
    out.t1_limit = out.t1_coefficient;
  }
  if (p < 6.0) {
    out.tail = MassAsymptotics::Tail::Plateau;
    out.tinf_limit = *mu0(params);
  } else if (p == 6.0) {
    out.tail = MassAsymptotics::Tail::Logarithmic;
    out.tinf_limit = kInf;
    out.tinf_exponent = 1.0;
    out.tinf_coefficient = C_pq(params);
  } else {
    out.tail = MassAsymptotics::Tail::Power;
    out.tinf_limit = kInf;
    out.tinf_exponent = (p - 6.0) / (p - 2.0);
    // least-squares line through (log t, log mu) far out on the branch
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = 5;
    for (int i = 0; i < n; ++i) {
      const double lt = std::log(10.0) * (100.0 + 10.0 * i);
      const double lm = log_mass_of_t(params, BranchCoord::from_log_excess(lt));
      sx += lt;
      sy += lm;
      sxx += lt * lt;
      sxy += lt * lm;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / n;
    out.tinf_fitted_slope = slope;
    out.tinf_coefficient = std::exp(icpt);
  }
  return out;
}

double extrapolate_t1_prefactor(const Params& params, double s0, int levels) {
  const double beta = asymptotics(params).t1_exponent;
  std::vector<double> s(levels), v(levels);
  for (int j = 0; j < levels; ++j) {
    s[j] = s0 * std::ldexp(1.0, -j);
    const BranchCoord t = BranchCoord::from_excess(s[j]);
    v[j] = std::exp(log_mass_of_t(params, t) - beta * std::log(s[j]));
  }
  // Neville's scheme evaluated at s = 0
  for (int k = 1; k < levels; ++k) {
    for (int j = levels - 1; j >= k; --j) {
      v[j] = (s[j - k] * v[j] - s[j] * v[j - 1]) / (s[j - k] - s[j]);
    }
  }
  return v[levels - 1];
}

bool MassCurve::strictly_increasing() const {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].mu > samples[i - 1].mu)) return false;
  }
  return true;
}

MassCurve mass_curve(const Params& params, double y_lo, double y_hi, int points) {
  if (points < 2) throw std::invalid_argument("mass curve needs at least two samples");
  MassCurve curve{params, {}, 0.0, 0.0, {}};
  const MassAsymptotics as = asymptotics(params);
  curve.limit_t1 = as.t1_limit;
  curve.limit_tinf = as.tinf_limit;
  curve.samples.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double y = y_lo + (y_hi - y_lo) * i / (points - 1);
    const BranchCoord t = BranchCoord::from_log_excess(y);
    const ScalarEval mu = mass_of_t(params, t);
    curve.samples.push_back({y, t.t(), mu.value, mu.abs_error_estimate, h_sign(params, t)});
  }
  int last_sign = 0;
  double last_y = 0.0;
  for (const auto& s : curve.samples) {
    if (s.h_sign == 0) continue;
    if (last_sign != 0 && s.h_sign != last_sign) {
      auto h = [&](double y) { return h_of_t(params, BranchCoord::from_log_excess(y)).value; };
      const double yr = solve_in_y(h, last_y, s.y);
      curve.extrema.push_back({1.0 + std::exp(yr), mass_at_y(params, yr), last_sign < 0});
    }
    last_sign = s.h_sign;
    last_y = s.y;
  }
  return curve;
}

BranchPoint branch_point_at(const Params& params, BranchCoord t) {
  if (t.is_infinite()) {
    auto z = lambda_zero_point(params);
    if (!z) throw std::domain_error("no lambda = 0 solution for these exponents");
    return *z;
  }
  const double lambda = MatchingRhs(params).inverse_log(log_f_of_t(params, t));
  return make_branch_point(params, t, lambda);
}

MassMinimum mass_minimum(const Params& params) {
  const Region r = classify(params);
  if (r != Region::C && r != Region::F) throw std::domain_error("mass minimum is interior only in regions C and F");
  auto h = [&](double y) { return h_of_t(params, BranchCoord::from_log_excess(y)).value; };
  // h < 0 near t = 1 (mu decreasing from +inf); first determined sign change
  const int n = 600;
  const double lo = -30.0, hi = 30.0;
  double prev_y = lo;
  int prev_sign = h_sign(params, BranchCoord::from_log_excess(lo));
  double y_root = std::numeric_limits<double>::quiet_NaN();
  for (int i = 1; i < n; ++i) {
    const double y = lo + (hi - lo) * i / (n - 1);
    const int sg = h_sign(params, BranchCoord::from_log_excess(y));
    if (sg == 0) continue;
    if (prev_sign < 0 && sg > 0) {
      y_root = solve_in_y(h, prev_y, y);
      break;
    }
    prev_sign = sg;
    prev_y = y;
  }
  if (std::isnan(y_root)) throw std::runtime_error("no interior minimum of mu(t) located");
  MassMinimum out;
  out.t = 1.0 + std::exp(y_root);
  out.mu = mass_at_y(params, y_root);
  // independent certificate: minimize log mu over an enclosing y window
  auto lm = [&](double y) { return log_mass_of_t(params, BranchCoord::from_log_excess(y)); };
  const double step = (hi - lo) / (n - 1);
  const auto m = boost::math::tools::brent_find_minima(lm, y_root - 4 * step, y_root + 4 * step, 40);
  out.t_direct = 1.0 + std::exp(m.first);
  out.mu_direct = std::exp(m.second);
  return out;
}

const char* threshold_source_name(ThresholdSource s) {
  switch (s) {
    case ThresholdSource::None: return "none";
    case ThresholdSource::ClosedForm: return "closed-form";
    case ThresholdSource::Minimized: return "minimized";
    case ThresholdSource::Constant: return "constant";
  }
  return "?";
}

ThresholdReport mass_threshold(const Params& params) {
  ThresholdReport rep;
  rep.region = classify(params);
  rep.rule = expected_solution_regime(params);
  switch (rep.region) {
    case Region::A:
    case Region::E:
      rep.source = ThresholdSource::ClosedForm;
      rep.mu_pq = *mu0(params);
      break;
    case Region::C:
    case Region::F: {
      rep.source = ThresholdSource::Minimized;
      const MassMinimum mm = mass_minimum(params);
      rep.mu_pq = mm.mu;
      rep.t_min = mm.t;
      rep.mu_min_h_root = mm.mu;
      rep.mu_min_direct = mm.mu_direct;
      rep.certification_gap = std::fabs(mm.mu - mm.mu_direct) / mm.mu;
      break;
    }
    case Region::G:
      rep.source = ThresholdSource::ClosedForm;
      rep.mu_lower = 2.0;
      rep.mu_pq = *mu0(params);
      break;
    case Region::H:
      rep.source = ThresholdSource::Constant;
      rep.mu_lower = 2.0;
      break;
    case Region::B:
    case Region::D:
    case Region::I:
      break;
  }
  return rep;
}

namespace {

NormalizedSolution finish(const BranchPoint& pt, double mu) {
  NormalizedSolution s{pt, mu, branch_energy(pt).total, 0.0};
  s.mass_gate_residual = std::fabs(profile_mass_quadrature(pt) - mu) / mu;
  return s;
}

}  // namespace

MassMap::MassMap(const Params& params, const MassMapOptions& opt)
    : params_(params), opt_(opt) {
  if (params.diagonal()) return;
  const Region r = classify(params);
  if (r != Region::C && r != Region::F) return;
  minimum_ = mass_minimum(params);
  const int n = opt.scan_points;
  scan_y_.resize(n);
  scan_log_mu_.resize(n);
  for (int i = 0; i < n; ++i) {
    scan_y_[i] = opt.y_lo + (opt.y_hi - opt.y_lo) * i / (n - 1);
    scan_log_mu_[i] = log_mass_of_t(params, BranchCoord::from_log_excess(scan_y_[i]));
  }
}

std::vector<BranchCoord> MassMap::branch_roots(double mu) const {
  std::vector<BranchCoord> out;
  if (params_.diagonal()) throw std::domain_error("branch_roots works off the diagonal");
  const MassAsymptotics as = asymptotics(params_);
  const bool plateau = params_.p() < 6.0;
  const bool at_plateau = plateau && std::fabs(mu - as.tinf_limit) <= opt_.plateau_rel * as.tinf_limit;
  auto fn = [&](double y) { return std::log(mass_at_y(params_, y)) - std::log(mu); };
  if (mass_map_monotone(params_)) {
    if (at_plateau) {
      out.push_back(BranchCoord::infinity());
      return out;
    }
    if (!(mu > as.t1_limit && mu < as.tinf_limit)) return out;
    double lo = 0.0, hi = 0.0;
    while (fn(lo) >= 0) {
      lo -= 8.0;
      if (lo < opt_.y_min) return out;
    }
    while (fn(hi) <= 0) {
      hi += 8.0;
      if (hi > opt_.y_max) return out;
    }
    out.push_back(BranchCoord::from_log_excess(solve_in_y(fn, lo, hi)));
    return out;
  }
  if (!minimum_) return out;
  const MassMinimum& mm = *minimum_;
  const double log_mu = std::log(mu);
  if (std::fabs(mu - mm.mu) <= opt_.tangency_rel * mm.mu) {
    out.push_back(BranchCoord::from_t(mm.t));
    if (at_plateau) out.push_back(BranchCoord::infinity());
    return out;
  }
  if (mu < mm.mu) return out;
  // sign changes of log mu(t) - log mu on the grid; the t -> 1 and t -> inf
  // limits act as virtual samples beyond the ends
  const auto& ys = scan_y_;
  const auto& ls = scan_log_mu_;
  const double left_limit = std::log(as.t1_limit);
  const double right_limit = std::log(as.tinf_limit);
  if ((left_limit > log_mu) != (ls.front() > log_mu)) {
    out.push_back(BranchCoord::from_log_excess(solve_in_y(fn, opt_.y_min, ys.front())));
  }
  for (std::size_t i = 1; i < ys.size(); ++i) {
    if ((ls[i - 1] > log_mu) != (ls[i] > log_mu)) {
      out.push_back(BranchCoord::from_log_excess(solve_in_y(fn, ys[i - 1], ys[i])));
    }
  }
  if (at_plateau) {
    out.push_back(BranchCoord::infinity());
  } else if ((ls.back() > log_mu) != (right_limit > log_mu)) {
    out.push_back(BranchCoord::from_log_excess(solve_in_y(fn, ys.back(), opt_.y_max)));
  }
  return out;
}

std::vector<NormalizedSolution> MassMap::solutions(double mu) const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mass must be positive and finite");
  std::vector<NormalizedSolution> out;
  if (params_.diagonal()) {
    const auto d = diagonal_exists(params_);
    if (!d.exists) return out;
    const double M = diagonal_mass_constant(params_).value;
    const double p = params_.p();
    const double lambda = std::pow(mu / M, 2.0 * (p - 2.0) / (6.0 - p));
    out.push_back(finish(make_branch_point(params_, BranchCoord::from_t(*d.t), lambda), mu));
    return out;
  }
  for (const BranchCoord& t : branch_roots(mu)) out.push_back(finish(branch_point_at(params_, t), mu));
  return out;
}

std::vector<NormalizedSolution> normalized_solutions(const Params& params, double mu,
                                                     const MassMapOptions& opt) {
  return MassMap(params, opt).solutions(mu);
}

}  // namespace dnls
