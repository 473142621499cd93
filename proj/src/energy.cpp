#include <dnls/energy.hpp>
#include <dnls/parallel.hpp>

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dnls {

EnergyBreakdown branch_energy(const BranchPoint& point, const QuadOptions& opt) {
  const Params& pq = point.params;
  const double p = pq.p(), q = pq.q();
  const double m = 2.0 / (p - 2.0);
  EnergyBreakdown e;
  if (point.lambda_zero()) {
    const double cp = c_p(p), a = point.a;
    e.kinetic = m * m * cp * cp * std::pow(a, -2.0 * m - 1.0) / (2.0 * m + 1.0);
    e.bulk = 2.0 / p * std::pow(cp, p) * std::pow(a, 1.0 - m * p) / (m * p - 1.0);
  } else {
    const double lam = point.lambda;
    const BranchCoord t = point.t;
    const double log_pref = (p - 4.0) / (p - 2.0) * std::log(2.0) + m * std::log(p) +
                            (p + 2.0) / (2.0 * (p - 2.0)) * std::log(lam) - std::log(p + 2.0);
    const double boundary = std::exp(t.log_t() + m * t.log_t2m1());
    const double I = std::exp(log_I_of_t(pq, t, opt).log_value);
    e.kinetic = std::exp(log_pref) * (boundary + I);
    // (1/p) |u|_p^p = (2/p) (p lambda/2)^(p/(p-2)) 2/((p-2) sqrt(lambda)) J(t)
    const double log_bulk = std::log(4.0 / (p * (p - 2.0))) + p / (p - 2.0) * std::log(p * lam / 2.0) -
                            0.5 * std::log(lam) + log_J_of_t(pq, t, opt).log_value;
    e.bulk = std::exp(log_bulk);
  }
  e.point = std::pow(point.u0, q) / q;
  e.total = e.kinetic + e.bulk - e.point;
  return e;
}

double multiplier_from_energy(const Params& params, const EnergyBreakdown& e, double mass) {
  return (params.q() * e.point - 2.0 * e.kinetic - params.p() * e.bulk) / mass;
}

}  // namespace dnls

namespace dnls {

const char* energy_flag_name(EnergyFlag f) {
  switch (f) {
    case EnergyFlag::Attained: return "attained";
    case EnergyFlag::NotAttained: return "infimum-not-attained";
    case EnergyFlag::MinusInfinity: return "minus-infinity";
    case EnergyFlag::Unknown: return "unknown";
  }
  return "?";
}

bool energy_unbounded_everywhere(const Params& params) {
  const Region r = classify(params);
  return r == Region::D || r == Region::E;
}

std::string energy_refusal_reason(const Params& params) {
  if (!energy_unbounded_everywhere(params)) return {};
  return "E(mu) = -inf for every mu > 0 because q > max{4, p/2 + 1}";
}

EnergySample energy_at(const MassMap& map, double mu) {
  const Params& pq = map.params();
  EnergySample s;
  s.mu = mu;
  const Region r = classify(pq);
  if (energy_unbounded_everywhere(pq) || (r == Region::G && mu > 2.0)) {
    s.flag = EnergyFlag::MinusInfinity;
    return s;
  }
  const auto sols = map.solutions(mu);
  for (std::size_t i = 0; i < sols.size(); ++i) {
    s.candidates.push_back({static_cast<int>(i), sols[i].energy, sols[i].point.lambda, sols[i].point.t.t()});
  }
  if (r == Region::I) {
    if (pq.p() < 6.0) {
      s.E = 0.0;
      s.flag = EnergyFlag::NotAttained;
    }
    return s;
  }
  const auto m0 = pq.p() < 6.0 ? mu0(pq) : std::nullopt;
  if (m0 && mu > *m0 && !(sols.size() > 0 && sols.back().point.lambda_zero())) {
    const auto z = *lambda_zero_point(pq);
    s.candidates.push_back({kPlateauBranch, branch_energy(z).total, 0.0, z.t.t()});
  }
  double best = 0.0;
  const EnergyCandidate* arg = nullptr;
  for (const auto& c : s.candidates) {
    if (c.energy < best) {
      best = c.energy;
      arg = &c;
    }
  }
  s.E = best;
  if (arg == nullptr) {
    s.flag = EnergyFlag::NotAttained;
    s.branch_id = kVanishingBranch;
  } else {
    s.branch_id = arg->branch_id;
    s.lambda = arg->lambda;
    s.flag = arg->branch_id == kPlateauBranch ? EnergyFlag::NotAttained : EnergyFlag::Attained;
  }
  return s;
}

EnergySample energy_at(const Params& params, double mu) { return energy_at(MassMap(params), mu); }

EnergyCurve energy_curve(const Params& params, const std::vector<double>& mu_grid, int jobs) {
  EnergyCurve curve{params, std::vector<EnergySample>(mu_grid.size())};
  const MassMap map(params);
  parallel_for(mu_grid.size(), jobs, [&](std::size_t i) { curve.samples[i] = energy_at(map, mu_grid[i]); });
  return curve;
}

double multiplier_consistency(const Params& params, double mu, double step) {
  const MassMap map(params);
  const EnergySample mid = energy_at(map, mu);
  if (!mid.lambda || mid.flag != EnergyFlag::Attained) {
    throw std::domain_error("multiplier undefined: no unique minimizing branch at this mass");
  }
  auto E = [&](double m) {
    const EnergySample s = energy_at(map, m);
    if (!s.E) throw std::domain_error("energy level is not finite near this mass");
    return *s.E;
  };
  auto central = [&](double h) { return (E(mu + h) - E(mu - h)) / (2.0 * h); };
  const double d = (4.0 * central(0.5 * step) - central(step)) / 3.0;
  return std::fabs(d + 0.5 * *mid.lambda);
}

std::optional<double> mu_tilde(const Params& params) {
  const Region r = classify(params);
  if (r != Region::C && r != Region::F && r != Region::H) return std::nullopt;
  const int n = 2001;
  const double lo = -30.0, hi = 30.0;
  std::vector<double> ys(n), es(n), ms(n);
  auto energy_y = [&](double y) { return branch_energy(branch_point_at(params, BranchCoord::from_log_excess(y))).total; };
  for (int i = 0; i < n; ++i) {
    ys[i] = lo + (hi - lo) * i / (n - 1);
    es[i] = energy_y(ys[i]);
    ms[i] = mass_of_t(params, BranchCoord::from_log_excess(ys[i])).value;
  }
  std::optional<double> best;
  for (int i = 0; i < n; ++i) {
    if (es[i] <= 0.0 && (!best || ms[i] < *best)) best = ms[i];
  }
  // refine where the branch energy crosses zero
  for (int i = 1; i < n; ++i) {
    if ((es[i - 1] <= 0.0) != (es[i] <= 0.0)) {
      boost::math::tools::eps_tolerance<double> tol(50);
      std::uintmax_t iters = 200;
      const auto br = boost::math::tools::toms748_solve(energy_y, ys[i - 1], ys[i], tol, iters);
      const double m = mass_of_t(params, BranchCoord::from_log_excess(0.5 * (br.first + br.second))).value;
      if (!best || m < *best) best = m;
    }
  }
  return best;
}

std::optional<double> energy_lower_bound(const Params& params, double mu) {
  const double p = params.p(), q = params.q();
  std::optional<double> out;
  if (q < 4.0) {
    // |u|_inf^2 <= |u|_2 |u'|_2 against the point term
    const double K = std::pow(std::pow(mu, q / 4.0) / 2.0, 2.0 / (4.0 - q));
    out = K * K * (q - 4.0) / (2.0 * q);
  }
  if (q < p / 2.0 + 1.0) {
    // u0^((p+2)/2) <= kappa (kinetic + bulk), independent of mu
    const double r = 2.0 * q / (p + 2.0);
    const double kappa = (p + 2.0) * std::sqrt(2.0 * p) / 8.0;
    const double S = std::pow(r / q * std::pow(kappa, r), 1.0 / (1.0 - r));
    const double b = S * (1.0 - 1.0 / r);
    if (!out || b > *out) out = b;
  }
  return out;
}

ProbeResult unboundedness_probe(const Params& params, double mu) {
  const double p = params.p(), q = params.q();
  ProbeResult res;
  res.lower_bound = energy_lower_bound(params, mu);
  double inf = std::numeric_limits<double>::infinity();
  if (q != 4.0) {
    res.family = "delta exp(-delta^2 |x|), rescaled to mass mu' <= mu";
    for (int j = 0; j <= 40; ++j) {
      const double m = mu * std::ldexp(1.0, -j);
      const double a1 = std::pow(m, q / (4.0 - q));
      const double a2 = std::pow(m, (p + 2.0 - q) / (4.0 - q));
      for (int k = -40; k <= 48; ++k) {
        const double d = std::pow(10.0, k / 4.0);
        const double e = -a1 * (std::pow(d, q) / q - std::pow(d, 4.0) / 2.0) +
                         2.0 * std::pow(d, p - 2.0) / (p * p) * a2;
        if (std::isfinite(e)) inf = std::min(inf, e);
      }
    }
  } else {
    res.family = "sigma^(1/2) c exp(-b sigma |x|), c^2 = mu b";
    for (int kb = -20; kb <= 20; ++kb) {
      const double b = std::pow(10.0, kb / 4.0);
      const double c = std::sqrt(mu * b);
      const double quad = b * b * mu / 4.0 * (2.0 - mu);
      const double bulk = 2.0 * std::pow(c, p) / (p * p * b);
      for (int ks = -40; ks <= 80; ++ks) {
        const double s = std::pow(10.0, ks / 4.0);
        const double e = s * s * quad + std::pow(s, p / 2.0 - 1.0) * bulk;
        if (std::isfinite(e)) inf = std::min(inf, e);
      }
    }
  }
  res.infimum = inf;
  res.below_floor = inf < -kProbeFloor;
  return res;
}

ConvexityReport convexity_scan(const Params& params, const std::vector<double>& mu_grid, int jobs) {
  ConvexityReport rep;
  const Region r = classify(params);
  if (r != Region::A && r != Region::B) {
    rep.note = "convexity switch is only predicted for q < min{4, p/2 + 1}";
    return rep;
  }
  if (mu_grid.size() < 5) {
    rep.note = "insufficient grid resolution: need at least 5 masses";
    return rep;
  }
  const EnergyCurve curve = energy_curve(params, mu_grid, jobs);
  const std::size_t n = mu_grid.size();
  std::vector<double> d2(n, 0.0);
  double scale = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = mu_grid[i] - mu_grid[i - 1], h1 = mu_grid[i + 1] - mu_grid[i];
    const double e0 = *curve.samples[i - 1].E, e1 = *curve.samples[i].E, e2 = *curve.samples[i + 1].E;
    d2[i] = 2.0 * ((e2 - e1) / h1 - (e1 - e0) / h0) / (h0 + h1);
    scale = std::max(scale, std::fabs(d2[i]));
  }
  const double noise = 1e-6 * scale;
  int last = 0;
  std::size_t last_i = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (std::fabs(d2[i]) <= noise) continue;
    const int sg = d2[i] > 0 ? 1 : -1;
    if (last != 0 && sg != last) {
      ++rep.sign_changes;
      if (last < 0) {
        const double w = d2[last_i] / (d2[last_i] - d2[i]);
        rep.mu_bar = mu_grid[last_i] + w * (mu_grid[i] - mu_grid[last_i]);
      }
    }
    last = sg;
    last_i = i;
  }
  double lam_max = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = curve.samples[i];
    if (s.lambda && *s.lambda > lam_max) {
      lam_max = *s.lambda;
      rep.mu_lambda_max = mu_grid[i];
    }
  }
  rep.resolved = rep.sign_changes == 1 && rep.mu_bar.has_value();
  if (!rep.resolved) {
    rep.note = rep.sign_changes == 0 ? "no concave-to-convex switch inside the grid"
                                     : "insufficient grid resolution: second differences change sign more than once";
  }
  return rep;
}

}  // namespace dnls
