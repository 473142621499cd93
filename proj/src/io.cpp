#include <dnls/io.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace dnls {

std::string format_number(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

nlohmann::json artifact_meta(const std::string& kind, const Params& params, const RunConfig& cfg) {
  nlohmann::json m;
  m["kind"] = kind;
  m["p"] = params.p();
  m["q"] = params.q();
  m["region"] = std::string(1, region_tag(classify(params)));
  m["config"] = cfg.to_json();
  m["checks"] = check_statements();
  return m;
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void Table::write_csv(std::ostream& os, const nlohmann::json& meta) const {
  for (const auto& [k, v] : meta.items()) os << "# " << k << ": " << v.dump() << "\n";
  for (const auto& n : notes) os << "# note: " << n << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  }
}

nlohmann::json Table::to_json(const nlohmann::json& meta) const {
  nlohmann::json j;
  j["meta"] = meta;
  j["columns"] = columns;
  j["notes"] = notes;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row = nlohmann::json::object();
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::string& cell = r[i];
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty()) {
        row[columns[i]] = nullptr;
      } else if (end && *end == '\0' && std::isfinite(v)) {
        row[columns[i]] = v;
      } else {
        row[columns[i]] = cell;
      }
    }
    j["rows"].push_back(row);
  }
  return j;
}

Table mass_curve_table(const MassCurve& curve, const RunConfig& cfg) {
  Table t;
  t.columns = {"t", "mu", "mu_err", "h_sign"};
  const int d = cfg.precision;
  for (const auto& s : curve.samples) {
    t.rows.push_back({format_number(s.t, d), format_number(s.mu, d), format_number(s.mu_err, d),
                      std::to_string(s.h_sign)});
  }
  return t;
}

Table energy_curve_table(const EnergyCurve& curve, const RunConfig& cfg) {
  Table t;
  t.columns = {"mu", "E", "lambda", "branch_id", "flag"};
  const int d = cfg.precision;
  for (const auto& s : curve.samples) {
    t.rows.push_back({format_number(s.mu, d), s.E ? format_number(*s.E, d) : "",
                      s.lambda ? format_number(*s.lambda, d) : "", std::to_string(s.branch_id),
                      energy_flag_name(s.flag)});
  }
  return t;
}

namespace {

nlohmann::json opt_number(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

const char* tail_name(MassAsymptotics::Tail t) {
  switch (t) {
    case MassAsymptotics::Tail::Plateau: return "plateau";
    case MassAsymptotics::Tail::Logarithmic: return "logarithmic";
    case MassAsymptotics::Tail::Power: return "power";
  }
  return "?";
}

}  // namespace

nlohmann::json thresholds_json(const Params& params, const std::vector<double>& mu_grid, int jobs) {
  nlohmann::json j;
  const ThresholdReport rep = mass_threshold(params);
  j["region"] = std::string(1, region_tag(rep.region));
  j["existence"] = rep.rule.describe();
  j["mu_threshold_source"] = threshold_source_name(rep.source);
  j["mu_threshold"] = opt_number(rep.mu_pq);
  j["mu_lower"] = opt_number(rep.mu_lower);
  j["lambda_bar"] = params.side() < 0 ? opt_number(lambda_bar(params)) : nlohmann::json(nullptr);
  j["mu0"] = params.diagonal() ? nlohmann::json(nullptr) : opt_number(mu0(params));
  j["mu_tilde"] = opt_number(mu_tilde(params));
  const Region r = classify(params);
  if ((r == Region::A || r == Region::B) && mu_grid.size() >= 5) {
    const ConvexityReport c = convexity_scan(params, mu_grid, jobs);
    j["mu_bar"] = opt_number(c.mu_bar);
    j["mu_bar_note"] = c.note;
  } else {
    j["mu_bar"] = nullptr;
  }
  if (rep.t_min) {
    j["mass_minimum"] = {{"t", *rep.t_min},
                         {"mu_h_root", opt_number(rep.mu_min_h_root)},
                         {"mu_direct", opt_number(rep.mu_min_direct)},
                         {"gap", opt_number(rep.certification_gap)}};
  }
  return j;
}

nlohmann::json mass_curve_sidecar(const MassCurve& curve, const RunConfig& cfg) {
  nlohmann::json j;
  j["meta"] = artifact_meta("mass-curve-summary", curve.params, cfg);
  const Params& pq = curve.params;
  std::vector<double> grid;
  const Region r = classify(pq);
  if (r == Region::A || r == Region::B) {
    for (int i = 0; i < cfg.mu_grid; ++i) {
      if (r == Region::A) {
        const double m0 = *mu0(pq);
        grid.push_back(0.01 * m0 + (0.99 * m0 - 0.01 * m0) * i / (cfg.mu_grid - 1));
      } else {
        grid.push_back(std::pow(10.0, -3.0 + 6.0 * i / (cfg.mu_grid - 1)));
      }
    }
  }
  j["thresholds"] = thresholds_json(pq, grid, cfg.jobs);
  if (!pq.diagonal()) {
    const MassAsymptotics a = asymptotics(pq);
    j["limits"] = {{"t1_exponent", a.t1_exponent},
                   {"t1_coefficient", a.t1_coefficient},
                   {"t1_limit", std::isfinite(a.t1_limit) ? nlohmann::json(a.t1_limit) : "inf"},
                   {"tinf_tail", tail_name(a.tail)},
                   {"tinf_limit", std::isfinite(a.tinf_limit) ? nlohmann::json(a.tinf_limit) : "inf"},
                   {"tinf_exponent", a.tinf_exponent},
                   {"tinf_coefficient", opt_number(a.tinf_coefficient)},
                   {"tinf_fitted_slope", opt_number(a.tinf_fitted_slope)}};
  }
  j["sampled_limits"] = {{"t1", curve.limit_t1}, {"tinf", curve.limit_tinf}};
  nlohmann::json ex = nlohmann::json::array();
  for (const auto& e : curve.extrema) {
    ex.push_back({{"t", e.t}, {"mu", e.mu}, {"kind", e.minimum ? "minimum" : "maximum"}});
  }
  j["extrema"] = ex;
  j["strictly_increasing"] = curve.strictly_increasing();
  return j;
}

nlohmann::json energy_curve_sidecar(const EnergyCurve& curve, const std::vector<double>& mu_grid,
                                    const RunConfig& cfg) {
  nlohmann::json j;
  j["meta"] = artifact_meta("energy-curve-summary", curve.params, cfg);
  j["thresholds"] = thresholds_json(curve.params, mu_grid, cfg.jobs);
  int attained = 0, not_attained = 0;
  for (const auto& s : curve.samples) {
    if (s.flag == EnergyFlag::Attained) ++attained;
    if (s.flag == EnergyFlag::NotAttained) ++not_attained;
  }
  j["samples"] = curve.samples.size();
  j["attained"] = attained;
  j["not_attained"] = not_attained;
  return j;
}

}  // namespace dnls
