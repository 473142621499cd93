#include <dnls/config.hpp>
#include <dnls/energy.hpp>
#include <dnls/io.hpp>
#include <dnls/massmap.hpp>
#include <dnls/params.hpp>
#include <dnls/stationary.hpp>
#include <dnls/verify.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kInvalid = 2;

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Range {
  double a = 0.0, b = 0.0;
  int n = 0;
};

Range parse_range(const std::string& s) {
  Range r;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &r.a, &r.b, &r.n, &tail) != 3 || r.n < 2 ||
      !(r.a < r.b) || !std::isfinite(r.a) || !std::isfinite(r.b)) {
    throw InvalidInput("--range expects a:b:n with a < b and n >= 2, got '" + s + "'");
  }
  return r;
}

std::vector<double> linspace(const Range& r) {
  std::vector<double> v(r.n);
  for (int i = 0; i < r.n; ++i) v[i] = r.a + (r.b - r.a) * i / (r.n - 1);
  return v;
}

std::string num(double v, const dnls::RunConfig& cfg) { return dnls::format_number(v, cfg.precision); }

json opt_json(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

std::string default_dir() {
  const char* env = std::getenv("DNLS_OUTPUT_DIR");
  return env && *env ? env : ".";
}

/// Writes to `path`, or to stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw InvalidInput("cannot open " + path + " for writing");
  os << text;
}

std::string render(const dnls::Table& t, const json& meta, const dnls::RunConfig& cfg) {
  if (cfg.format == "json") return dnls::dump_json(t.to_json(meta));
  std::ostringstream os;
  t.write_csv(os, meta);
  return os.str();
}

std::string pair_stem(const dnls::Params& pq) {
  return "p" + dnls::format_number(pq.p(), 10) + "_q" + dnls::format_number(pq.q(), 10);
}

// classify

json classify_json(const dnls::Params& pq) {
  const auto rep = dnls::mass_threshold(pq);
  json j;
  j["region"] = std::string(1, dnls::region_tag(rep.region));
  j["existence"] = rep.rule.describe();
  j["unique"] = rep.rule.shape != dnls::RuleShape::None && rep.rule.unique;
  j["mass_map_monotone"] = dnls::mass_map_monotone(pq);
  json th = json::object();
  if (pq.side() < 0) {
    th["lambda_bar"] = {{"value", opt_json(dnls::lambda_bar(pq))}, {"source", "closed-form"}};
  }
  if (!pq.diagonal()) {
    if (auto m0 = dnls::mu0(pq)) th["mu0"] = {{"value", *m0}, {"source", "closed-form"}};
  }
  if (rep.mu_pq) {
    th["mu_pq"] = {{"value", *rep.mu_pq}, {"source", dnls::threshold_source_name(rep.source)}};
  }
  if (rep.mu_lower) th["mu_lower"] = {{"value", *rep.mu_lower}, {"source", "constant"}};
  j["thresholds"] = th;
  if (rep.region == dnls::Region::I && pq.p() <= 8.0) {
    j["note"] = "no normalized solutions (p <= 8)";
  }
  const auto reason = dnls::energy_refusal_reason(pq);
  if (!reason.empty()) j["energy"] = reason;
  return j;
}

int cmd_classify(const dnls::Params& pq, const dnls::RunConfig& cfg) {
  json j = classify_json(pq);
  if (cfg.format == "json") {
    json out = {{"meta", dnls::artifact_meta("classify", pq, cfg)}, {"report", j}};
    emit(cfg.output, dnls::dump_json(out));
    return kOk;
  }
  std::ostringstream os;
  os << "p = " << num(pq.p(), cfg) << ", q = " << num(pq.q(), cfg) << "\n";
  os << "region: " << j["region"].get<std::string>() << "\n";
  os << "existence: " << j["existence"].get<std::string>() << "\n";
  os << "unique: " << (j["unique"].get<bool>() ? "yes" : "no") << "\n";
  for (const auto& [name, v] : j["thresholds"].items()) {
    os << name << ": " << (v["value"].is_null() ? "none" : num(v["value"].get<double>(), cfg)) << " ("
       << v["source"].get<std::string>() << ")\n";
  }
  if (j.contains("note")) os << j["note"].get<std::string>() << "\n";
  if (j.contains("energy")) os << "energy: " << j["energy"].get<std::string>() << "\n";
  emit(cfg.output, os.str());
  return kOk;
}

// solve

std::string no_lambda_solution_note(const dnls::Params& pq, double lambda) {
  std::ostringstream os;
  os << "no positive solution at lambda = " << dnls::format_number(lambda, 12) << ": ";
  if (pq.diagonal()) {
    os << (pq.p() <= 8.0 ? "on the diagonal q = p/2 + 1 there is none for p <= 8"
                         : "on the diagonal the branch equation has no root at this lambda");
  } else if (pq.side() < 0) {
    const auto lb = dnls::lambda_bar(pq);
    if (lb && lambda > *lb) {
      os << "lambda exceeds lambda_bar = " << dnls::format_number(*lb, 12);
    } else {
      os << "the branch equation f(t) = g(lambda) has no root";
    }
  } else {
    os << "the branch equation f(t) = g(lambda) has no root";
  }
  return os.str();
}

std::string no_mass_solution_note(const dnls::Params& pq, double mu) {
  const auto rep = dnls::mass_threshold(pq);
  std::ostringstream os;
  os << "no normalized solution at mu = " << dnls::format_number(mu, 12) << ": region "
     << dnls::region_tag(rep.region);
  if (rep.rule.shape == dnls::RuleShape::None) {
    os << " has no normalized solutions (p <= 8)";
    return os.str();
  }
  os << " admits masses in " << rep.rule.describe();
  if (rep.mu_pq) os << " with mu_pq = " << dnls::format_number(*rep.mu_pq, 12);
  return os.str();
}

int cmd_solve(const dnls::Params& pq, const dnls::RunConfig& cfg, std::optional<double> lambda,
              std::optional<double> mass) {
  if (lambda.has_value() == mass.has_value()) {
    throw InvalidInput("solve needs exactly one of --lambda and --mass");
  }
  dnls::Table t;
  json meta = dnls::artifact_meta(lambda ? "solve-lambda" : "solve-mass", pq, cfg);
  if (lambda) {
    if (!(*lambda > 0.0) || !std::isfinite(*lambda)) throw InvalidInput("--lambda must be positive");
    meta["lambda"] = *lambda;
    dnls::StationaryOptions so;
    so.root_rel = cfg.root_rel;
    so.residual_rel = cfg.residual_rel;
    const auto set = dnls::solve_for_lambda(pq, *lambda, so);
    t.columns = {"t",      "lambda", "a",      "u0",           "mass",         "kinetic",
                 "bulk",   "point",  "energy", "vertex_residual", "matching_residual",
                 "branch_residual"};
    for (const auto& pt : set.points) {
      const auto e = dnls::branch_energy(pt);
      t.rows.push_back({num(pt.t.t(), cfg), num(pt.lambda, cfg), num(pt.a, cfg), num(pt.u0, cfg),
                        num(dnls::mass_of_point(pt), cfg), num(e.kinetic, cfg), num(e.bulk, cfg),
                        num(e.point, cfg), num(e.total, cfg), num(dnls::vertex_residual_rel(pt), cfg),
                        num(dnls::matching_residual(pt), cfg),
                        num(dnls::branch_equation_residual(pt), cfg)});
    }
    if (set.points.empty()) t.notes.push_back(no_lambda_solution_note(pq, *lambda));
  } else {
    if (!(*mass > 0.0) || !std::isfinite(*mass)) throw InvalidInput("--mass must be positive");
    meta["mass"] = *mass;
    dnls::MassMapOptions mo;
    mo.scan_points = cfg.t_scan_points;
    const auto sols = dnls::normalized_solutions(pq, *mass, mo);
    t.columns = {"t",      "lambda",        "u0",
                 "mass",   "energy",        "mass_residual",
                 "vertex_residual", "matching_residual"};
    for (const auto& s : sols) {
      t.rows.push_back({num(s.point.t.t(), cfg), num(s.point.lambda, cfg), num(s.point.u0, cfg),
                        num(s.mass, cfg), num(s.energy, cfg), num(s.mass_gate_residual, cfg),
                        num(dnls::vertex_residual_rel(s.point), cfg),
                        num(dnls::matching_residual(s.point), cfg)});
    }
    if (sols.empty()) t.notes.push_back(no_mass_solution_note(pq, *mass));
  }
  emit(cfg.output, render(t, meta, cfg));
  return kOk;
}

// curves

std::vector<double> default_energy_grid(const dnls::Params& pq, int n) {
  const auto rep = dnls::mass_threshold(pq);
  double hi = 10.0;
  if (rep.mu_pq) hi = 3.0 * *rep.mu_pq;
  else if (rep.mu_lower) hi = 3.0 * *rep.mu_lower;
  return linspace({hi / n, hi, n});
}

int cmd_curves(const dnls::Params& pq, const dnls::RunConfig& cfg, const std::string& which,
               const std::optional<std::string>& range) {
  const fs::path dir = cfg.output.empty() ? fs::path(default_dir()) : fs::path(cfg.output);
  fs::create_directories(dir);
  const std::string ext = cfg.format == "json" ? ".json" : ".csv";
  const std::string stem = which + "_" + pair_stem(pq);
  auto write = [](const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw InvalidInput("cannot open " + p.string() + " for writing");
    os << text;
  };

  if (which == "mass") {
    if (pq.diagonal()) throw InvalidInput("the mass map mu(t) is not defined on the diagonal q = p/2 + 1");
    Range r{-12.0, 12.0, cfg.t_scan_points};
    if (range) r = parse_range(*range);
    const auto curve = dnls::mass_curve(pq, r.a, r.b, r.n);
    json meta = dnls::artifact_meta("mass-curve", pq, cfg);
    meta["range"] = {{"variable", "log(t - 1)"}, {"from", r.a}, {"to", r.b}, {"points", r.n}};
    const fs::path data = dir / (stem + ext);
    const fs::path side = dir / (stem + ".summary.json");
    write(data, render(dnls::mass_curve_table(curve, cfg), meta, cfg));
    write(side, dnls::dump_json(dnls::mass_curve_sidecar(curve, cfg)));
    std::cout << data.string() << "\n" << side.string() << "\n";
    return kOk;
  }

  const std::string reason = dnls::energy_refusal_reason(pq);
  if (!reason.empty()) {
    const fs::path flag = dir / (stem + ".refused.json");
    json j = {{"meta", dnls::artifact_meta("energy-curve-refused", pq, cfg)}, {"refused", true},
              {"reason", reason}};
    write(flag, dnls::dump_json(j));
    std::cerr << "refused: " << reason << "\n" << flag.string() << "\n";
    return kInvalid;
  }
  std::vector<double> grid = range ? linspace(parse_range(*range)) : default_energy_grid(pq, cfg.mu_grid);
  if (grid.front() <= 0.0) throw InvalidInput("energy --range must consist of positive masses");
  const auto curve = dnls::energy_curve(pq, grid, cfg.jobs);
  json meta = dnls::artifact_meta("energy-curve", pq, cfg);
  meta["range"] = {{"variable", "mu"}, {"from", grid.front()}, {"to", grid.back()},
                   {"points", grid.size()}};
  const fs::path data = dir / (stem + ext);
  const fs::path side = dir / (stem + ".summary.json");
  write(data, render(dnls::energy_curve_table(curve, cfg), meta, cfg));
  write(side, dnls::dump_json(dnls::energy_curve_sidecar(curve, grid, cfg)));
  std::cout << data.string() << "\n" << side.string() << "\n";
  return kOk;
}

// verify

int cmd_verify(const dnls::RunConfig& cfg, const std::string& suite_name, std::optional<double> tamper) {
  if (tamper) dnls::set_cpq_tamper_factor(*tamper);
  const auto suite = suite_name == "full" ? dnls::Suite::Full : dnls::Suite::Quick;
  const auto report = dnls::run_verify(suite, cfg);
  for (const auto& c : report.checks) {
    std::cerr << (c.pass ? "PASS " : "FAIL ") << c.id << " [" << c.tag << "] " << c.detail << "\n";
  }
  std::string path = cfg.output;
  if (path.empty() && std::getenv("DNLS_OUTPUT_DIR")) {
    path = (fs::path(default_dir()) / ("verify_" + suite_name + ".json")).string();
  }
  emit(path, dnls::dump_json(report.to_json(cfg)));
  if (report.all_pass()) {
    std::cerr << "all " << report.checks.size() << " checks passed\n";
    return kOk;
  }
  std::cerr << "failed checks:";
  for (const auto& id : report.failed_ids()) std::cerr << " " << id;
  std::cerr << "\n";
  return kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationary and normalized solutions of the NLS with defocusing bulk and a focusing point nonlinearity"};
  app.set_config("--config", "", "TOML file with option defaults; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  dnls::RunConfig cfg;
  double p = 0.0, q = 0.0;
  std::optional<double> tamper;
  app.add_option("--p", p, "bulk exponent p > 2");
  app.add_option("--q", q, "point exponent q > 2");
  app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--out", cfg.output,
                 "output file (classify, solve, verify) or directory (curves); "
                 "default stdout, or $DNLS_OUTPUT_DIR for curves and verify reports");
  app.add_option("--jobs", cfg.jobs, "worker threads for sweeps")->capture_default_str();
  app.add_option("--precision", cfg.precision, "significant digits in tables")->capture_default_str();
  app.add_option("--quadrature-abs", cfg.quadrature_abs, "absolute quadrature tolerance")->capture_default_str();
  app.add_option("--root-rel", cfg.root_rel, "relative root tolerance")->capture_default_str();
  app.add_option("--residual-rel", cfg.residual_rel, "relative residual gate")->capture_default_str();
  app.add_option("--oracle-rel", cfg.oracle_rel, "oracle agreement tolerance")->capture_default_str();
  app.add_option("--t-scan-points", cfg.t_scan_points, "points of the log(t - 1) scan")->capture_default_str();
  app.add_option("--mu-grid", cfg.mu_grid, "points of the default mass grid")->capture_default_str();
  app.add_option("--oracle-n", cfg.oracle_n, "grid intervals of materialized profiles")->capture_default_str();
  app.add_option("--oracle-L", cfg.oracle_L, "half-domain length; 0 picks max(50, 20/sqrt(lambda))")
      ->capture_default_str();
  app.add_option("--tamper-cpq", tamper, "multiply C_pq by this factor")->group("");

  auto* classify = app.add_subcommand("classify", "region, existence rule and thresholds of (p, q)");
  auto* solve = app.add_subcommand("solve", "all solutions at fixed --lambda or fixed --mass");
  std::optional<double> lambda, mass;
  solve->add_option("--lambda", lambda, "frequency lambda > 0");
  solve->add_option("--mass", mass, "L2 mass mu > 0");

  auto* curves = app.add_subcommand("curves", "mass map or ground-state energy curve with a JSON summary");
  std::string which = "mass";
  std::optional<std::string> range;
  curves->add_option("--which", which, "mass or energy")->check(CLI::IsMember({"mass", "energy"}))
      ->capture_default_str();
  curves->add_option("--range", range,
                     "a:b:n; mass: log(t - 1) from a to b (default -12:12:t-scan-points); "
                     "energy: mu from a to b (default up to 3 mu_pq, mu-grid points)");

  auto* verify = app.add_subcommand("verify", "run the verification battery; exit 1 if any check fails");
  std::string suite = "quick";
  verify->add_option("suite", suite, "quick or full")->check(CLI::IsMember({"quick", "full"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    cfg.validate();
    if (verify->parsed()) return cmd_verify(cfg, suite, tamper);
    if (p == 0.0 || q == 0.0) throw InvalidInput("--p and --q are required");
    const dnls::Params pq(p, q);
    if (classify->parsed()) return cmd_classify(pq, cfg);
    if (solve->parsed()) return cmd_solve(pq, cfg, lambda, mass);
    if (curves->parsed()) return cmd_curves(pq, cfg, which, range);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
