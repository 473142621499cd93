#pragma once

#include <json.hpp>

#include <map>
#include <string>

namespace dnls {

/// Knobs shared by every command. Serialized into each artifact so that a run
/// can be repeated exactly.
struct RunConfig {
  double quadrature_abs = 1e-10;
  double root_rel = 1e-12;
  double residual_rel = 1e-8;
  double oracle_rel = 1e-6;

  int t_scan_points = 2048;
  int mu_grid = 200;
  int oracle_n = 200000;
  /// half-domain length for materialized profiles; 0 picks max(50, 20/sqrt(lambda))
  double oracle_L = 0.0;

  std::string format = "csv";
  int precision = 17;
  std::string output;

  int jobs = 1;

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Check tag -> the mathematical statement the check exercises.
const std::map<std::string, std::string>& check_statements();

}  // namespace dnls
