#pragma once

#include <dnls/config.hpp>
#include <dnls/energy.hpp>
#include <dnls/massmap.hpp>

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace dnls {

/// %.{digits}g with "inf", "-inf" and "nan" spelled out.
std::string format_number(double v, int digits = 17);

/// Metadata every artifact carries: kind, exponents, RunConfig and the check map.
nlohmann::json artifact_meta(const std::string& kind, const Params& params, const RunConfig& cfg);

/// Stable-key JSON with a trailing newline.
std::string dump_json(const nlohmann::json& j);

/// A header row and rows of cells, preceded by "# " lines holding the metadata
/// JSON. Comma separated, LF line endings.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;

  void write_csv(std::ostream& os, const nlohmann::json& meta) const;
  /// {"meta": ..., "columns": [...], "rows": [{column: cell}], "notes": [...]};
  /// numeric cells are emitted as numbers
  nlohmann::json to_json(const nlohmann::json& meta) const;
};

/// Columns t, mu, mu_err, h_sign.
Table mass_curve_table(const MassCurve& curve, const RunConfig& cfg);
/// Columns mu, E, lambda, branch_id, flag; empty cells for -inf or unknown.
Table energy_curve_table(const EnergyCurve& curve, const RunConfig& cfg);

/// Thresholds block {lambda_bar, mu_threshold, mu_tilde, mu_bar} plus region data.
nlohmann::json thresholds_json(const Params& params, const std::vector<double>& mu_grid, int jobs);

nlohmann::json mass_curve_sidecar(const MassCurve& curve, const RunConfig& cfg);
nlohmann::json energy_curve_sidecar(const EnergyCurve& curve, const std::vector<double>& mu_grid,
                                    const RunConfig& cfg);

}  // namespace dnls
