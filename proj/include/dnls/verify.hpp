#pragma once

#include <dnls/config.hpp>

#include <json.hpp>

#include <string>
#include <vector>

namespace dnls {

struct CheckResult {
  std::string id;
  /// acceptance criterion 1..10, or 0 for gates outside the numbered list
  int criterion = 0;
  std::string tag;
  bool pass = false;
  std::string detail;
  /// wall time; reported on the console, never in artifacts
  double seconds = 0.0;
};

enum class Suite { Quick, Full };

/// Checks of one acceptance criterion (1..10).
std::vector<CheckResult> run_criterion(int criterion, const RunConfig& cfg);

/// mu(t) against the C_pq-free mass of the same branch solution and its
/// profile quadrature, over a fixed set of exponent pairs.
std::vector<CheckResult> run_mass_consistency(const RunConfig& cfg);

/// Per-region shooting and quadrature cross-checks on two pairs per region.
std::vector<CheckResult> run_region_sweep(const RunConfig& cfg);

struct VerifyReport {
  Suite suite = Suite::Quick;
  std::vector<CheckResult> checks;

  bool all_pass() const;
  std::vector<std::string> failed_ids() const;
  nlohmann::json to_json(const RunConfig& cfg) const;
};

/// Quick: mass consistency and criteria 1..10. Full adds the region sweep.
VerifyReport run_verify(Suite suite, const RunConfig& cfg);

}  // namespace dnls
