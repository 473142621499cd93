#pragma once

#include <dnls/stationary.hpp>

namespace dnls {

/// Terms of E(u) = (1/2)|u'|^2 + (1/p)|u|_p^p - (1/q)|u(0)|^q.
struct EnergyBreakdown {
  double kinetic = 0.0;
  double bulk = 0.0;
  double point = 0.0;
  double total = 0.0;
};

/// Closed-form energy of a branch solution (lambda > 0 or the lambda = 0 profile).
EnergyBreakdown branch_energy(const BranchPoint& point, const QuadOptions& opt = {});

/// lambda recovered from the equation tested against u:
/// lambda mu = u0^q - |u'|^2 - |u|_p^p.
double multiplier_from_energy(const Params& params, const EnergyBreakdown& e, double mass);

}  // namespace dnls
