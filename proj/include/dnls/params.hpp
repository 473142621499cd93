#pragma once

#include <string>

namespace dnls {

/// Exponent pair of the bulk (p) and point (q) nonlinearities. Both must exceed 2.
class Params {
 public:
  Params(double p, double q);

  double p() const { return p_; }
  double q() const { return q_; }

  /// True iff q == p/2 + 1 exactly; no tolerance is applied.
  bool diagonal() const { return diagonal_; }

  /// Sign of q - (p/2 + 1): +1 above the diagonal, -1 below, 0 on it.
  int side() const;

  std::string to_string() const;

 private:
  double p_;
  double q_;
  bool diagonal_;
};

enum class Region { A, B, C, D, E, F, G, H, I };

char region_tag(Region r);
Region classify(const Params& params);

/// Endpoint of a symbolic mass interval. MuPQ is the region's own threshold
/// (the lambda = 0 mass for A, E, G; the branch minimum for C, F).
enum class MassBound { Zero, Two, MuPQ, Infinity };

enum class RuleShape { None, AllMasses, UpTo, From, Window, Above };

/// Closed description of the set of masses admitting normalized solutions.
struct ExistenceRule {
  RuleShape shape = RuleShape::None;
  MassBound lower = MassBound::Zero;
  bool lower_inclusive = false;
  MassBound upper = MassBound::Infinity;
  bool upper_inclusive = false;
  bool unique = false;

  std::string describe() const;
};

ExistenceRule expected_solution_regime(const Params& params);

/// Whether mu(t) is strictly increasing: q in (2,4] below the diagonal,
/// or q >= 4 above it.
bool mass_map_monotone(const Params& params);

}  // namespace dnls
