#include <dnls/params.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dnls {

Params::Params(double p, double q) : p_(p), q_(q) {
  if (!std::isfinite(p) || !std::isfinite(q) || !(p > 2.0) || !(q > 2.0)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "exponents must satisfy p > 2 and q > 2 (got p=%g, q=%g)", p, q);
    throw std::invalid_argument(buf);
  }
  diagonal_ = (q_ == p_ / 2.0 + 1.0);
}

int Params::side() const {
  if (diagonal_) return 0;
  return q_ > p_ / 2.0 + 1.0 ? 1 : -1;
}

std::string Params::to_string() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(p=%.17g, q=%.17g)", p_, q_);
  return buf;
}

char region_tag(Region r) { return static_cast<char>('A' + static_cast<int>(r)); }

Region classify(const Params& params) {
  const double p = params.p();
  const double q = params.q();
  const double diag = p / 2.0 + 1.0;
  if (params.diagonal()) return Region::I;
  if (p < 6.0) {
    if (q < diag) return Region::A;
    if (q < 4.0) return Region::F;
    if (q == 4.0) return Region::G;
    return Region::E;
  }
  // p >= 6, where diag >= 4
  if (q < 4.0) return Region::B;
  if (q > diag) return Region::D;
  // 4 <= q < diag forces p > 6
  if (q == 4.0) return Region::H;
  return Region::C;
}

namespace {

const char* bound_name(MassBound b) {
  switch (b) {
    case MassBound::Zero: return "0";
    case MassBound::Two: return "2";
    case MassBound::MuPQ: return "mu_pq";
    case MassBound::Infinity: return "inf";
  }
  return "?";
}

ExistenceRule make_rule(RuleShape shape, MassBound lo, bool lo_inc, MassBound hi, bool hi_inc,
                        bool unique) {
  ExistenceRule r;
  r.shape = shape;
  r.lower = lo;
  r.lower_inclusive = lo_inc;
  r.upper = hi;
  r.upper_inclusive = hi_inc;
  r.unique = unique;
  return r;
}

}  // namespace

std::string ExistenceRule::describe() const {
  if (shape == RuleShape::None) return "none";
  std::string s = lower_inclusive ? "[" : "(";
  s += bound_name(lower);
  s += ", ";
  s += bound_name(upper);
  s += upper_inclusive ? "]" : ")";
  s += unique ? ", unique" : ", uniqueness unknown";
  return s;
}

ExistenceRule expected_solution_regime(const Params& params) {
  switch (classify(params)) {
    case Region::A:
    case Region::E:
      return make_rule(RuleShape::UpTo, MassBound::Zero, false, MassBound::MuPQ, true, true);
    case Region::B:
    case Region::D:
      return make_rule(RuleShape::AllMasses, MassBound::Zero, false, MassBound::Infinity, false,
                       true);
    case Region::C:
    case Region::F:
      return make_rule(RuleShape::From, MassBound::MuPQ, true, MassBound::Infinity, false, false);
    case Region::G:
      return make_rule(RuleShape::Window, MassBound::Two, false, MassBound::MuPQ, true, true);
    case Region::H:
      return make_rule(RuleShape::Above, MassBound::Two, false, MassBound::Infinity, false, true);
    case Region::I:
      if (params.p() <= 8.0) {
        return make_rule(RuleShape::None, MassBound::Zero, false, MassBound::Zero, false, true);
      }
      return make_rule(RuleShape::AllMasses, MassBound::Zero, false, MassBound::Infinity, false,
                       true);
  }
  throw std::logic_error("unreachable region");
}

bool mass_map_monotone(const Params& params) {
  const double q = params.q();
  if (params.diagonal()) return false;
  if (params.side() < 0) return q <= 4.0;
  return q >= 4.0;
}

}  // namespace dnls
