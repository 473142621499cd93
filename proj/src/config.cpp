#include <dnls/config.hpp>

#include <stdexcept>

namespace dnls {

void RunConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
  };
  positive(quadrature_abs, "quadrature_abs");
  positive(root_rel, "root_rel");
  positive(residual_rel, "residual_rel");
  positive(oracle_rel, "oracle_rel");
  if (t_scan_points < 16) throw std::invalid_argument("t_scan_points must be >= 16");
  if (mu_grid < 2) throw std::invalid_argument("mu_grid must be >= 2");
  if (oracle_n < 2) throw std::invalid_argument("oracle_n must be >= 2");
  if (oracle_L < 0.0) throw std::invalid_argument("oracle_L must be >= 0 (0 = automatic)");
  if (format != "csv" && format != "json") throw std::invalid_argument("format must be csv or json");
  if (precision < 1 || precision > 17) throw std::invalid_argument("precision must be in 1..17");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["quadrature_abs"] = quadrature_abs;
  j["root_rel"] = root_rel;
  j["residual_rel"] = residual_rel;
  j["oracle_rel"] = oracle_rel;
  j["t_scan_points"] = t_scan_points;
  j["mu_grid"] = mu_grid;
  j["oracle_n"] = oracle_n;
  j["oracle_L"] = oracle_L;
  j["format"] = format;
  j["precision"] = precision;
  j["output"] = output;
  j["jobs"] = jobs;
  return j;
}

const std::map<std::string, std::string>& check_statements() {
  static const std::map<std::string, std::string> m = {
      {"exact-branch",
       "(p,q) = (4,5/2): lambda_bar = 1/32; at lambda = 3/128 the branch roots are t = 2/sqrt(3) "
       "and t = 2; mu(2) = sqrt(6)/4; mu0 = sqrt(2)"},
      {"multiplicity-window",
       "(4,7/2): mu(t) has its minimum 16 sqrt(6)/9 at t = 2; two normalized solutions above it, "
       "none below"},
      {"mass-two-threshold",
       "q = 4: mu(t) -> 2 as t -> 1+; for p > 6 a normalized solution exists iff mu > 2 and is unique"},
      {"diagonal",
       "q = p/2 + 1: solutions exist iff p > 8, at the fixed t = sqrt(p/(p-8)); "
       "mu(lambda) is a power of lambda with exponent (6-p)/(2(p-2)); branch energies are positive"},
      {"oracle-equivalence",
       "closed-form branch solutions solve u'' = lambda u + u^(p-1) with u'(0+) = -u(0)^(q-1)/2, "
       "and their mass and energy are the grid integrals of the profile"},
      {"energy-shape",
       "the ground-state level is non-positive and non-increasing; constant in mu on mu >= mu0 "
       "below the diagonal for p < 6; saturating for p >= 6, q < 4; concave then convex"},
      {"multiplier-identity", "dE/dmu = -lambda(mu)/2 where the level is attained"},
      {"unboundedness",
       "the level is -inf when q > max{4, p/2 + 1}, or q = 4 and mu > 2; finite when q < max{4, p/2 + 1}"},
      {"gagliardo-nirenberg", "|u|_inf^2 <= |u|_2 |u'|_2 on the real line"},
      {"monotonicity",
       "sign of mu'(t) equals sign of h(t); h > 0 below the diagonal for q <= 4 and above it for "
       "q >= 4; for (4,7/2) h = ((q-3)t - 1)/((q-3)(t+1))"},
      {"mass-consistency",
       "mu(t) = C_pq f(t)^((6-p)/(2q-p-2)) I(t) equals the squared L2 norm of the branch profile"},
      {"classification", "the nine regions A..I partition {p > 2, q > 2}"},
  };
  return m;
}

}  // namespace dnls
