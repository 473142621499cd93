#pragma once

#include <dnls/params.hpp>
#include <dnls/quadrature.hpp>

#include <cmath>
#include <optional>

namespace dnls {

/// Branch coordinate t in (1, inf]. Stored as the excess s = t - 1 so that
/// t^2 - 1 = s (s + 2) keeps full precision next to t = 1. The point at
/// infinity is a tag, not a large float; it labels the lambda = 0 solution.
class BranchCoord {
 public:
  static BranchCoord from_t(double t);
  static BranchCoord from_excess(double s);
  static BranchCoord from_log_excess(double y) { return from_excess(std::exp(y)); }
  static BranchCoord infinity();

  bool is_infinite() const { return infinite_; }
  double t() const;
  double excess() const { return excess_; }
  /// t^2 - 1
  double t2m1() const { return excess_ * (excess_ + 2.0); }
  double log_t() const { return std::log1p(excess_); }
  double log_t2m1() const { return std::log(excess_) + std::log(excess_ + 2.0); }
  /// acosh(t), the upper limit after the substitution s = cosh(theta)
  double theta() const;
  /// acoth(t)
  double acoth() const;

 private:
  BranchCoord(double s, bool inf) : excess_(s), infinite_(inf) {}
  double excess_;
  bool infinite_;
};

struct ScalarEval {
  double value = 0.0;
  double abs_error_estimate = 0.0;
};

/// Exponent (q-2)/(p-2) of t^2 - 1 in f.
double f_exponent(const Params& params);

/// f(t) = t / (t^2 - 1)^((q-2)/(p-2)).
double f_of_t(const Params& params, BranchCoord t);
double f_of_t(const Params& params, double t);
double log_f_of_t(const Params& params, BranchCoord t);

/// f'(t) = ((p+2-2q)/(p-2) t^2 - 1) / (t^2 - 1)^((p+q-4)/(p-2)).
double f_prime(const Params& params, BranchCoord t);
double f_prime(const Params& params, double t);

/// Right-hand side g(lambda) of the matching condition f(t) = g(lambda):
/// g = coefficient * lambda^exponent. On the diagonal the exponent is zero and
/// the object reports itself constant, so callers can branch on the structure.
class MatchingRhs {
 public:
  explicit MatchingRhs(const Params& params);

  bool is_constant() const { return constant_; }
  double coefficient() const { return coefficient_; }
  double exponent() const { return exponent_; }

  double operator()(double lambda) const;
  double log_value(double lambda) const;
  /// lambda with g(lambda) = exp(log_g); undefined for the constant case.
  double inverse_log(double log_g) const;

 private:
  double coefficient_;
  double exponent_;
  bool constant_;
};

double g_of_lambda(const Params& params, double lambda);

/// I(t) = int_1^t (s^2 - 1)^((4-p)/(p-2)) ds. Computed after s = cosh(theta)
/// as int_0^acosh(t) sinh(theta)^((6-p)/(p-2)) d theta. t = inf only for p > 6.
ScalarEval I_of_t(const Params& params, BranchCoord t, const QuadOptions& opt = {});
ScalarEval I_of_t(const Params& params, double t, const QuadOptions& opt = {});

/// Natural log of I(t); avoids overflow for p close to 2 or very large t.
struct LogEval {
  double log_value = 0.0;
  double rel_error = 0.0;
};
LogEval log_I_of_t(const Params& params, BranchCoord t, const QuadOptions& opt = {});

/// J(t) = int_1^t (s^2 - 1)^(2/(p-2)) ds, the regular integral behind the bulk
/// energy of a branch solution.
LogEval log_J_of_t(const Params& params, BranchCoord t, const QuadOptions& opt = {});

/// Monotonicity function h(t); sign(h) = sign(mu'(t)).
ScalarEval h_of_t(const Params& params, BranchCoord t);
ScalarEval h_of_t(const Params& params, double t);

struct Constants {
  double C_pq;
  double c_p;
  std::optional<double> mu0;
};

double C_pq(const Params& params);
double log_C_pq(const Params& params);
double c_p(double p);
std::optional<double> mu0(const Params& params);
Constants constants(const Params& params);

/// Fault injection for mutation testing of the verification battery: scales
/// every use of C_pq. Defaults to 1. Not meant for production use.
void set_cpq_tamper_factor(double factor);
double cpq_tamper_factor();

}  // namespace dnls
