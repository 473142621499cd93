#include <dnls/algebra.hpp>

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dnls {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.693147180559945309417232121458;

std::atomic<double> g_cpq_tamper{1.0};

void require_off_diagonal(const Params& params, const char* what) {
  if (params.diagonal()) {
    throw std::domain_error(std::string(what) + " is undefined on the diagonal q = p/2 + 1");
  }
}

void require_finite(BranchCoord t, const char* what) {
  if (t.is_infinite()) throw std::domain_error(std::string(what) + " requires finite t");
}

double log_sinh(double x) {
  if (x < 20.0) return std::log(std::sinh(x));
  return x - kLn2 + std::log1p(-std::exp(-2.0 * x));
}

// log(sinh(x) / x), smooth and even
double log_sinhc(double x) {
  if (x < 1e-4) {
    const double x2 = x * x;
    return x2 / 6.0 - x2 * x2 / 180.0;
  }
  return log_sinh(x) - std::log(x);
}

// log of int_0^upper sinh(theta)^e d theta, e > -1, upper in (0, inf].
// Tolerances are relative. For e < 1 the head [0, min(upper, 1)] is graded
// towards theta = 0, which absorbs the theta^e endpoint factor; this matters
// most for e near 0 (p near 6), where theta^e is almost a step.
LogEval log_integral_sinh_power(double e, double upper, const QuadOptions& opt) {
  LogEval out;
  if (e == 0.0) {
    out.log_value = std::log(upper);
    return out;
  }
  if (e > 0.0 && std::isinf(upper)) {
    throw std::domain_error("integral diverges for infinite upper limit");
  }
  QuadOptions rel = opt;
  rel.abs_tol = 0.0;
  rel.rel_tol = std::max(1e-13, 0.01 * opt.rel_tol);

  if (e >= 1.0) {
    // bounded integrand, normalised by its value at the top
    const double shift = e * log_sinh(upper);
    auto integrand = [=](double th) { return std::exp(e * log_sinh(th) - shift); };
    const QuadResult r = integrate(integrand, 0.0, upper, rel);
    out.log_value = shift + std::log(r.value);
    out.rel_error = r.abs_error / r.value;
    return out;
  }

  // theta = cut v^k leaves the factor v^(k(e+1)-1), of degree at least 3
  const double cut = std::min(upper, 1.0);
  const double k = std::ceil(4.0 / (e + 1.0));
  const double log_pref = std::log(k) + (e + 1.0) * std::log(cut);
  auto graded = [=](double v) {
    const double lv = std::log(v);
    const double th = cut * std::exp(k * lv);
    return std::exp(log_pref + (k * (e + 1.0) - 1.0) * lv + e * log_sinhc(th));
  };
  const QuadResult head = integrate(graded, 0.0, 1.0, rel);
  double value = head.value;
  double err = head.abs_error;
  if (upper > cut) {
    constexpr double kTailStart = 40.0;
    const double top = std::isinf(upper) ? kTailStart : upper;
    auto body_integrand = [=](double th) { return std::exp(e * log_sinh(th)); };
    const QuadResult body = integrate(body_integrand, cut, top, rel);
    value += body.value;
    err += body.abs_error;
    if (std::isinf(upper)) {
      // sinh^e = 2^-e e^(e theta) (1 - e^(-2 theta))^e; the last factor is 1 to O(e^-80)
      value += std::exp(-e * kLn2 + e * kTailStart) / (-e);
    }
  }
  out.log_value = std::log(value);
  out.rel_error = err / value;
  return out;
}

}  // namespace

BranchCoord BranchCoord::from_t(double t) {
  if (std::isinf(t) && t > 0) return infinity();
  if (!(t > 1.0)) throw std::domain_error("branch coordinate requires t > 1");
  return BranchCoord(t - 1.0, false);
}

BranchCoord BranchCoord::from_excess(double s) {
  if (std::isinf(s) && s > 0) return infinity();
  if (!(s > 0.0)) throw std::domain_error("branch coordinate requires t - 1 > 0");
  return BranchCoord(s, false);
}

BranchCoord BranchCoord::infinity() { return BranchCoord(kInf, true); }

double BranchCoord::t() const { return infinite_ ? kInf : 1.0 + excess_; }

double BranchCoord::theta() const {
  if (infinite_) return kInf;
  return std::log1p(excess_ + std::sqrt(t2m1()));
}

double BranchCoord::acoth() const {
  if (infinite_) return 0.0;
  return 0.5 * std::log1p(2.0 / excess_);
}

double f_exponent(const Params& params) { return (params.q() - 2.0) / (params.p() - 2.0); }

double log_f_of_t(const Params& params, BranchCoord t) {
  require_finite(t, "f(t)");
  return t.log_t() - f_exponent(params) * t.log_t2m1();
}

double f_of_t(const Params& params, BranchCoord t) { return std::exp(log_f_of_t(params, t)); }

double f_of_t(const Params& params, double t) { return f_of_t(params, BranchCoord::from_t(t)); }

double f_prime(const Params& params, BranchCoord t) {
  require_finite(t, "f'(t)");
  const double p = params.p(), q = params.q();
  const double tt = t.t();
  const double num = (p + 2.0 - 2.0 * q) / (p - 2.0) * tt * tt - 1.0;
  return num * std::exp(-(p + q - 4.0) / (p - 2.0) * t.log_t2m1());
}

double f_prime(const Params& params, double t) { return f_prime(params, BranchCoord::from_t(t)); }

MatchingRhs::MatchingRhs(const Params& params) {
  const double p = params.p(), q = params.q();
  coefficient_ = 0.5 * std::pow(p / 2.0, f_exponent(params));
  constant_ = params.diagonal();
  exponent_ = constant_ ? 0.0 : (2.0 * q - p - 2.0) / (2.0 * (p - 2.0));
  if (constant_) coefficient_ = std::sqrt(p) / (2.0 * std::sqrt(2.0));
}

double MatchingRhs::operator()(double lambda) const {
  if (!(lambda > 0.0)) throw std::domain_error("g(lambda) requires lambda > 0");
  if (constant_) return coefficient_;
  return coefficient_ * std::pow(lambda, exponent_);
}

double MatchingRhs::log_value(double lambda) const {
  if (!(lambda > 0.0)) throw std::domain_error("g(lambda) requires lambda > 0");
  return std::log(coefficient_) + exponent_ * std::log(lambda);
}

double MatchingRhs::inverse_log(double log_g) const {
  if (constant_) throw std::domain_error("g is constant on the diagonal and cannot be inverted");
  return std::exp((log_g - std::log(coefficient_)) / exponent_);
}

double g_of_lambda(const Params& params, double lambda) { return MatchingRhs(params)(lambda); }

LogEval log_I_of_t(const Params& params, BranchCoord t, const QuadOptions& opt) {
  const double p = params.p();
  if (t.is_infinite() && !(p > 6.0)) {
    throw std::domain_error("I(inf) diverges for p <= 6");
  }
  if (p == 4.0) return {std::log(t.excess()), 0.0};
  if (p == 6.0) return {std::log(t.theta()), 0.0};
  return log_integral_sinh_power((6.0 - p) / (p - 2.0), t.theta(), opt);
}

ScalarEval I_of_t(const Params& params, BranchCoord t, const QuadOptions& opt) {
  const LogEval l = log_I_of_t(params, t, opt);
  const double v = std::exp(l.log_value);
  return {v, v * l.rel_error};
}

ScalarEval I_of_t(const Params& params, double t, const QuadOptions& opt) {
  return I_of_t(params, BranchCoord::from_t(t), opt);
}

LogEval log_J_of_t(const Params& params, BranchCoord t, const QuadOptions& opt) {
  require_finite(t, "J(t)");
  const double p = params.p();
  return log_integral_sinh_power((p + 2.0) / (p - 2.0), t.theta(), opt);
}

namespace {

constexpr double kSeriesStart = 8.0;

// For p < 6 the two terms of h are each ~ t and cancel to O(1/t). With
// m = 2/(p-2) and x = 1/t^2, I(t) = K + t^(2m-1) S(x) where
// S = sum_k binom(m-1, k) (-x)^k / (2m-1-2k), and
// h = -t sum_{j>=1} a_j x^j - (2m-1) K t^(2-2m) W(x) with
// W = (1 - crit x)(1 - x)^-m and sum_j a_j x^j = (2m-1) W S, a_0 = 1.
// Returns nullopt when some 2m-1-2k vanishes (a log term appears).
std::optional<ScalarEval> h_large_t(const Params& params, BranchCoord t, const QuadOptions& tight) {
  const double p = params.p(), q = params.q();
  const double m = 2.0 / (p - 2.0);
  const double crit = (p - 2.0) / (p + 2.0 - 2.0 * q);
  constexpr int kTerms = 48;
  double s[kTerms], w[kTerms];
  double binom_s = 1.0, binom_w = 1.0, prev_b = 0.0;
  for (int k = 0; k < kTerms; ++k) {
    const double den = 2.0 * m - 1.0 - 2.0 * k;
    if (std::fabs(den) < 1e-8) return std::nullopt;
    s[k] = binom_s / den;
    binom_s *= -(m - 1.0 - k) / (k + 1.0);
    w[k] = binom_w - crit * prev_b;
    prev_b = binom_w;
    binom_w *= (m + k) / (k + 1.0);
  }
  auto series = [&](double x, double* a) {
    for (int j = 0; j < kTerms; ++j) {
      double c = 0.0;
      for (int i = 0; i <= j; ++i) c += w[i] * s[j - i];
      a[j] = (2.0 * m - 1.0) * c;
    }
    double S = 0.0, W = 0.0, xp = 1.0;
    for (int k = 0; k < kTerms; ++k, xp *= x) {
      S += s[k] * xp;
      W += w[k] * xp;
    }
    return std::pair{S, W};
  };
  double a[kTerms];
  const double t0 = kSeriesStart;
  const auto [S0, W0] = series(1.0 / (t0 * t0), a);
  (void)W0;
  const LogEval li0 = log_I_of_t(params, BranchCoord::from_t(t0), tight);
  const double I0 = std::exp(li0.log_value);
  const double K = I0 - std::pow(t0, 2.0 * m - 1.0) * S0;

  const double tt = t.t();
  const double x = 1.0 / (tt * tt);
  const auto [S, W] = series(x, a);
  (void)S;
  double tail = 0.0, xp = x;
  for (int j = 1; j < kTerms; ++j, xp *= x) {
    const double term = a[j] * xp;
    tail += term;
    if (std::fabs(term) < 1e-20 * std::fabs(tail)) break;
  }
  const double lead = -tt * tail;
  const double kterm = -(2.0 * m - 1.0) * K * std::pow(tt, 2.0 - 2.0 * m) * W;
  const double err = std::fabs((2.0 * m - 1.0) * std::pow(tt, 2.0 - 2.0 * m) * W) * I0 *
                         std::max(li0.rel_error, 1e-15) +
                     1e-15 * (std::fabs(lead) + std::fabs(kterm));
  return ScalarEval{lead + kterm, err};
}

}  // namespace

ScalarEval h_of_t(const Params& params, BranchCoord t) {
  require_off_diagonal(params, "h(t)");
  require_finite(t, "h(t)");
  const double p = params.p(), q = params.q();
  QuadOptions tight;
  tight.abs_tol = 0.0;
  tight.rel_tol = 1e-13;
  if (p < 6.0 && t.t() >= kSeriesStart) {
    if (auto h = h_large_t(params, t, tight)) return *h;
  }
  const LogEval li = log_I_of_t(params, t, tight);
  const double tt = t.t();
  const double crit = (p - 2.0) / (p + 2.0 - 2.0 * q);
  const double ratio = std::exp(li.log_value - 2.0 / (p - 2.0) * t.log_t2m1());
  const double term = (6.0 - p) / (p - 2.0) * (crit - tt * tt) * ratio;
  return {term + tt, std::fabs(term) * li.rel_error};
}

ScalarEval h_of_t(const Params& params, double t) { return h_of_t(params, BranchCoord::from_t(t)); }

double log_C_pq(const Params& params) {
  require_off_diagonal(params, "C_pq");
  const double p = params.p(), q = params.q();
  const double d = 2.0 * q - p - 2.0;
  return 3.0 * (q - p + 2.0) / d * kLn2 + (q - 4.0) / d * std::log(p) - std::log(p - 2.0) +
         std::log(g_cpq_tamper.load());
}

double C_pq(const Params& params) { return std::exp(log_C_pq(params)); }

double c_p(double p) {
  if (!(p > 2.0)) throw std::domain_error("c_p requires p > 2");
  return std::pow(std::sqrt(2.0 * p) / (p - 2.0), 2.0 / (p - 2.0));
}

std::optional<double> mu0(const Params& params) {
  require_off_diagonal(params, "mu0");
  const double p = params.p();
  if (!(p < 6.0)) return std::nullopt;
  return (p - 2.0) / (6.0 - p) * C_pq(params);
}

Constants constants(const Params& params) {
  return {C_pq(params), c_p(params.p()), mu0(params)};
}

void set_cpq_tamper_factor(double factor) { g_cpq_tamper.store(factor); }
double cpq_tamper_factor() { return g_cpq_tamper.load(); }

}  // namespace dnls
