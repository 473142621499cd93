#pragma once

// Brute-force references shared by the test binaries. Nothing here calls the
// library's quadrature.

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracle {

// Midpoint rule for int_0^U sinh(theta)^e d theta on the graded mesh
// theta = U v^k, with k large enough that the theta^e endpoint becomes the
// factor v^(k(e+1)-1) of degree at least 2.
inline double graded_sinh_power(double e, double U, long panels,
                                const std::function<double(double)>& weight = nullptr) {
  const double k = std::max(1.0, std::ceil(3.0 / (e + 1.0)));
  const double h = 1.0 / static_cast<double>(panels);
  double sum = 0.0;
  for (long i = 0; i < panels; ++i) {
    const double v = (i + 0.5) * h;
    const double th = U * std::pow(v, k);
    double w = k * U * std::pow(v, k - 1) * std::pow(std::sinh(th), e);
    if (weight) w *= weight(th);
    sum += w;
  }
  return sum * h;
}

inline double midpoint(const std::function<double(double)>& f, double a, double b, long panels) {
  const double h = (b - a) / static_cast<double>(panels);
  double sum = 0.0;
  for (long i = 0; i < panels; ++i) sum += f(a + (i + 0.5) * h);
  return sum * h;
}

// One Richardson step on the midpoint rule, cancelling its h^2 error term.
inline double midpoint_extrapolated(const std::function<double(double)>& f, double a, double b,
                                    long panels) {
  return (4.0 * midpoint(f, a, b, 2 * panels) - midpoint(f, a, b, panels)) / 3.0;
}

inline bool rel_close(double a, double b, double rel) {
  return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace oracle
