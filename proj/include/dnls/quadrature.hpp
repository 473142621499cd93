#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace dnls {

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_panels = 4000;
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int panels = 0;
  bool converged = true;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[j];
    const double sum = f(c - dx) + f(c + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  kronrod *= h;
  gauss *= h;
  // QUADPACK-style scaling of |K - G|, floored at a few ulps of the panel value
  const double scale = std::max(std::fabs(kronrod), 1e-300);
  double err = std::fabs(kronrod - gauss);
  err *= std::min(1.0, std::pow(200.0 * err / scale, 1.5));
  err = std::max(err, 50.0 * 2.22e-16 * std::fabs(kronrod));
  return {a, b, kronrod, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f on [a, b]. The
/// largest-error panel is bisected until the summed error estimate drops
/// below max(abs_tol, rel_tol * |value|). Endpoints are never sampled.
template <class F>
QuadResult integrate(const F& f, double a, double b, const QuadOptions& opt = {}) {
  QuadResult out;
  if (a == b) return out;
  std::priority_queue<detail::Panel> heap;
  detail::Panel first = detail::gk15(f, a, b);
  heap.push(first);
  double value = first.value;
  double error = first.error;
  int panels = 1;
  while (error > std::max(opt.abs_tol, opt.rel_tol * std::fabs(value))) {
    if (panels >= opt.max_panels) {
      out.converged = false;
      break;
    }
    detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // panel no longer divisible in floating point
      heap.push(worst);
      out.converged = false;
      break;
    }
    detail::Panel left = detail::gk15(f, worst.a, mid);
    detail::Panel right = detail::gk15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // re-sum to shed accumulated cancellation in the running totals
  double v = 0.0, e = 0.0;
  std::vector<detail::Panel> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  for (const auto& pnl : all) {
    v += pnl.value;
    e += pnl.error;
  }
  out.value = v;
  out.abs_error = e;
  out.panels = panels;
  return out;
}

}  // namespace dnls
