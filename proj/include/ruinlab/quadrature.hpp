#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.
//
// The interval with the largest error estimate is bisected until the summed
// error estimate drops below max(abs_tol, rel_tol * |integral|). Breakpoints
// seed the initial partition so that known kinks (support edges, rate
// discontinuities) never fall inside a panel.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "ruinlab/errors.hpp"

namespace ruinlab {

struct QuadratureOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-9;
  int max_intervals = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  int evaluations = 0;
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}


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

// Gauss weights for nodes kKronrodNodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& o) const noexcept { return error < o.error; }
};

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kKronrodWeights[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Integrates f over [points.front(), points.back()], with the interior
/// points as initial panel boundaries. Throws NumericalError when the panel
/// budget is exhausted before the tolerance is met, or when f is not finite.
template <class F>
QuadratureResult integrate(F&& f, std::span<const double> points, const QuadratureOptions& opts = {}) {
  if (points.size() < 2) throw DomainError("integrate: need at least two points");
  std::priority_queue<detail::Panel> heap;
  QuadratureResult result;
  double total = 0.0;
  double total_err = 0.0;
  double frozen_value = 0.0;
  double frozen_err = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double a = points[i];
    const double b = points[i + 1];
    if (!(b >= a)) throw DomainError("integrate: points must be nondecreasing");
    if (b == a) continue;
    const auto panel = detail::gauss_kronrod_15(f, a, b);
    result.evaluations += 15;
    total += panel.value;
    total_err += panel.error;
    heap.push(panel);
  }
  result.intervals = static_cast<int>(heap.size());
  auto tolerance = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
  while (!heap.empty() && total_err > tolerance()) {
    if (!std::isfinite(total) || !std::isfinite(total_err)) {
      throw NumericalError("integrate: integrand produced a non-finite value", total_err);
    }
    if (result.intervals >= opts.max_intervals) {
      throw NumericalError("integrate: panel budget exhausted, achieved error " +
                               detail::sci(total_err) + " vs tolerance " + detail::sci(tolerance()),
                           total_err);
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Panel is at machine resolution; accept it as is.
      total_err -= worst.error;
      frozen_value += worst.value;
      frozen_err += worst.error;
      continue;
    }
    const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
    const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
    result.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++result.intervals;
  }
  if (!std::isfinite(total)) {
    throw NumericalError("integrate: integrand produced a non-finite value", total_err);
  }
  // Recompute from the panels to shed accumulated cancellation error.
  double value = frozen_value;
  double err = frozen_err;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  result.value = value;
  result.error = std::max(err, 0.0);
  return result;
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
  const std::array<double, 2> pts{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(pts), opts);
}

/// Sorted, deduplicated partition of [a, b] that includes every breakpoint
/// strictly inside the interval.
std::vector<double> partition(double a, double b, std::span<const double> breakpoints);

}  // namespace ruinlab
