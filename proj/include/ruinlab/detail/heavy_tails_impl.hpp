#pragma once

#include <cmath>

#include "ruinlab/quadrature.hpp"

namespace ruinlab {

template <class G>
double integrate_against(const TailDistribution& d, double lo, double hi, G&& g, double abs_tol,
                         double rel_tol) {
  lo = std::max(lo, d.support_min());
  if (!(hi > lo)) return 0.0;
  const double v_hi = d.tail(lo);
  const double v_lo = d.tail(hi);
  if (!(v_hi > v_lo)) return 0.0;
  auto integrand = [&](double v) { return g(d.inverse_tail(v)); };
  // Geometric breakpoints in v keep panels resolved when v_lo is tiny.
  std::vector<double> pts{v_lo};
  if (v_lo > 0.0) {
    for (double p = v_lo * 16.0; p < v_hi; p *= 16.0) pts.push_back(p);
  }
  pts.push_back(v_hi);
  QuadratureOptions opts;
  opts.abs_tol = abs_tol;
  opts.rel_tol = rel_tol;
  opts.max_intervals = 20000;
  return integrate(integrand, std::span<const double>(pts), opts).value;
}

}  // namespace ruinlab
