#include "ruinlab/quadrature.hpp"

namespace ruinlab {

std::vector<double> partition(double a, double b, std::span<const double> breakpoints) {
  std::vector<double> pts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) pts.push_back(p);
  }
  pts.push_back(b);
  std::sort(pts.begin() + 1, pts.end() - 1);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace ruinlab
