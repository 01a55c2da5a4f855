#include "eigmdp/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace eigmdp {

QuadratureRule gauss_legendre(std::size_t order) {
  if (order == 0) throw std::invalid_argument("gauss_legendre: order must be positive");
  if (order == 1) return {{0.0}, {2.0}};
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const std::size_t half = (order + 1) / 2;
  const double m = static_cast<double>(order);
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_order.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(double lo, double hi, double max_panel_length,
                                        std::size_t order) {
  if (!(hi > lo)) return {};
  if (!(max_panel_length > 0.0)) {
    throw std::invalid_argument("composite_gauss_legendre: panel length must be positive");
  }
  const QuadratureRule base = gauss_legendre(order);
  const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / max_panel_length));
  const double h = (hi - lo) / static_cast<double>(panels);
  QuadratureRule rule;
  rule.nodes.reserve(panels * order);
  rule.weights.reserve(panels * order);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = lo + (static_cast<double>(p) + 0.5) * h;
    for (std::size_t j = 0; j < order; ++j) {
      rule.nodes.push_back(mid + 0.5 * h * base.nodes[j]);
      rule.weights.push_back(0.5 * h * base.weights[j]);
    }
  }
  return rule;
}

}  // namespace eigmdp
