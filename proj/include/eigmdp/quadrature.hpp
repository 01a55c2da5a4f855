#pragma once

#include <cstddef>
#include <vector>

namespace eigmdp {

/// Nodes and weights of a quadrature rule on some interval.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Gauss-Legendre rule of the given order on [-1, 1].
QuadratureRule gauss_legendre(std::size_t order);

/// Composite Gauss-Legendre rule on [lo, hi]: the interval is cut into
/// ceil((hi - lo) / max_panel_length) equal panels, each carrying `order`
/// nodes.
QuadratureRule composite_gauss_legendre(double lo, double hi, double max_panel_length,
                                        std::size_t order);

}  // namespace eigmdp
