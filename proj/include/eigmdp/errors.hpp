#pragma once

#include <stdexcept>

namespace eigmdp {

/// A numerical procedure failed to reach its declared accuracy
/// (eigensolver non-convergence, quadrature drift, out-of-range kernel
/// eigenvalues).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eigmdp
