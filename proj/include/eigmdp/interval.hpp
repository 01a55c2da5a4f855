#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace eigmdp {

/// Real interval [lower, upper) with either end allowed to be infinite.
///
/// Finite endpoints follow a single global convention: the lower end is
/// closed and the upper end is open, so [y, inf) counts every value >= y.
class Interval {
 public:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  Interval(double lower, double upper) : lower_(lower), upper_(upper) {
    if (std::isnan(lower) || std::isnan(upper)) {
      throw std::invalid_argument("Interval: NaN endpoint");
    }
    if (lower > upper) {
      throw std::invalid_argument("Interval: lower endpoint exceeds upper endpoint");
    }
  }

  static Interval whole_line() { return {-kInf, kInf}; }
  static Interval at_least(double y) { return {y, kInf}; }
  static Interval below(double y) { return {-kInf, y}; }

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

  bool contains(double x) const noexcept { return x >= lower_ && x < upper_; }
  bool is_whole_line() const noexcept { return std::isinf(lower_) && std::isinf(upper_); }
  bool is_bounded() const noexcept { return std::isfinite(lower_) && std::isfinite(upper_); }
  bool is_empty() const noexcept { return !(lower_ < upper_); }

  /// Multiplies both endpoints by a positive factor.
  Interval scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
      throw std::invalid_argument("Interval::scaled: factor must be positive and finite");
    }
    return {lower_ * factor, upper_ * factor};
  }

  bool subset_of(const Interval& other) const noexcept {
    return is_empty() || (other.lower_ <= lower_ && upper_ <= other.upper_);
  }

  std::string to_string() const;

 private:
  double lower_;
  double upper_;
};

inline std::string format_endpoint(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string Interval::to_string() const {
  return "[" + format_endpoint(lower_) + ", " + format_endpoint(upper_) + ")";
}

}  // namespace eigmdp
