#include "eigmdp/dpp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "eigmdp/errors.hpp"
#include "eigmdp/quadrature.hpp"

namespace eigmdp {
namespace {

constexpr double kPanelOrder = 8;
constexpr double kStabilizationTolerance = 1e-8;
constexpr double kDriftTolerance = 1e-7;
constexpr double kEtaSlack = 1e-8;
constexpr double kNegligibleEta = 1e-12;
constexpr int kMaxRefinements = 6;
constexpr double kRescale = 1e150;
const double kLogRescale = std::log(kRescale);

// Writes Psi_0(x)..Psi_{count-1}(x) to out[0], out[stride], ...
void fill_wavefunctions(std::size_t count, double x, double* out, std::ptrdiff_t stride) {
  if (count == 0) return;
  // Psi_k = value_k * exp(log_scale); value is rescaled whenever it grows
  // large so that the Gaussian factor never underflows prematurely.
  double log_scale = -0.25 * x * x - 0.25 * std::log(2.0 * std::numbers::pi);
  double previous = 0.0;
  double current = 1.0;
  const auto emit = [&](std::size_t k) {
    out[static_cast<std::ptrdiff_t>(k) * stride] =
        current == 0.0 ? 0.0
                       : std::copysign(std::exp(log_scale + std::log(std::abs(current))), current);
  };
  emit(0);
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const double kk = static_cast<double>(k);
    const double next = (x * current - std::sqrt(kk) * previous) / std::sqrt(kk + 1.0);
    previous = current;
    current = next;
    if (std::abs(current) > kRescale) {
      current /= kRescale;
      previous /= kRescale;
      log_scale += kLogRescale;
    }
    emit(k + 1);
  }
}

std::vector<double> gram_eigenvalues(std::size_t n, double lo, double hi, double panel_length,
                                     std::size_t* node_count) {
  const auto size = static_cast<Eigen::Index>(n);
  const QuadratureRule rule =
      composite_gauss_legendre(lo, hi, panel_length, static_cast<std::size_t>(kPanelOrder));
  *node_count = rule.size();
  if (rule.size() == 0) return std::vector<double>(n, 0.0);

  // Row m holds sqrt(w_m) Psi_k(x_m); Gram = Phi^T Phi.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> phi(
      static_cast<Eigen::Index>(rule.size()), size);
  for (std::size_t m = 0; m < rule.size(); ++m) {
    double* row = phi.data() + static_cast<std::ptrdiff_t>(m) * size;
    fill_wavefunctions(n, rule.nodes[m], row, 1);
    const double root_weight = std::sqrt(rule.weights[m]);
    for (Eigen::Index k = 0; k < size; ++k) row[k] *= root_weight;
  }
  Eigen::MatrixXd gram(size, size);
  gram.noalias() = phi.transpose() * phi;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("restrict_kernel: Gram eigensolver did not converge");
  }
  const Eigen::VectorXd& ev = solver.eigenvalues();
  std::vector<double> values(ev.data(), ev.data() + ev.size());
  std::sort(values.begin(), values.end());
  return values;
}

double threshold_slack(double threshold) { return 1e-9 * std::max(1.0, std::abs(threshold)); }

void require_rate_arguments(double xi, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::domain_error("rate: a must be positive");
  if (xi == 0.0 || !std::isfinite(xi)) throw std::domain_error("rate: xi must be finite and nonzero");
}

double log_sum_exp_accumulate(double acc, double term) {
  if (acc == -std::numeric_limits<double>::infinity()) return term;
  if (term > acc) std::swap(acc, term);
  return acc + std::log1p(std::exp(term - acc));
}

}  // namespace

std::vector<double> oscillator_wavefunctions(std::size_t max_degree, double x) {
  if (!std::isfinite(x)) throw std::domain_error("oscillator_wavefunctions: non-finite x");
  std::vector<double> out(max_degree + 1);
  fill_wavefunctions(max_degree + 1, x, out.data(), 1);
  return out;
}

double gue_kernel(std::size_t n, double x, double y) {
  if (n == 0) throw std::invalid_argument("gue_kernel: n must be >= 1");
  const auto px = oscillator_wavefunctions(n - 1, x);
  const auto py = oscillator_wavefunctions(n - 1, y);
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += px[k] * py[k];
  return sum;
}

double KernelRestriction::eta_sum() const noexcept {
  double s = 0.0;
  for (double e : etas) s += e;
  return s;
}

KernelRestriction restrict_kernel(std::size_t n, const Interval& raw_interval) {
  if (n == 0) throw std::invalid_argument("restrict_kernel: n must be >= 1");
  KernelRestriction result;
  result.n = n;
  result.interval = raw_interval;
  const double root = std::sqrt(static_cast<double>(n));
  const double box = 2.0 * root + 4.0;
  result.quadrature.box_lower = -box;
  result.quadrature.box_upper = box;

  double lo = std::max(raw_interval.lower(), -box);
  double hi = std::min(raw_interval.upper(), box);
  if (raw_interval.is_empty() || !(hi > lo)) {
    result.etas.assign(n, 0.0);
    return result;
  }

  const bool half_line = !raw_interval.is_whole_line() && !raw_interval.is_bounded();
  if (half_line) {
    if (std::isinf(raw_interval.upper()) && lo + box < box - lo) {
      result.quadrature.complement_used = true;
      hi = lo;
      lo = -box;
    } else if (std::isinf(raw_interval.lower()) && box - hi < hi + box) {
      result.quadrature.complement_used = true;
      lo = hi;
      hi = box;
    }
  }

  double panel = std::numbers::pi / (2.0 * root);
  std::size_t nodes = 0;
  std::vector<double> previous = gram_eigenvalues(n, lo, hi, panel, &nodes);
  std::vector<double> current;
  double residual = std::numeric_limits<double>::infinity();
  int refinements = 0;
  while (refinements < kMaxRefinements) {
    panel *= 0.5;
    ++refinements;
    current = gram_eigenvalues(n, lo, hi, panel, &nodes);
    residual = 0.0;
    double trace_previous = 0.0;
    double trace_current = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      residual = std::max(residual, std::abs(current[k] - previous[k]));
      trace_previous += previous[k];
      trace_current += current[k];
    }
    residual = std::max(residual, std::abs(trace_current - trace_previous));
    previous = current;
    if (residual <= kStabilizationTolerance) break;
  }
  if (residual > kDriftTolerance) {
    throw NumericalError("restrict_kernel: quadrature did not stabilize");
  }

  std::vector<double> etas = std::move(current);
  if (result.quadrature.complement_used) {
    for (double& e : etas) e = 1.0 - e;
  }
  for (double& e : etas) {
    if (e < -kEtaSlack || e > 1.0 + kEtaSlack) {
      throw NumericalError("restrict_kernel: kernel eigenvalue outside [0, 1]");
    }
    e = std::clamp(e, 0.0, 1.0);
  }
  std::sort(etas.begin(), etas.end());
  result.etas = std::move(etas);
  result.quadrature.nodes = nodes;
  result.quadrature.refinements = refinements;
  result.quadrature.stabilization_residual = residual;
  return result;
}

double PoissonBinomial::upper_tail(std::size_t k) const noexcept {
  double sum = 0.0;
  for (std::size_t j = pmf_.size(); j > k; --j) sum += pmf_[j - 1];
  return sum;
}

double PoissonBinomial::lower_tail(std::size_t k) const noexcept {
  double sum = 0.0;
  const std::size_t last = std::min(k + 1, pmf_.size());
  for (std::size_t j = 0; j < last; ++j) sum += pmf_[j];
  return sum;
}

PoissonBinomial poisson_binomial(std::span<const double> etas) {
  PoissonBinomial law;
  law.etas_.assign(etas.begin(), etas.end());
  std::size_t shift = 0;
  std::vector<double> active;
  for (double e : etas) {
    if (!(e >= 0.0 && e <= 1.0)) {
      throw std::domain_error("poisson_binomial: parameters must lie in [0, 1]");
    }
    law.mean_ += e;
    law.variance_ += e * (1.0 - e);
    if (e > 1.0 - kNegligibleEta) {
      ++shift;
    } else if (e >= kNegligibleEta) {
      active.push_back(e);
    }
  }

  std::vector<double> dp(active.size() + 1, 0.0);
  dp[0] = 1.0;
  std::size_t used = 0;
  for (double e : active) {
    ++used;
    for (std::size_t k = used; k > 0; --k) dp[k] = dp[k] * (1.0 - e) + dp[k - 1] * e;
    dp[0] *= 1.0 - e;
  }

  law.pmf_.assign(etas.size() + 1, 0.0);
  std::copy(dp.begin(), dp.end(), law.pmf_.begin() + static_cast<std::ptrdiff_t>(shift));
  return law;
}

PoissonBinomial counting_law_gue(std::size_t n, const Interval& normalized_interval) {
  const double root = std::sqrt(static_cast<double>(n));
  const KernelRestriction restriction = restrict_kernel(n, normalized_interval.scaled(root));
  return poisson_binomial(restriction.etas);
}

double IdenticalBernoulli::log_pmf(std::uint64_t j) const {
  if (j > count) return -std::numeric_limits<double>::infinity();
  const double k = static_cast<double>(count);
  const double jj = static_cast<double>(j);
  const double log_choose = std::lgamma(k + 1.0) - std::lgamma(jj + 1.0) - std::lgamma(k - jj + 1.0);
  const double success = jj == 0.0 ? 0.0 : jj * std::log(eta);
  const double failure = k - jj == 0.0 ? 0.0 : (k - jj) * std::log1p(-eta);
  return log_choose + success + failure;
}

double exact_cgf(std::span<const double> etas, double theta, double a) {
  if (!(a > 0.0)) throw std::domain_error("exact_cgf: a must be positive");
  double eta_sum = 0.0;
  double variance = 0.0;
  for (double e : etas) {
    eta_sum += e;
    variance += e * (1.0 - e);
  }
  if (!(variance > 0.0)) throw std::domain_error("exact_cgf: degenerate law (zero variance)");
  const double u = theta * a / std::sqrt(variance);
  const double growth = std::expm1(u);
  double log_mgf = 0.0;
  for (double e : etas) log_mgf += e == 1.0 ? u : std::log1p(e * growth);
  return (log_mgf - u * eta_sum) / (a * a);
}

double exact_cgf(const PoissonBinomial& law, double theta, double a) {
  return exact_cgf(law.etas(), theta, a);
}

double exact_cgf(const IdenticalBernoulli& profile, double theta, double a) {
  if (!(a > 0.0)) throw std::domain_error("exact_cgf: a must be positive");
  if (!(profile.variance() > 0.0)) {
    throw std::domain_error("exact_cgf: degenerate law (zero variance)");
  }
  const double k = static_cast<double>(profile.count);
  const double u = theta * a / std::sqrt(profile.variance());
  return (k * std::log1p(profile.eta * std::expm1(u)) - u * k * profile.eta) / (a * a);
}

double exact_upper_rate(const PoissonBinomial& law, double xi, double a) {
  require_rate_arguments(xi, a);
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (!(law.variance() > 0.0)) return kNegInf;
  const double threshold = law.mean() + xi * a * std::sqrt(law.variance());
  double probability = 0.0;
  if (xi > 0.0) {
    const double first = std::ceil(threshold - threshold_slack(threshold));
    if (first <= static_cast<double>(law.max_count())) {
      probability = law.upper_tail(static_cast<std::size_t>(std::max(first, 0.0)));
    }
  } else {
    const double last = std::floor(threshold + threshold_slack(threshold));
    if (last >= 0.0) probability = law.lower_tail(static_cast<std::size_t>(last));
  }
  return probability > 0.0 ? std::log(probability) / (a * a) : kNegInf;
}

double exact_upper_rate(const IdenticalBernoulli& profile, double xi, double a) {
  require_rate_arguments(xi, a);
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (!(profile.variance() > 0.0)) return kNegInf;
  const double k = static_cast<double>(profile.count);
  const double threshold = profile.mean() + xi * a * std::sqrt(profile.variance());
  const double mode = std::floor((k + 1.0) * profile.eta);
  constexpr double kCutoff = 60.0;  // terms below e^-60 of the running maximum are dropped

  double log_probability = kNegInf;
  if (xi > 0.0) {
    const double first = std::max(0.0, std::ceil(threshold - threshold_slack(threshold)));
    if (first > k) return kNegInf;
    double best = kNegInf;
    for (auto j = static_cast<std::uint64_t>(first); j <= profile.count; ++j) {
      const double term = profile.log_pmf(j);
      best = std::max(best, term);
      log_probability = log_sum_exp_accumulate(log_probability, term);
      if (static_cast<double>(j) > mode && term < best - kCutoff) break;
    }
  } else {
    const double last = std::min(k, std::floor(threshold + threshold_slack(threshold)));
    if (last < 0.0) return kNegInf;
    double best = kNegInf;
    for (auto j = static_cast<std::int64_t>(last); j >= 0; --j) {
      const double term = profile.log_pmf(static_cast<std::uint64_t>(j));
      best = std::max(best, term);
      log_probability = log_sum_exp_accumulate(log_probability, term);
      if (static_cast<double>(j) < mode && term < best - kCutoff) break;
    }
  }
  return log_probability / (a * a);
}

}  // namespace eigmdp
