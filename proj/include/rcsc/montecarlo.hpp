#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>

namespace rcsc {

struct MonteCarloEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;

  static MonteCarloEstimate exact(double v) { return {v, 0.0, std::numeric_limits<std::size_t>::max()}; }
};

/// Welford accumulator for mean and variance.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  void merge(const RunningStats& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(n_ + o.n_);
    const double d = o.mean_ - mean_;
    mean_ += d * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double standard_error() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

  MonteCarloEstimate estimate(double scale = 1.0) const {
    return {scale * mean_, std::abs(scale) * standard_error(), n_};
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Error propagation for independent estimates.

inline MonteCarloEstimate scale(const MonteCarloEstimate& e, double c) {
  return {c * e.value, std::abs(c) * e.standard_error, e.samples};
}

inline MonteCarloEstimate add(const MonteCarloEstimate& a, const MonteCarloEstimate& b) {
  return {a.value + b.value, std::hypot(a.standard_error, b.standard_error), std::min(a.samples, b.samples)};
}

inline MonteCarloEstimate subtract(const MonteCarloEstimate& a, const MonteCarloEstimate& b) {
  return {a.value - b.value, std::hypot(a.standard_error, b.standard_error), std::min(a.samples, b.samples)};
}

inline MonteCarloEstimate multiply(const MonteCarloEstimate& a, const MonteCarloEstimate& b) {
  const double se = std::hypot(a.value * b.standard_error, b.value * a.standard_error);
  return {a.value * b.value, se, std::min(a.samples, b.samples)};
}

/// e^p by the delta method. At e = 0 with p < 1 the derivative blows up; the
/// error is then taken as the image of the one-SE interval.
inline MonteCarloEstimate power(const MonteCarloEstimate& e, double p) {
  const double v = e.value > 0.0 ? std::pow(e.value, p) : 0.0;
  double se = 0.0;
  if (e.value > 0.0) se = std::abs(p) * std::pow(e.value, p - 1.0) * e.standard_error;
  if (p < 1.0 && e.standard_error > 0.0) se = std::max(se, std::pow(std::max(e.value, 0.0) + e.standard_error, p) - v);
  return {v, se, e.samples};
}

/// Two-sided z-score of a difference of independent estimates.
inline double z_score(const MonteCarloEstimate& a, const MonteCarloEstimate& b) {
  const double se = std::hypot(a.standard_error, b.standard_error);
  const double d = a.value - b.value;
  if (se == 0.0) return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(d) / se;
}

}  // namespace rcsc
