#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace rcsc::stats {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// One-sample Kolmogorov–Smirnov statistic sup_t |F_n(t) − F(t)|.
template <typename Cdf>
double ks_statistic(std::vector<double> sample, Cdf&& cdf) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

inline double ks_normal(std::vector<double> sample) { return ks_statistic(std::move(sample), normal_cdf); }

inline double ks_uniform(std::vector<double> sample) {
  return ks_statistic(std::move(sample), [](double x) { return std::clamp(x, 0.0, 1.0); });
}

inline double chi_squared_quantile(double dof, double p) {
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), p);
}

struct ChiSquaredResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double critical_value = 0.0;
  bool passed = false;
};

/// Pearson test of observed counts against expected probabilities. Bins are
/// merged in order until each merged bin expects at least `min_expected`.
inline ChiSquaredResult chi_squared_test(std::span<const double> observed, std::span<const double> probabilities,
                                         double level = 0.99, double min_expected = 5.0) {
  if (observed.size() != probabilities.size()) throw std::invalid_argument("bin count mismatch");
  double n = 0.0;
  for (double o : observed) n += o;
  std::vector<double> obs;
  std::vector<double> exp;
  double o_acc = 0.0;
  double e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += probabilities[i] * n;
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (exp.empty()) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      exp.back() += e_acc;
    }
  }
  ChiSquaredResult r;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (exp[i] > 0.0) r.statistic += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
  }
  r.degrees_of_freedom = static_cast<int>(obs.size()) - 1;
  if (r.degrees_of_freedom < 1) {
    r.passed = true;
    return r;
  }
  r.critical_value = chi_squared_quantile(r.degrees_of_freedom, level);
  r.passed = r.statistic <= r.critical_value;
  return r;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs at least two points");
  double mx = 0.0;
  double my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::domain_error("log-log slope needs positive values");
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double sample_variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

/// Sample covariance with the standard error of the plug-in estimator,
/// from the spread of the centered products.
struct CovarianceEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

inline CovarianceEstimate sample_covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("covariance needs paired samples");
  const double mx = mean(x);
  const double my = mean(y);
  std::vector<double> prod(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) prod[i] = (x[i] - mx) * (y[i] - my);
  const double n = static_cast<double>(x.size());
  CovarianceEstimate c;
  c.value = mean(prod) * n / (n - 1.0);
  c.standard_error = std::sqrt(sample_variance(prod) / n);
  return c;
}

}  // namespace rcsc::stats
