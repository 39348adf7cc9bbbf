#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcsc/complex.hpp"
#include "rcsc/connect.hpp"
#include "rcsc/functional.hpp"
#include "rcsc/moments.hpp"
#include "rcsc/montecarlo.hpp"
#include "rcsc/parallel.hpp"
#include "rcsc/rng.hpp"
#include "rcsc/space.hpp"
#include "rcsc/stats.hpp"

namespace rcsc {

/// A regime hypothesis failed on the configured ladder.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Centering and scaling of χ_a.
struct Standardization {
  double mean = 0.0;
  double variance = 0.0;
};

struct GammaOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  std::size_t fourth_moment_replicates = 10000;
  std::optional<Standardization> standardization;  // closed form from module moments when unset
  IntegrationOptions integration;
};

struct GammaReport {
  double beta = 0.0;
  double window_measure = 0.0;
  std::size_t outer_samples = 0;
  std::size_t inner_replicates = 0;
  Standardization standardization;
  std::array<MonteCarloEstimate, 6> gamma{};
  MonteCarloEstimate wasserstein_bound;  // γ₁+γ₂+γ₃
  MonteCarloEstimate kolmogorov_bound;   // γ₁+…+γ₆
  MonteCarloEstimate fourth_moment;      // E F⁴ from plain replicates
  double fourth_moment_bound = 0.0;
};

namespace detail {

/// Λ-values of χ_a at one outer triple and one realization, read off the
/// complex with all three points added. Bit b of a mask is added point x_{b+1}.
struct LambdaValues {
  double first = 0.0;       // Λ¹ at (x1; x2)
  double second = 0.0;      // Λ¹ at (x2; x1)
  double pair13 = 0.0;      // Λ² at (x1, x3; x2)
  double pair23 = 0.0;      // Λ² at (x2, x3; x1)
  double pair12 = 0.0;      // Λ² at (x1, x2)
};

inline LambdaValues lambda_values(const std::vector<Point>& base, const std::vector<Point>& added,
                                  const ConnectionSystem& system, std::uint64_t key, const CoefficientVector& a) {
  const auto full = build_complex(augmented_points(base, added), system, key);
  const auto by_mask = counts_by_added_mask(full, base.size(), added.size());
  auto value = [&](std::size_t mask) { return euler_characteristic(by_mask[mask], a); };
  return {value(0b001), value(0b010), value(0b101), value(0b110), value(0b011)};
}

/// Inner averages at one outer triple turned into the integrands of the six
/// displays (before β, |W| and variance scaling).
struct OuterIntegrands {
  std::array<double, 7> g{};  // γ₁..γ₆ integrands, then E[(ΛF)⁴]^{1/2}
};

}  // namespace detail

inline GammaReport zero_gamma_report(double beta, double window_measure, std::size_t outer, std::size_t inner) {
  GammaReport rep;
  rep.beta = beta;
  rep.window_measure = window_measure;
  rep.outer_samples = outer;
  rep.inner_replicates = inner;
  for (auto& g : rep.gamma) g = MonteCarloEstimate::exact(0.0);
  rep.wasserstein_bound = MonteCarloEstimate::exact(0.0);
  rep.kolmogorov_bound = MonteCarloEstimate::exact(0.0);
  rep.fourth_moment = MonteCarloEstimate::exact(0.0);
  rep.fourth_moment_bound = 2.0;
  return rep;
}

/// γ₁…γ₆ for the standardized χ_a by nested Monte Carlo: outer triples drawn
/// uniformly in W, inner expectations over fresh realizations with the outer
/// points added.
inline GammaReport gamma_quantities(double beta, const Window& window, const ConnectionSystem& system,
                                    const CoefficientVector& a, std::size_t outer_samples, std::size_t inner_replicates,
                                    const GammaOptions& opts = {}) {
  if (a.alpha() != system.alpha()) throw std::invalid_argument("coefficient vector length must be alpha+1");
  if (!(beta > 0.0)) throw std::invalid_argument("intensity beta must be positive");
  if (inner_replicates < 100) throw std::invalid_argument("inner_replicates must be at least 100");
  if (outer_samples < 2) throw std::invalid_argument("outer_samples must be at least 2");
  const double w = window.measure();
  if (a.is_zero()) return zero_gamma_report(beta, w, outer_samples, inner_replicates);

  Standardization st;
  if (opts.standardization) {
    st = *opts.standardization;
  } else {
    const auto m = euler_moments(a, beta, window, system, opts.integration);
    st = {m.euler_mean.value, m.euler_variance.value};
  }
  if (!(st.variance > 0.0) || !std::isfinite(st.variance))
    throw std::domain_error("variance of chi_a is not positive; cannot standardize");
  const double sd = std::sqrt(st.variance);

  const auto integrands = parallel_map(outer_samples, opts.threads, [&](std::size_t t) {
    auto outer_gen = make_generator(opts.seed, streams::kGammaOuter, t);
    std::vector<Point> added;
    for (int i = 0; i < 3; ++i) added.push_back(window.sample_point(outer_gen));
    const std::uint64_t base_seed = stream_seed(opts.seed, streams::kGammaInner, t);
    double e12 = 0.0, e_pairs = 0.0, e_abs3 = 0.0, e_first4 = 0.0, e_pair4 = 0.0;
    for (std::size_t j = 0; j < inner_replicates; ++j) {
      auto gen = make_generator(base_seed, streams::kPoints, j);
      const auto pts = sample_poisson(window, beta, gen);
      const auto v = detail::lambda_values(pts, added, system, stream_seed(base_seed, streams::kMarks, j), a);
      const double l1 = v.first / sd, l2 = v.second / sd;
      const double b13 = v.pair13 / sd, b23 = v.pair23 / sd, d12 = v.pair12 / sd;
      e12 += l1 * l1 * l2 * l2;
      e_pairs += b13 * b13 * b23 * b23;
      e_abs3 += std::abs(l1) * l1 * l1;
      e_first4 += l1 * l1 * l1 * l1;
      e_pair4 += d12 * d12 * d12 * d12;
    }
    const double n = static_cast<double>(inner_replicates);
    e12 /= n, e_pairs /= n, e_abs3 /= n, e_first4 /= n, e_pair4 /= n;
    detail::OuterIntegrands out;
    out.g = {std::sqrt(e12) * std::sqrt(e_pairs),
             e_pairs,
             e_abs3,
             std::pow(e_first4, 0.75),
             e_first4,
             6.0 * std::sqrt(e_first4) * std::sqrt(e_pair4) + 3.0 * e_pair4,
             std::sqrt(e_first4)};
    return out;
  });
  std::array<RunningStats, 7> acc;
  for (const auto& o : integrands)
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k].add(o.g[k]);

  const auto fourth = parallel_map(opts.fourth_moment_replicates, opts.threads, [&](std::size_t i) {
    const auto counts = realization_counts(beta, window, system, stream_seed(opts.seed, streams::kFourthMoment), i);
    const double z = (euler_characteristic(counts, a) - st.mean) / sd;
    return z * z * z * z;
  });
  RunningStats f4;
  for (double v : fourth) f4.add(v);

  GammaReport rep;
  rep.beta = beta;
  rep.window_measure = w;
  rep.outer_samples = outer_samples;
  rep.inner_replicates = inner_replicates;
  rep.standardization = st;
  rep.fourth_moment = f4.estimate();
  const double bw = beta * w;
  const double bw3 = bw * bw * bw;
  rep.gamma[0] = scale(power(acc[0].estimate(bw3), 0.5), 2.0);
  rep.gamma[1] = power(acc[1].estimate(bw3), 0.5);
  rep.gamma[2] = acc[2].estimate(bw);
  rep.gamma[3] = multiply(power(rep.fourth_moment, 0.25), acc[3].estimate(0.5 * bw));
  rep.gamma[4] = power(acc[4].estimate(bw), 0.5);
  rep.gamma[5] = power(acc[5].estimate(bw * bw), 0.5);
  // The six estimates share samples, so their errors are added, not combined in quadrature.
  auto sum = [&](std::size_t count) {
    MonteCarloEstimate s{0.0, 0.0, outer_samples};
    for (std::size_t k = 0; k < count; ++k) {
      s.value += rep.gamma[k].value;
      s.standard_error += rep.gamma[k].standard_error;
    }
    return s;
  };
  rep.wasserstein_bound = sum(3);
  rep.kolmogorov_bound = sum(6);
  const double root_term = bw * acc[6].mean();
  rep.fourth_moment_bound = std::max(256.0 * root_term * root_term, 4.0 * bw * acc[4].mean() + 2.0);
  return rep;
}

/// sup_t |F_n(t) − Φ(t)| for a sample of standardized values.
inline double empirical_kolmogorov(std::vector<double> standardized) {
  if (standardized.size() < 1000) throw std::invalid_argument("empirical_kolmogorov needs at least 1000 replicates");
  return stats::ks_normal(std::move(standardized));
}

/// Error scale of an empirical Kolmogorov distance from n replicates: the
/// pointwise standard deviation of F_n(t) is at most 1/(2√n).
inline double kolmogorov_standard_error(std::size_t n) { return 0.5 / std::sqrt(static_cast<double>(n)); }

inline std::vector<double> standardize(const std::vector<double>& values, const Standardization& st) {
  if (!(st.variance > 0.0)) throw std::domain_error("variance of chi_a is not positive; cannot standardize");
  const double sd = std::sqrt(st.variance);
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back((v - st.mean) / sd);
  return out;
}

// ---------------------------------------------------------------------------
// CLT experiments along a parameter ladder.

enum class Regime { IncreasingIntensity, IncreasingWindow, MultivariateStationary };

inline std::string regime_name(Regime r) {
  switch (r) {
    case Regime::IncreasingIntensity: return "increasing_intensity";
    case Regime::IncreasingWindow: return "increasing_window";
    case Regime::MultivariateStationary: return "multivariate_stationary";
  }
  return "unknown";
}

enum class StandardizationMode { ClosedForm, Empirical };

using SystemFactory = std::function<ConnectionSystem(const Window&)>;

struct CltExperiment {
  Regime regime = Regime::IncreasingIntensity;
  /// β values (increasing intensity) or box side lengths (window regimes).
  std::vector<double> ladder;
  /// Fixed window, or the space whose dimension and marks the ladder boxes share.
  Window window{EuclideanBox{{{0.0, 1.0}}}};
  double beta = 1.0;  // window regimes
  SystemFactory system;
  CoefficientVector a;
  std::size_t replicates = 1000;
  StandardizationMode standardization = StandardizationMode::ClosedForm;
  std::size_t gamma_outer = 0;  // 0 skips the γ estimates
  std::size_t gamma_inner = 200;
  std::size_t fourth_moment_replicates = 10000;
  IntegrationOptions integration;
  StationaryOptions stationary;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct CltRung {
  double parameter = 0.0;
  double beta = 0.0;
  double window_measure = 0.0;
  std::size_t replicates = 0;
  Standardization standardization;
  MonteCarloEstimate euler_mean;        // empirical
  double ks = 0.0;
  double ks_standard_error = 0.0;
  std::optional<GammaReport> gamma;
  MonteCarloEstimate top_count_ratio;   // E f_α / |W|, empirical
  // Multivariate regime only.
  std::vector<std::vector<stats::CovarianceEstimate>> scaled_covariance;  // Cov(f_i, f_j)/|W|
  double max_covariance_deviation = 0.0;
  double max_covariance_z = 0.0;
  std::vector<double> coordinate_ks;
};

struct CltReport {
  Regime regime = Regime::IncreasingIntensity;
  std::vector<CltRung> rungs;
  bool ks_decreasing = true;
  std::optional<double> ks_slope;                   // vs β or |W_n|
  std::array<std::optional<double>, 6> gamma_slopes{};
  std::optional<MonteCarloEstimate> nu;
  std::optional<StationaryReport> limits;
  double min_top_count_ratio = 0.0;
};

/// Box [0, side]^d sharing the dimension and marks of `like`.
inline Window scaled_window(const Window& like, double side) {
  if (like.is_hyperbolic()) throw std::invalid_argument("window ladders need a Euclidean space");
  if (!(side > 0.0)) throw std::invalid_argument("window side must be positive");
  std::vector<Interval> bounds(static_cast<std::size_t>(like.dimension()), Interval{0.0, side});
  if (const auto* marks = like.marks()) return Window{MarkedStationary{bounds, *marks}};
  return Window{EuclideanBox{bounds}};
}

namespace detail {

inline void check_experiment(const CltExperiment& exp) {
  if (exp.ladder.empty()) throw std::invalid_argument("ladder must have at least one rung");
  for (std::size_t i = 0; i < exp.ladder.size(); ++i) {
    if (!(exp.ladder[i] > 0.0)) throw std::invalid_argument("ladder values must be positive");
    if (i > 0 && !(exp.ladder[i] > exp.ladder[i - 1])) throw std::invalid_argument("ladder must be strictly increasing");
  }
  if (exp.replicates < 1000) throw std::invalid_argument("replicates per rung must be at least 1000");
  if (!exp.system) throw std::invalid_argument("experiment needs a connection system");
  if (exp.a.a.empty() || exp.a.a.back() == 0.0)
    throw HypothesisError("top coefficient a_alpha must be nonzero");
}

}  // namespace detail

inline CltReport run_clt_experiment(const CltExperiment& exp) {
  detail::check_experiment(exp);
  CltReport rep;
  rep.regime = exp.regime;
  const bool window_regime = exp.regime != Regime::IncreasingIntensity;

  if (window_regime) {
    const auto unit = scaled_window(exp.window, 1.0);
    const auto sys = exp.system(unit);
    try {
      rep.nu = integrability_nu(unit, sys, exp.stationary);
    } catch (const NonIntegrableError& e) {
      throw HypothesisError(std::string("integrability check failed: ") + e.what());
    }
    if (exp.regime == Regime::MultivariateStationary) {
      rep.limits = stationary_limits(exp.beta, unit, sys, exp.stationary);
      const auto& top = rep.limits->top_zeta;
      if (!(top.value - 3.0 * top.standard_error > 0.0))
        throw HypothesisError("top stationary zeta is not positive beyond 3 SE");
    }
  }

  rep.min_top_count_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < exp.ladder.size(); ++k) {
    CltRung rung;
    rung.parameter = exp.ladder[k];
    const Window window = window_regime ? scaled_window(exp.window, exp.ladder[k]) : exp.window;
    rung.beta = window_regime ? exp.beta : exp.ladder[k];
    rung.window_measure = window.measure();
    rung.replicates = exp.replicates;
    const auto system = exp.system(window);
    if (exp.a.alpha() != system.alpha()) throw std::invalid_argument("coefficient vector length must be alpha+1");
    const std::uint64_t rung_seed = stream_seed(exp.seed, streams::kClt, k);

    if (exp.regime == Regime::IncreasingIntensity) {
      const auto top = expected_count(system.alpha() + 1, rung.beta, window, system, exp.integration);
      if (!(top.value - 3.0 * top.standard_error > 0.0))
        throw HypothesisError("expected number of top simplices is not positive beyond 3 SE");
    }

    const auto emp = empirical_moments(exp.a, rung.beta, window, system, exp.replicates, rung_seed, exp.threads);
    rung.euler_mean = emp.euler_mean;
    if (exp.standardization == StandardizationMode::ClosedForm) {
      const auto m = euler_moments(exp.a, rung.beta, window, system, exp.integration);
      rung.standardization = {m.euler_mean.value, m.euler_variance.value};
    } else {
      rung.standardization = {emp.euler_mean.value, emp.euler_variance.value};
    }
    rung.ks = empirical_kolmogorov(standardize(emp.chi, rung.standardization));
    rung.ks_standard_error = kolmogorov_standard_error(exp.replicates);
    rung.top_count_ratio = scale(emp.count_means.back(), 1.0 / rung.window_measure);

    if (window_regime) {
      const auto& r = rung.top_count_ratio;
      if (!(r.value - 3.0 * r.standard_error > 0.0))
        throw HypothesisError("E f_alpha / |W| is not bounded away from 0 on rung " + std::to_string(k));
    }
    rep.min_top_count_ratio = std::min(rep.min_top_count_ratio, rung.top_count_ratio.value);

    if (exp.regime == Regime::MultivariateStationary) {
      const std::size_t n = emp.covariance.size();
      rung.scaled_covariance = emp.covariance;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          auto& c = rung.scaled_covariance[i][j];
          c.value /= rung.window_measure;
          c.standard_error /= rung.window_measure;
          const auto& s = rep.limits->sigma[i][j];
          const double dev = std::abs(c.value - s.value);
          const double se = std::hypot(c.standard_error, s.standard_error);
          rung.max_covariance_deviation = std::max(rung.max_covariance_deviation, dev);
          rung.max_covariance_z = std::max(rung.max_covariance_z, se > 0.0 ? dev / se : (dev > 0.0 ? std::numeric_limits<double>::infinity() : 0.0));
        }
      for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> col;
        col.reserve(emp.counts.size());
        for (const auto& c : emp.counts) col.push_back(static_cast<double>(c[j]));
        const auto& v = emp.covariance[j][j];
        rung.coordinate_ks.push_back(v.value > 0.0 ? empirical_kolmogorov(standardize(col, {emp.count_means[j].value, v.value}))
                                                   : 1.0);
      }
    }

    if (exp.gamma_outer > 0) {
      GammaOptions g;
      g.seed = stream_seed(rung_seed, streams::kGammaOuter);
      g.threads = exp.threads;
      g.fourth_moment_replicates = exp.fourth_moment_replicates;
      g.standardization = rung.standardization;
      g.integration = exp.integration;
      rung.gamma = gamma_quantities(rung.beta, window, system, exp.a, exp.gamma_outer, exp.gamma_inner, g);
    }
    rep.rungs.push_back(std::move(rung));
  }

  for (std::size_t k = 1; k < rep.rungs.size(); ++k)
    if (!(rep.rungs[k].ks < rep.rungs[k - 1].ks)) rep.ks_decreasing = false;
  if (rep.rungs.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& r : rep.rungs) {
      x.push_back(window_regime ? r.window_measure : r.beta);
      y.push_back(r.ks);
    }
    if (std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0; })) rep.ks_slope = stats::loglog_slope(x, y);
    if (exp.gamma_outer > 0)
      for (std::size_t g = 0; g < 6; ++g) {
        std::vector<double> gy;
        for (const auto& r : rep.rungs) gy.push_back(r.gamma->gamma[g].value);
        if (std::all_of(gy.begin(), gy.end(), [](double v) { return v > 0.0; })) rep.gamma_slopes[g] = stats::loglog_slope(x, gy);
      }
  }
  return rep;
}

}  // namespace rcsc
