#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rcsc/connect.hpp"
#include "rcsc/functional.hpp"
#include "rcsc/montecarlo.hpp"
#include "rcsc/parallel.hpp"
#include "rcsc/rng.hpp"
#include "rcsc/space.hpp"
#include "rcsc/stats.hpp"

namespace rcsc {

/// Thrown when a pinned integral over the whole space does not settle as the
/// truncation box grows.
class NonIntegrableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Abstract complex on vertices 0..r−1, the downward closure of its generators.
class ComplexTemplate {
 public:
  ComplexTemplate(int vertex_count, std::vector<std::vector<int>> generators) : r_(vertex_count) {
    if (r_ < 1) throw std::invalid_argument("template needs at least one vertex");
    if (generators.empty()) throw std::invalid_argument("template needs generators");
    std::vector<bool> covered(static_cast<std::size_t>(r_), false);
    std::vector<std::vector<int>> faces;
    for (auto g : generators) {
      std::sort(g.begin(), g.end());
      g.erase(std::unique(g.begin(), g.end()), g.end());
      if (g.empty() || g.front() < 0 || g.back() >= r_) throw std::invalid_argument("template generator out of range");
      if (g.size() > 16) throw std::invalid_argument("template generator too large");
      for (int v : g) covered[static_cast<std::size_t>(v)] = true;
      for (std::uint32_t mask = 1; mask < (1U << g.size()); ++mask) {
        if (std::popcount(mask) < 2) continue;
        std::vector<int> f;
        for (std::size_t b = 0; b < g.size(); ++b)
          if (mask & (1U << b)) f.push_back(g[b]);
        faces.push_back(std::move(f));
      }
      generators_.push_back(std::move(g));
    }
    if (std::find(covered.begin(), covered.end(), false) != covered.end())
      throw std::invalid_argument("every template vertex must lie in a generator");
    std::sort(faces.begin(), faces.end(), [](const auto& a, const auto& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
    simplices_ = std::move(faces);

    // Components and a BFS spanning forest of the 1-skeleton.
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(r_));
    for (const auto& s : simplices_)
      if (s.size() == 2) {
        adj[static_cast<std::size_t>(s[0])].push_back(s[1]);
        adj[static_cast<std::size_t>(s[1])].push_back(s[0]);
      }
    parent_.assign(static_cast<std::size_t>(r_), -2);
    for (int root = 0; root < r_; ++root) {
      if (parent_[static_cast<std::size_t>(root)] != -2) continue;
      ++components_;
      parent_[static_cast<std::size_t>(root)] = -1;
      order_.push_back(root);
      std::queue<int> q;
      q.push(root);
      while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (int w : adj[static_cast<std::size_t>(v)]) {
          if (parent_[static_cast<std::size_t>(w)] != -2) continue;
          parent_[static_cast<std::size_t>(w)] = v;
          order_.push_back(w);
          q.push(w);
        }
      }
    }
  }

  /// K^r_{m,l}: an (m−1)-simplex and an (l−1)-simplex sharing m+l−r vertices.
  static ComplexTemplate kml(int m, int l, int r) {
    if (m < 1 || l < 1 || r < std::max(m, l) || r > m + l) throw std::invalid_argument("need max(m,l) <= r <= m+l");
    std::vector<int> first(static_cast<std::size_t>(m));
    std::iota(first.begin(), first.end(), 0);
    std::vector<int> second;
    for (int i = 0; i < m + l - r; ++i) second.push_back(i);
    for (int i = m; i < r; ++i) second.push_back(i);
    return ComplexTemplate(r, {first, second});
  }

  int vertex_count() const { return r_; }
  const std::vector<std::vector<int>>& generators() const { return generators_; }
  /// Faces with at least two vertices, by size then lexicographically.
  const std::vector<std::vector<int>>& simplices() const { return simplices_; }
  int components() const { return components_; }
  /// Vertices in BFS order; each non-root vertex follows its tree parent.
  const std::vector<int>& traversal() const { return order_; }
  /// Tree parent in the spanning forest, −1 for component roots.
  int parent(int v) const { return parent_[static_cast<std::size_t>(v)]; }

  /// f_K: product of φ over every face of dimension ≥ 1.
  double integrand(std::span<const Point> x, const ConnectionSystem& system) const {
    std::array<Point, kMaxAlpha + 2> buf{};
    double v = 1.0;
    for (const auto& s : simplices_) {
      if (s.size() > static_cast<std::size_t>(system.alpha()) + 1) return 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) buf[i] = x[static_cast<std::size_t>(s[i])];
      v *= system(std::span<const Point>(buf.data(), s.size()));
      if (v == 0.0) return 0.0;
    }
    return v;
  }

 private:
  int r_;
  std::vector<std::vector<int>> generators_;
  std::vector<std::vector<int>> simplices_;
  int components_ = 0;
  std::vector<int> order_;
  std::vector<int> parent_;
};

struct IntegrationOptions {
  std::size_t min_samples = 4000;
  std::size_t max_samples = std::size_t{1} << 21;
  double relative_tolerance = 0.01;
  std::uint64_t seed = 1;
  int threads = 1;
};

namespace detail {

inline constexpr std::size_t kChunk = 1000;

/// Means of the two components of `draw(gen)` over chunks of i.i.d. samples,
/// doubling the sample size until the relative standard error of the first
/// is below tolerance or the cap is reached. Chunk c always uses the same
/// generator, whatever the thread count.
template <typename Draw>
std::pair<MonteCarloEstimate, MonteCarloEstimate> adaptive_mean_pair(const IntegrationOptions& opts, std::uint64_t stream,
                                                                     Draw&& draw) {
  if (opts.min_samples < kChunk) throw std::invalid_argument("Monte Carlo estimates need at least 1000 samples");
  RunningStats first;
  RunningStats second;
  std::size_t chunks_done = 0;
  std::size_t target = (opts.min_samples + kChunk - 1) / kChunk;
  const std::size_t cap = std::max(target, opts.max_samples / kChunk);
  for (;;) {
    const auto parts = parallel_map(target - chunks_done, opts.threads, [&](std::size_t i) {
      auto gen = make_generator(opts.seed, stream, chunks_done + i);
      std::pair<RunningStats, RunningStats> s;
      for (std::size_t k = 0; k < kChunk; ++k) {
        const auto [a, b] = draw(gen);
        s.first.add(a);
        s.second.add(b);
      }
      return s;
    });
    for (const auto& [a, b] : parts) {
      first.merge(a);
      second.merge(b);
    }
    chunks_done = target;
    // An all-zero run is not evidence of a zero integral when the support is small.
    const bool converged = first.mean() != 0.0 && first.standard_error() <= opts.relative_tolerance * std::abs(first.mean());
    if (converged || chunks_done >= cap) break;
    target = std::min(cap, 2 * chunks_done);
  }
  return {first.estimate(), second.estimate()};
}

template <typename Draw>
MonteCarloEstimate adaptive_mean(const IntegrationOptions& opts, std::uint64_t stream, Draw&& draw) {
  return adaptive_mean_pair(opts, stream, [&](Generator& gen) { return std::pair{draw(gen), 0.0}; }).first;
}

inline std::uint64_t template_stream(std::uint64_t base, const ComplexTemplate& k) {
  std::uint64_t h = splitmix64(base ^ static_cast<std::uint64_t>(k.vertex_count()));
  for (const auto& g : k.generators()) {
    h = splitmix64(h ^ 0xffULL);
    for (int v : g) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
  }
  return h;
}

inline double box_volume(int dimension, double half_width) { return std::pow(2.0 * half_width, dimension); }

inline void place_near(Point& child, const Point& parent, double half_width, int dimension, Generator& gen) {
  for (int i = 0; i < dimension; ++i)
    child.location[static_cast<std::size_t>(i)] = parent.location[static_cast<std::size_t>(i)] + uniform(gen, -half_width, half_width);
}

/// Draws `child` from λ restricted to a polar box around `parent` that holds
/// the hyperbolic ball of radius h, and returns the λ-mass of the box (per
/// unit intensity). The angular half-width uses sin θ = sinh h / sinh t.
inline double place_near_hyperbolic(Point& child, const Point& parent, double h, const HyperbolicDisk& disk,
                                    Generator& gen) {
  const double t = parent.location[0];
  const double lo = std::max(0.0, t - h);
  const double hi = std::min(disk.radius, t + h);
  const double half = t <= h ? M_PI : std::asin(std::min(1.0, std::sinh(h) / std::sinh(t)));
  const double u = uniform01(gen);
  double radial;
  if (disk.density == RadialDensity::Cosh) {
    radial = std::sinh(hi) - std::sinh(lo);
    child.location[0] = std::asinh(std::sinh(lo) + u * radial);
  } else {
    radial = std::cosh(hi) - std::cosh(lo);
    child.location[0] = std::acosh(std::cosh(lo) + u * radial);
  }
  double phi = parent.location[1] + uniform(gen, -half, half);
  phi = std::fmod(phi, 2.0 * M_PI);
  if (phi < 0.0) phi += 2.0 * M_PI;
  child.location[1] = phi;
  return radial * half / M_PI;
}

inline void draw_mark(Point& p, const Window& window, Generator& gen) {
  if (const auto* m = window.marks()) p.mark = m->sample(gen);
}

}  // namespace detail

/// I_K(W) = ∫_{W^r} f_K dλ^r. Systems without a known range use plain uniform
/// sampling. Otherwise each non-root vertex is drawn near its spanning-tree
/// parent, in the cube of half-width `range` or, on the disk, a polar box
/// holding the hyperbolic ball of that radius; f_K vanishes outside.
inline MonteCarloEstimate integral_representation(const ComplexTemplate& k, const Window& window,
                                                  const ConnectionSystem& system, const IntegrationOptions& opts,
                                                  std::uint64_t stream = streams::kZeta) {
  const std::uint64_t s = detail::template_stream(stream, k);
  const int r = k.vertex_count();
  const double vol = window.measure();
  const bool tree = system.range().has_value() && k.components() < r;
  if (!tree) {
    const double weight = std::pow(vol, r);
    auto est = detail::adaptive_mean(opts, s, [&](Generator& gen) {
      std::array<Point, 2 * kMaxAlpha + 2> x{};
      for (int i = 0; i < r; ++i) x[static_cast<std::size_t>(i)] = window.sample_location(gen);
      return k.integrand(std::span<const Point>(x.data(), static_cast<std::size_t>(r)), system);
    });
    return scale(est, weight);
  }
  const double h = *system.range();
  if (const auto* disk = std::get_if<HyperbolicDisk>(&window.space())) {
    if (h <= 0.0) return {0.0, 0.0, opts.min_samples};
    auto est = detail::adaptive_mean(opts, s, [&](Generator& gen) {
      std::array<Point, 2 * kMaxAlpha + 2> x{};
      double w = 1.0;
      for (int v : k.traversal()) {
        auto& p = x[static_cast<std::size_t>(v)];
        const int parent = k.parent(v);
        if (parent < 0) {
          p = window.sample_location(gen);
          w *= vol;
        } else {
          w *= detail::place_near_hyperbolic(p, x[static_cast<std::size_t>(parent)], h, *disk, gen);
        }
      }
      return w * k.integrand(std::span<const Point>(x.data(), static_cast<std::size_t>(r)), system);
    });
    return est;
  }
  const int d = window.dimension();
  const double weight = std::pow(vol, k.components()) * std::pow(detail::box_volume(d, h), r - k.components());
  if (weight == 0.0) return {0.0, 0.0, opts.min_samples};
  auto est = detail::adaptive_mean(opts, s, [&](Generator& gen) {
    std::array<Point, 2 * kMaxAlpha + 2> x{};
    for (int v : k.traversal()) {
      auto& p = x[static_cast<std::size_t>(v)];
      const int parent = k.parent(v);
      if (parent < 0) {
        p = window.sample_location(gen);
        continue;
      }
      detail::place_near(p, x[static_cast<std::size_t>(parent)], h, d, gen);
      detail::draw_mark(p, window, gen);
      if (!window.contains(p.location)) return 0.0;
    }
    return k.integrand(std::span<const Point>(x.data(), static_cast<std::size_t>(r)), system);
  });
  return scale(est, weight);
}

namespace detail {
inline void check_kml(int m, int l, int r, int alpha) {
  if (m < 1 || l < 1 || m > alpha + 1 || l > alpha + 1) throw std::invalid_argument("m and l must lie in 1..alpha+1");
  if (r < std::max(m, l) || r > m + l) throw std::invalid_argument("need max(m,l) <= r <= m+l");
}

inline double factorial(int n) { return std::tgamma(n + 1.0); }

inline std::uint64_t kml_stream(std::uint64_t base, int m, int l, int r) {
  return splitmix64(base ^ (static_cast<std::uint64_t>(m) << 16) ^ (static_cast<std::uint64_t>(l) << 8) ^ static_cast<std::uint64_t>(r));
}
}  // namespace detail

/// ζ^r_{m,l}(W) = I_{K^r_{m,l}}(W).
inline MonteCarloEstimate zeta(int m, int l, int r, const Window& window, const ConnectionSystem& system,
                               const IntegrationOptions& opts = {}) {
  detail::check_kml(m, l, r, system.alpha());
  return integral_representation(ComplexTemplate::kml(m, l, r), window, system, opts, detail::kml_stream(streams::kZeta, m, l, r));
}

/// E f_{m−1} = β^m/m! · ζ^m_{m,m}(W).
inline MonteCarloEstimate expected_count(int m, double beta, const Window& window, const ConnectionSystem& system,
                                         const IntegrationOptions& opts = {}) {
  return scale(zeta(m, m, m, window, system, opts), std::pow(beta, m) / detail::factorial(m));
}

/// Weight of ζ^r_{m,l} in Cov(f_{m−1}, f_{l−1}).
inline double covariance_weight(int m, int l, int r, double beta) {
  return std::pow(beta, r) / (detail::factorial(r - m) * detail::factorial(r - l) * detail::factorial(m + l - r));
}

/// Cov(f_{m−1}, f_{l−1}) = Σ_{r=max(m,l)}^{m+l−1} covariance_weight · ζ^r_{m,l}(W).
/// For m > l the pair is swapped first (ζ is symmetric in m and l).
inline MonteCarloEstimate covariance_counts(int m, int l, double beta, const Window& window,
                                            const ConnectionSystem& system, const IntegrationOptions& opts = {}) {
  if (m > l) std::swap(m, l);
  detail::check_kml(m, l, l, system.alpha());
  MonteCarloEstimate total{0.0, 0.0, opts.min_samples};
  for (int r = l; r <= m + l - 1; ++r) total = add(total, scale(zeta(m, l, r, window, system, opts), covariance_weight(m, l, r, beta)));
  return total;
}

struct ZetaEntry {
  int m = 0;
  int l = 0;
  int r = 0;
  MonteCarloEstimate value;
};

/// Closed-form moments of χ_a, from one shared set of ζ estimates.
struct MomentReport {
  double beta = 0.0;
  double window_measure = 0.0;
  std::vector<double> a;
  std::vector<ZetaEntry> zetas;
  std::vector<MonteCarloEstimate> count_means;              // E f_0..f_α
  std::vector<std::vector<MonteCarloEstimate>> covariance;  // Cov(f_i, f_j)
  MonteCarloEstimate euler_mean;
  MonteCarloEstimate euler_variance;
  MonteCarloEstimate lower_bound;                // a_α² E f_α
  std::vector<MonteCarloEstimate> fock_terms;    // k = 1..α+1
};

namespace detail {

/// Linear combination Σ c_i ζ_i of independent estimates.
inline MonteCarloEstimate combine(const std::vector<ZetaEntry>& zetas, const std::map<std::size_t, double>& coeff) {
  MonteCarloEstimate out{0.0, 0.0, std::numeric_limits<std::size_t>::max()};
  double var = 0.0;
  for (const auto& [i, c] : coeff) {
    out.value += c * zetas[i].value.value;
    var += c * c * zetas[i].value.standard_error * zetas[i].value.standard_error;
    out.samples = std::min(out.samples, zetas[i].value.samples);
  }
  out.standard_error = std::sqrt(var);
  if (coeff.empty()) out.samples = 0;
  return out;
}

}  // namespace detail

inline MomentReport euler_moments(const CoefficientVector& a, double beta, const Window& window,
                                  const ConnectionSystem& system, const IntegrationOptions& opts = {}) {
  const int alpha = system.alpha();
  if (a.alpha() != alpha) throw std::invalid_argument("coefficient vector length must be alpha+1");
  if (!(beta > 0.0)) throw std::invalid_argument("intensity beta must be positive");
  MomentReport rep;
  rep.beta = beta;
  rep.window_measure = window.measure();
  rep.a = a.a;
  std::map<std::tuple<int, int, int>, std::size_t> index;
  for (int m = 1; m <= alpha + 1; ++m)
    for (int l = m; l <= alpha + 1; ++l)
      for (int r = l; r <= m + l - 1; ++r) {
        index[{m, l, r}] = rep.zetas.size();
        rep.zetas.push_back({m, l, r, {}});
      }
  const auto values = parallel_map(rep.zetas.size(), opts.threads, [&](std::size_t i) {
    IntegrationOptions inner = opts;
    inner.threads = 1;
    return zeta(rep.zetas[i].m, rep.zetas[i].l, rep.zetas[i].r, window, system, inner);
  });
  for (std::size_t i = 0; i < values.size(); ++i) rep.zetas[i].value = values[i];
  auto zeta_at = [&](int m, int l, int r) {
    if (m > l) std::swap(m, l);
    return index.at({m, l, r});
  };

  const auto n = static_cast<std::size_t>(alpha) + 1;
  rep.covariance.assign(n, std::vector<MonteCarloEstimate>(n));
  std::map<std::size_t, double> mean_coeff;
  std::map<std::size_t, double> var_coeff;
  std::vector<std::map<std::size_t, double>> fock(n);
  for (int m = 1; m <= alpha + 1; ++m) {
    const std::size_t zi = zeta_at(m, m, m);
    const double w = std::pow(beta, m) / detail::factorial(m);
    rep.count_means.push_back(detail::combine(rep.zetas, {{zi, w}}));
    mean_coeff[zi] += a.a[static_cast<std::size_t>(m - 1)] * w;
    for (int l = 1; l <= alpha + 1; ++l) {
      std::map<std::size_t, double> cov;
      const double aa = a.a[static_cast<std::size_t>(m - 1)] * a.a[static_cast<std::size_t>(l - 1)];
      for (int r = std::max(m, l); r <= m + l - 1; ++r) {
        const std::size_t k = zeta_at(m, l, r);
        const double c = covariance_weight(m, l, r, beta);
        cov[k] += c;
        var_coeff[k] += aa * c;
        fock[static_cast<std::size_t>(m + l - r - 1)][k] += aa * c;
      }
      rep.covariance[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(l - 1)] = detail::combine(rep.zetas, cov);
    }
  }
  rep.euler_mean = detail::combine(rep.zetas, mean_coeff);
  rep.euler_variance = detail::combine(rep.zetas, var_coeff);
  const double top = a.a.back();
  rep.lower_bound = scale(rep.count_means.back(), top * top);
  for (const auto& f : fock) rep.fock_terms.push_back(detail::combine(rep.zetas, f));
  return rep;
}

/// Simplex counts and χ_a over independent realizations.
struct EmpiricalMoments {
  std::vector<std::vector<std::int64_t>> counts;  // per replicate
  std::vector<double> chi;                        // per replicate
  std::vector<MonteCarloEstimate> count_means;
  std::vector<std::vector<stats::CovarianceEstimate>> covariance;
  MonteCarloEstimate euler_mean;
  stats::CovarianceEstimate euler_variance;
};

/// Counts (f_0..f_α) of one realization; replicate i depends only on (seed, i).
inline std::vector<std::int64_t> realization_counts(double beta, const Window& window, const ConnectionSystem& system,
                                                    std::uint64_t seed, std::size_t i) {
  auto gen = make_generator(seed, streams::kEmpirical, i);
  auto pts = sample_poisson(window, beta, gen);
  return complex_counts(std::move(pts), system, stream_seed(seed, streams::kMarks, i));
}

inline EmpiricalMoments summarize_counts(std::vector<std::vector<std::int64_t>> counts, const CoefficientVector& a) {
  EmpiricalMoments e;
  e.counts = std::move(counts);
  if (e.counts.size() < 2) throw std::invalid_argument("need at least two replicates");
  const std::size_t n = a.a.size();
  std::vector<std::vector<double>> cols(n, std::vector<double>(e.counts.size()));
  for (std::size_t i = 0; i < e.counts.size(); ++i) {
    if (e.counts[i].size() != n) throw std::invalid_argument("coefficient vector length must be alpha+1");
    for (std::size_t j = 0; j < n; ++j) cols[j][i] = static_cast<double>(e.counts[i][j]);
    e.chi.push_back(euler_characteristic(e.counts[i], a));
  }
  for (std::size_t j = 0; j < n; ++j) {
    RunningStats s;
    for (double v : cols[j]) s.add(v);
    e.count_means.push_back(s.estimate());
  }
  e.covariance.assign(n, std::vector<stats::CovarianceEstimate>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) e.covariance[i][j] = stats::sample_covariance(cols[i], cols[j]);
  RunningStats c;
  for (double v : e.chi) c.add(v);
  e.euler_mean = c.estimate();
  e.euler_variance = stats::sample_covariance(e.chi, e.chi);
  return e;
}

inline EmpiricalMoments empirical_moments(const CoefficientVector& a, double beta, const Window& window,
                                          const ConnectionSystem& system, std::size_t replicates, std::uint64_t seed,
                                          int threads = 1) {
  if (a.alpha() != system.alpha()) throw std::invalid_argument("coefficient vector length must be alpha+1");
  auto counts = parallel_map(replicates, threads, [&](std::size_t i) { return realization_counts(beta, window, system, seed, i); });
  return summarize_counts(std::move(counts), a);
}

// ---------------------------------------------------------------------------
// Marked stationary case: integrals with the first vertex pinned at the origin.

struct StationaryOptions {
  IntegrationOptions integration;
  double initial_half_width = 1.0;  // used when the system has no declared range
  double max_half_width = 1e6;
};

namespace detail {

inline void require_stationary(const Window& window, const ConnectionSystem& system) {
  if (window.is_hyperbolic()) throw std::invalid_argument("stationary integrals need a Euclidean space");
  if (!system.translation_invariant()) throw std::invalid_argument("stationary integrals need a translation-invariant system");
}

/// Pinned integral ∫ g(0, x_2..x_r) over (ℝ^d)^{r−1} and the mark space, by
/// tree sampling at half-width h. The tail part counts samples with some
/// offset beyond h/2, i.e. the contribution missed at half the width.
struct PinnedResult {
  MonteCarloEstimate total;
  MonteCarloEstimate tail;
};

template <typename F>
PinnedResult pinned_tree_integral(const ComplexTemplate& k, const Window& window, F&& integrand, double h,
                                  const IntegrationOptions& opts, std::uint64_t stream) {
  const int r = k.vertex_count();
  const int d = window.dimension();
  const double weight = std::pow(box_volume(d, h), r - 1);
  const auto [total, tail] = adaptive_mean_pair(opts, stream, [&](Generator& gen) {
    std::array<Point, 2 * kMaxAlpha + 2> x{};
    bool far = false;
    for (int v : k.traversal()) {
      auto& p = x[static_cast<std::size_t>(v)];
      const int parent = k.parent(v);
      if (parent < 0) {
        p = Point{};
        draw_mark(p, window, gen);
        continue;
      }
      const auto& q = x[static_cast<std::size_t>(parent)];
      place_near(p, q, h, d, gen);
      draw_mark(p, window, gen);
      for (int i = 0; i < d; ++i) far |= std::abs(p.location[static_cast<std::size_t>(i)] - q.location[static_cast<std::size_t>(i)]) > 0.5 * h;
    }
    const double g = integrand(std::span<const Point>(x.data(), static_cast<std::size_t>(r)));
    return std::pair{g, far ? g : 0.0};
  });
  return {scale(total, weight), scale(tail, weight)};
}

template <typename F>
MonteCarloEstimate pinned_integral(const ComplexTemplate& k, const Window& window, const ConnectionSystem& system,
                                   F&& integrand, const StationaryOptions& opts, std::uint64_t stream) {
  if (k.components() != 1) throw std::invalid_argument("pinned integrals need a connected template");
  if (k.vertex_count() == 1) return MonteCarloEstimate::exact(integrand(std::span<const Point>()));
  if (const auto range = system.range()) {
    if (*range <= 0.0) return MonteCarloEstimate::exact(0.0);
    return pinned_tree_integral(k, window, integrand, *range, opts.integration, stream).total;
  }
  // Unknown range: double the box until the part beyond half the box is
  // negligible next to the statistical error.
  for (double h = opts.initial_half_width; h <= opts.max_half_width; h *= 2.0) {
    const auto res = pinned_tree_integral(k, window, integrand, h, opts.integration, stream);
    if (res.tail.value <= 0.5 * res.total.standard_error) return res.total;
  }
  throw NonIntegrableError("pinned integral of " + system.name() + " does not converge as the box grows");
}

}  // namespace detail

/// ζ^r_{m,l}(0): K^r_{m,l} integrated with its first vertex at the origin.
/// Only connected templates (r ≤ m+l−1) have a finite limit.
inline MonteCarloEstimate stationary_zeta(int m, int l, int r, const Window& space, const ConnectionSystem& system,
                                          const StationaryOptions& opts = {}) {
  detail::require_stationary(space, system);
  detail::check_kml(m, l, r, system.alpha());
  if (r > m + l - 1) throw std::invalid_argument("stationary limit needs a connected template, r <= m+l-1");
  const auto k = ComplexTemplate::kml(m, l, r);
  auto f = [&](std::span<const Point> x) {
    if (x.empty()) return 1.0;
    return k.integrand(x, system);
  };
  return detail::pinned_integral(k, space, system, f, opts, detail::kml_stream(streams::kStationary, m, l, r));
}

/// ν = sup over the first mark of ∫ φ_1((0,a),(y,b))^{1/2} dy Θ(db).
/// Uniform marks are probed on a grid; the sup is estimated by the largest value.
inline MonteCarloEstimate integrability_nu(const Window& space, const ConnectionSystem& system,
                                           const StationaryOptions& opts = {}) {
  detail::require_stationary(space, system);
  const ComplexTemplate edge(2, {{0, 1}});
  const auto grid = space.marks() ? space.marks()->grid() : std::vector<double>{0.0};
  MonteCarloEstimate best{-1.0, 0.0, 0};
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double a = grid[g];
    auto f = [&](std::span<const Point> x) {
      std::array<Point, 2> pair{x[0], x[1]};
      pair[0].mark = a;
      return std::sqrt(system(pair));
    };
    const auto e = detail::pinned_integral(edge, space, system, f, opts, splitmix64(streams::kNu ^ g));
    if (e.value > best.value) best = e;
  }
  return best;
}

/// Limits σ_{m,l} of Cov(f_{m−1}, f_{l−1})/|W_n| and the matrix Σ.
struct StationaryReport {
  double beta = 0.0;
  std::vector<ZetaEntry> zetas;                         // ζ^r_{m,l}(0), m <= l
  std::vector<std::vector<MonteCarloEstimate>> sigma;   // (α+1)×(α+1)
  double min_eigenvalue = 0.0;
  double min_eigenvalue_se = 0.0;                       // delta method through the ζ estimates
  bool positive_definite = false;                       // λ_min − 3 SE > 0
  MonteCarloEstimate top_zeta;                          // ζ^{α+1}_{α+1,α+1}(0)
};

inline StationaryReport stationary_limits(double beta, const Window& space, const ConnectionSystem& system,
                                          const StationaryOptions& opts = {}) {
  detail::require_stationary(space, system);
  const int alpha = system.alpha();
  StationaryReport rep;
  rep.beta = beta;
  for (int m = 1; m <= alpha + 1; ++m)
    for (int l = m; l <= alpha + 1; ++l)
      for (int r = l; r <= m + l - 1; ++r) rep.zetas.push_back({m, l, r, {}});
  const auto values = parallel_map(rep.zetas.size(), opts.integration.threads, [&](std::size_t i) {
    StationaryOptions inner = opts;
    inner.integration.threads = 1;
    return stationary_zeta(rep.zetas[i].m, rep.zetas[i].l, rep.zetas[i].r, space, system, inner);
  });
  for (std::size_t i = 0; i < values.size(); ++i) rep.zetas[i].value = values[i];
  const auto n = static_cast<std::size_t>(alpha) + 1;
  rep.sigma.assign(n, std::vector<MonteCarloEstimate>(n));
  for (int m = 1; m <= alpha + 1; ++m)
    for (int l = m; l <= alpha + 1; ++l) {
      MonteCarloEstimate s{0.0, 0.0, std::numeric_limits<std::size_t>::max()};
      for (const auto& z : rep.zetas)
        if (z.m == m && z.l == l) {
          s = add(s, scale(z.value, covariance_weight(m, l, z.r, beta)));
          if (z.r == m && m == l && m == alpha + 1) rep.top_zeta = z.value;
        }
      rep.sigma[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(l - 1)] = s;
      rep.sigma[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(m - 1)] = s;
    }
  for (const auto& z : rep.zetas)
    if (z.m == alpha + 1 && z.l == alpha + 1 && z.r == alpha + 1) rep.top_zeta = z.value;
  Eigen::MatrixXd S(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rep.sigma[i][j].value;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  rep.min_eigenvalue = eig.eigenvalues()(0);
  // λ_min = vᵀΣv is linear in each ζ near the estimate: ∂λ/∂ζ^r_{m,l} = w·v_m v_l (twice off the diagonal).
  const Eigen::VectorXd v = eig.eigenvectors().col(0);
  double var = 0.0;
  for (const auto& z : rep.zetas) {
    const double vm = v(z.m - 1);
    const double vl = v(z.l - 1);
    const double grad = covariance_weight(z.m, z.l, z.r, beta) * (z.m == z.l ? vm * vl : 2.0 * vm * vl);
    var += grad * grad * z.value.standard_error * z.value.standard_error;
  }
  rep.min_eigenvalue_se = std::sqrt(var);
  rep.positive_definite = rep.min_eigenvalue - 3.0 * rep.min_eigenvalue_se > 0.0;
  return rep;
}

/// ζ^r_{m,l}(W_n)/|W_n| along a window sequence.
inline std::vector<MonteCarloEstimate> finite_window_ratios(int m, int l, int r, const std::vector<Window>& windows,
                                                            const ConnectionSystem& system,
                                                            const IntegrationOptions& opts = {}) {
  std::vector<MonteCarloEstimate> out;
  for (const auto& w : windows) out.push_back(scale(zeta(m, l, r, w, system, opts), 1.0 / w.measure()));
  return out;
}

}  // namespace rcsc
