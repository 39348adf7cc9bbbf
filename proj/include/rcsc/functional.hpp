#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rcsc/complex.hpp"

namespace rcsc {

/// Coefficients a_0..a_α of χ_a = Σ a_i f_i.
struct CoefficientVector {
  std::vector<double> a;

  /// Classical Euler characteristic, a_i = (−1)^i.
  static CoefficientVector euler(int alpha) {
    CoefficientVector c;
    for (int i = 0; i <= alpha; ++i) c.a.push_back(i % 2 == 0 ? 1.0 : -1.0);
    return c;
  }

  /// χ_a = f_j.
  static CoefficientVector unit(int alpha, int j) {
    if (j < 0 || j > alpha) throw std::invalid_argument("unit coefficient index out of range");
    CoefficientVector c;
    c.a.assign(static_cast<std::size_t>(alpha) + 1, 0.0);
    c.a[static_cast<std::size_t>(j)] = 1.0;
    return c;
  }

  int alpha() const { return static_cast<int>(a.size()) - 1; }
  bool is_zero() const {
    for (double v : a)
      if (v != 0.0) return false;
    return true;
  }
};

/// (f_0, …, f_α).
inline std::vector<std::int64_t> simplex_counts(const ComplexSample& c) {
  std::vector<std::int64_t> f;
  f.reserve(c.simplices.size());
  for (const auto& list : c.simplices) f.push_back(static_cast<std::int64_t>(list.size()));
  return f;
}

inline double euler_characteristic(std::span<const std::int64_t> counts, const CoefficientVector& a) {
  if (counts.size() != a.a.size()) throw std::invalid_argument("coefficient vector length must be alpha+1");
  double chi = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) chi += a.a[i] * static_cast<double>(counts[i]);
  return chi;
}

inline double euler_characteristic(const ComplexSample& c, const CoefficientVector& a) {
  const auto f = simplex_counts(c);
  return euler_characteristic(f, a);
}

/// f_i^{x_j : j ∈ required}: i-simplices of the augmented complex containing
/// every listed added point (0-based positions into the added points).
inline std::int64_t restricted_counts(const AugmentedSample& aug, std::span<const std::size_t> required, int i) {
  if (i < 0 || i > aug.complex.alpha()) return 0;
  std::vector<VertexIndex> need;
  for (std::size_t r : required) {
    if (r >= aug.added_count()) throw std::invalid_argument("required point is not an added point");
    need.push_back(aug.added_vertex(r));
  }
  std::sort(need.begin(), need.end());
  need.erase(std::unique(need.begin(), need.end()), need.end());
  if (need.size() > static_cast<std::size_t>(i) + 1) return 0;
  const auto& list = aug.complex.simplices[static_cast<std::size_t>(i)];
  std::int64_t n = 0;
  for (std::size_t s = 0; s < list.size(); ++s) {
    const auto simplex = list[s];
    if (std::includes(simplex.begin(), simplex.end(), need.begin(), need.end())) ++n;
  }
  return n;
}

using Functional = std::function<double(const ComplexSample&)>;

inline Functional euler_functional(CoefficientVector a) {
  return [a = std::move(a)](const ComplexSample& c) { return euler_characteristic(c, a); };
}

inline Functional count_functional(int j) {
  return [j](const ComplexSample& c) {
    return j < static_cast<int>(c.simplices.size()) ? static_cast<double>(c.simplices[static_cast<std::size_t>(j)].size())
                                                    : 0.0;
  };
}

/// Λ^k f at (x_1..x_l): Σ_{I ⊆ {1..k}} (−1)^{k−|I|} f(Δ^{x_1..x_l, I}). Every
/// retained-subset complex is rebuilt from scratch with the shared mark key.
inline double lambda_operator(const std::vector<Point>& points, const std::vector<Point>& added, int k,
                              const ConnectionSystem& system, std::uint64_t key, const Functional& f) {
  const std::size_t l = added.size();
  if (k < 0 || static_cast<std::size_t>(k) > l) throw std::invalid_argument("lambda operator needs 0 <= k <= l");
  if (k > 20) throw std::invalid_argument("lambda operator order too large");
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1U << k); ++mask) {
    std::vector<std::size_t> retained;
    for (int b = 0; b < k; ++b)
      if (mask & (1U << b)) retained.push_back(static_cast<std::size_t>(b));
    const auto aug = build_augmented(points, added, retained, system, key);
    const double sign = ((k - static_cast<int>(retained.size())) % 2 == 0) ? 1.0 : -1.0;
    total += sign * f(aug.complex);
  }
  return total;
}

/// Counts of simplices of a full augmented complex split by which added points
/// they contain: result[mask][i] counts i-simplices whose set of added points
/// is exactly `mask`.
inline std::vector<std::vector<std::int64_t>> counts_by_added_mask(const ComplexSample& full, std::size_t base_count,
                                                                    std::size_t added) {
  if (added > 16) throw std::invalid_argument("too many added points");
  std::vector<std::vector<std::int64_t>> out(std::size_t{1} << added, std::vector<std::int64_t>(full.simplices.size(), 0));
  for (std::size_t i = 0; i < full.simplices.size(); ++i) {
    const auto& list = full.simplices[i];
    for (std::size_t s = 0; s < list.size(); ++s) {
      std::size_t mask = 0;
      // Added vertices sit after the base ones, so they trail every tuple.
      const auto simplex = list[s];
      for (auto it = simplex.rbegin(); it != simplex.rend() && *it >= base_count; ++it) mask |= std::size_t{1} << (*it - base_count);
      ++out[mask][i];
    }
  }
  return out;
}

}  // namespace rcsc
