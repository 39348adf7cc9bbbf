#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "rcsc/connect.hpp"
#include "rcsc/rng.hpp"
#include "rcsc/space.hpp"

namespace rcsc {

using VertexIndex = std::uint32_t;

/// Simplices of one dimension, stored flat with stride dimension+1. Each
/// tuple is strictly increasing; the list is kept in lexicographic order so
/// membership is a binary search.
class SimplexList {
 public:
  explicit SimplexList(int dimension = 0) : dimension_(dimension) {}

  int dimension() const { return dimension_; }
  std::size_t stride() const { return static_cast<std::size_t>(dimension_) + 1; }
  std::size_t size() const { return data_.size() / stride(); }
  bool empty() const { return data_.empty(); }

  std::span<const VertexIndex> operator[](std::size_t i) const {
    return {data_.data() + i * stride(), stride()};
  }

  void push_back(std::span<const VertexIndex> s) {
    for (VertexIndex v : s) data_.push_back(v);
  }

  void reserve(std::size_t simplices) { data_.reserve(simplices * stride()); }

  bool contains(std::span<const VertexIndex> s) const {
    std::size_t lo = 0;
    std::size_t hi = size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      const auto m = (*this)[mid];
      if (std::lexicographical_compare(m.begin(), m.end(), s.begin(), s.end())) lo = mid + 1;
      else hi = mid;
    }
    if (lo == size()) return false;
    const auto m = (*this)[lo];
    return std::equal(m.begin(), m.end(), s.begin(), s.end());
  }

  /// Restore lexicographic order after out-of-order insertion.
  void sort() {
    std::vector<std::size_t> order(size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
      const auto x = (*this)[a];
      const auto y = (*this)[b];
      return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
    });
    std::vector<VertexIndex> sorted;
    sorted.reserve(data_.size());
    for (std::size_t i : order) {
      const auto s = (*this)[i];
      sorted.insert(sorted.end(), s.begin(), s.end());
    }
    data_ = std::move(sorted);
  }

  const std::vector<VertexIndex>& data() const { return data_; }

  friend bool operator==(const SimplexList&, const SimplexList&) = default;

 private:
  int dimension_;
  std::vector<VertexIndex> data_;
};

/// One realization of the complex. `simplices[j]` lists the j-simplices as
/// tuples of positions in `vertices`.
struct ComplexSample {
  std::vector<Point> vertices;
  std::vector<SimplexList> simplices;
  std::uint64_t key = 0;

  int alpha() const { return static_cast<int>(simplices.size()) - 1; }
};

/// Complex generated by the given simplices (downward closure), on `vertex_count`
/// vertices with default points. Used for hand-built examples and templates.
inline ComplexSample complex_from_generators(std::size_t vertex_count, const std::vector<std::vector<VertexIndex>>& generators,
                                             int alpha) {
  ComplexSample c;
  c.vertices.resize(vertex_count);
  for (std::size_t i = 0; i < vertex_count; ++i) c.vertices[i].id = i;
  c.simplices.reserve(static_cast<std::size_t>(alpha) + 1);
  for (int j = 0; j <= alpha; ++j) c.simplices.emplace_back(j);
  std::vector<std::vector<std::vector<VertexIndex>>> faces(static_cast<std::size_t>(alpha) + 1);
  for (VertexIndex v = 0; v < vertex_count; ++v) faces[0].push_back({v});
  for (auto g : generators) {
    std::sort(g.begin(), g.end());
    if (g.empty() || g.size() > static_cast<std::size_t>(alpha) + 1 || g.back() >= vertex_count)
      throw std::invalid_argument("generator out of range");
    const std::size_t k = g.size();
    for (std::uint32_t mask = 1; mask < (1U << k); ++mask) {
      std::vector<VertexIndex> face;
      for (std::size_t b = 0; b < k; ++b)
        if (mask & (1U << b)) face.push_back(g[b]);
      faces[face.size() - 1].push_back(std::move(face));
    }
  }
  for (int j = 0; j <= alpha; ++j) {
    auto& f = faces[static_cast<std::size_t>(j)];
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    for (const auto& s : f) c.simplices[static_cast<std::size_t>(j)].push_back(s);
  }
  return c;
}

/// Uniform in [0,1) attached to a candidate simplex: a keyed hash of the
/// vertex identities listed in ≺ order. It depends on nothing else, so adding
/// or removing other points never changes the mark of an existing tuple.
inline double derive_mark(std::uint64_t key, std::span<const std::uint64_t> ordered_ids) {
  std::uint64_t h = splitmix64(key ^ (0xa0761d6478bd642fULL * (ordered_ids.size() + 1)));
  for (std::uint64_t id : ordered_ids) h = splitmix64(h ^ splitmix64(id));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// As above for a tuple of points in any order; they are sorted by ≺ first.
inline double derive_mark(std::uint64_t key, std::span<const Point> tuple) {
  std::array<const Point*, kMaxAlpha + 1> sorted{};
  if (tuple.size() > sorted.size()) throw std::invalid_argument("tuple too large");
  for (std::size_t i = 0; i < tuple.size(); ++i) sorted[i] = &tuple[i];
  std::sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(tuple.size()),
            [](const Point* a, const Point* b) { return precedes(*a, *b); });
  std::array<std::uint64_t, kMaxAlpha + 1> ids{};
  for (std::size_t i = 0; i < tuple.size(); ++i) ids[i] = sorted[i]->id;
  return derive_mark(key, std::span<const std::uint64_t>(ids.data(), tuple.size()));
}

namespace detail {

inline void reject_duplicate_keys(const std::vector<Point>& points) {
  std::vector<std::pair<double, std::uint64_t>> keys;
  keys.reserve(points.size());
  for (const auto& p : points) keys.emplace_back(p.order_key, p.id);
  std::sort(keys.begin(), keys.end());
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (keys[i].first == keys[i - 1].first) throw std::invalid_argument("duplicate order keys in point sample");
    if (keys[i].second == keys[i - 1].second) throw std::invalid_argument("duplicate point identities in point sample");
  }
}

/// Calls `visit(i, j)` with i < j for every pair that can have φ_1 > 0.
template <typename Visit>
void candidate_pairs(const std::vector<Point>& points, const ConnectionSystem& system, Visit&& visit) {
  const std::size_t n = points.size();
  if (const auto range = system.range()) {
    if (*range <= 0.0) return;
    std::vector<VertexIndex> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](VertexIndex a, VertexIndex b) {
      return points[a].location[0] < points[b].location[0];
    });
    for (std::size_t a = 0; a < n; ++a) {
      const double x = points[order[a]].location[0];
      for (std::size_t b = a + 1; b < n && points[order[b]].location[0] - x <= *range; ++b) {
        const VertexIndex i = std::min(order[a], order[b]);
        const VertexIndex j = std::max(order[a], order[b]);
        visit(i, j);
      }
    }
    return;
  }
  for (VertexIndex i = 0; i < n; ++i)
    for (VertexIndex j = i + 1; j < n; ++j) visit(i, j);
}

}  // namespace detail

namespace detail {

// With `store_top` false the top-dimensional simplices (α ≥ 2) are only
// counted into `top_count`; their list stays empty.
inline ComplexSample build_stages(std::vector<Point> points, const ConnectionSystem& system, std::uint64_t key, bool store_top,
                                  std::int64_t& top_count) {
  const int alpha = system.alpha();
  top_count = 0;
  detail::reject_duplicate_keys(points);
  const std::size_t n = points.size();

  ComplexSample c;
  c.key = key;
  c.vertices = std::move(points);
  c.simplices.reserve(static_cast<std::size_t>(alpha) + 1);
  for (int j = 0; j <= alpha; ++j) c.simplices.emplace_back(j);
  for (VertexIndex v = 0; v < n; ++v) c.simplices[0].push_back(std::span<const VertexIndex>(&v, 1));

  const auto& pts = c.vertices;
  std::array<Point, kMaxAlpha + 1> tuple{};
  auto accept = [&](std::span<const VertexIndex> idx) {
    for (std::size_t i = 0; i < idx.size(); ++i) tuple[i] = pts[idx[i]];
    const std::span<const Point> t(tuple.data(), idx.size());
    const double phi = system(t);
    if (!(phi > 0.0)) return false;
    if (phi >= 1.0) return true;
    return derive_mark(key, t) < phi;
  };

  // Higher-indexed neighbours of each vertex in the accepted 1-skeleton,
  // stored as up[start[i]..start[i+1]).
  std::vector<std::pair<VertexIndex, VertexIndex>> edges;
  detail::candidate_pairs(pts, system, [&](VertexIndex i, VertexIndex j) {
    const std::array<VertexIndex, 2> e{i, j};
    if (accept(e)) edges.emplace_back(i, j);
  });
  std::sort(edges.begin(), edges.end());
  std::vector<std::size_t> start(n + 1, 0);
  std::vector<VertexIndex> up_flat;
  up_flat.reserve(edges.size());
  c.simplices[1].reserve(edges.size());
  for (const auto& [i, j] : edges) {
    ++start[i + 1];
    up_flat.push_back(j);
    const std::array<VertexIndex, 2> e{i, j};
    c.simplices[1].push_back(e);
  }
  for (std::size_t i = 0; i < n; ++i) start[i + 1] += start[i];
  auto up = [&](VertexIndex i) { return std::span<const VertexIndex>(up_flat.data() + start[i], start[i + 1] - start[i]); };

  std::array<VertexIndex, kMaxAlpha + 1> cand{};
  std::array<VertexIndex, kMaxAlpha + 1> face{};
  for (int j = 2; j <= alpha; ++j) {
    const SimplexList& lower = c.simplices[static_cast<std::size_t>(j) - 1];
    SimplexList& current = c.simplices[static_cast<std::size_t>(j)];
    if (lower.empty()) break;
    for (std::size_t s = 0; s < lower.size(); ++s) {
      const auto sigma = lower[s];
      const auto first_nb = up(sigma[0]);
      for (auto it = std::upper_bound(first_nb.begin(), first_nb.end(), sigma.back()); it != first_nb.end(); ++it) {
        const VertexIndex v = *it;
        bool clique = true;
        for (std::size_t k = 1; k < sigma.size() && clique; ++k) clique = std::binary_search(up(sigma[k]).begin(), up(sigma[k]).end(), v);
        if (!clique) continue;
        std::copy(sigma.begin(), sigma.end(), cand.begin());
        cand[sigma.size()] = v;
        const std::span<const VertexIndex> tau(cand.data(), sigma.size() + 1);
        // Faces through v must have been accepted; edges are implied by the clique test.
        bool faces_present = true;
        if (j >= 3) {
          for (std::size_t drop = 0; drop < sigma.size() && faces_present; ++drop) {
            std::size_t w = 0;
            for (std::size_t k = 0; k < tau.size(); ++k)
              if (k != drop) face[w++] = tau[k];
            faces_present = lower.contains(std::span<const VertexIndex>(face.data(), w));
          }
        }
        if (!faces_present || !accept(tau)) continue;
        if (j == alpha) ++top_count;
        if (j < alpha || store_top) current.push_back(tau);
      }
    }
  }
  if (alpha == 1) top_count = static_cast<std::int64_t>(c.simplices[1].size());
  return c;
}

}  // namespace detail

/// Builds the complex on `points` stage by stage: a (j+1)-tuple is a candidate
/// only once all its j-faces were accepted, and is accepted iff its keyed mark
/// U satisfies U < φ_j(tuple).
inline ComplexSample build_complex(std::vector<Point> points, const ConnectionSystem& system, std::uint64_t key) {
  std::int64_t top = 0;
  return detail::build_stages(std::move(points), system, key, true, top);
}

/// f_0..f_α of build_complex(points, system, key) without keeping the top simplices.
inline std::vector<std::int64_t> complex_counts(std::vector<Point> points, const ConnectionSystem& system, std::uint64_t key) {
  std::int64_t top = 0;
  const auto c = detail::build_stages(std::move(points), system, key, false, top);
  std::vector<std::int64_t> f;
  for (int j = 0; j < system.alpha(); ++j) f.push_back(static_cast<std::int64_t>(c.simplices[static_cast<std::size_t>(j)].size()));
  f.push_back(top);
  return f;
}

/// Complex built from Φ plus the added points x_1..x_l, with every simplex
/// meeting a dropped added point removed. Vertices keep their positions: the
/// first `base_count` are the original points, then the added ones in order.
struct AugmentedSample {
  ComplexSample complex;
  std::size_t base_count = 0;
  std::vector<bool> retained;

  std::size_t added_count() const { return retained.size(); }
  VertexIndex added_vertex(std::size_t i) const { return static_cast<VertexIndex>(base_count + i); }
};

/// Drops every simplex that contains a vertex rejected by `keep`.
template <typename Keep>
ComplexSample filter_vertices(const ComplexSample& full, Keep&& keep) {
  ComplexSample out;
  out.vertices = full.vertices;
  out.key = full.key;
  for (const auto& list : full.simplices) {
    SimplexList kept(list.dimension());
    for (std::size_t s = 0; s < list.size(); ++s) {
      const auto simplex = list[s];
      if (std::all_of(simplex.begin(), simplex.end(), [&](VertexIndex v) { return keep(v); })) kept.push_back(simplex);
    }
    out.simplices.push_back(std::move(kept));
  }
  return out;
}

/// Tags the added points with identities disjoint from sampled ones.
inline std::vector<Point> augmented_points(const std::vector<Point>& points, const std::vector<Point>& added) {
  std::vector<Point> all = points;
  all.reserve(points.size() + added.size());
  for (std::size_t i = 0; i < added.size(); ++i) {
    Point p = added[i];
    p.id = kAddedPointTag | static_cast<std::uint64_t>(i);
    all.push_back(p);
  }
  return all;
}

/// `retained` lists 0-based positions into `added` (the retention set I).
inline AugmentedSample build_augmented(const std::vector<Point>& points, const std::vector<Point>& added,
                                       std::span<const std::size_t> retained, const ConnectionSystem& system,
                                       std::uint64_t key) {
  AugmentedSample aug;
  aug.base_count = points.size();
  aug.retained.assign(added.size(), false);
  for (std::size_t i : retained) {
    if (i >= added.size()) throw std::invalid_argument("retention set is not a subset of the added points");
    if (aug.retained[i]) throw std::invalid_argument("retention set lists a point twice");
    aug.retained[i] = true;
  }
  const ComplexSample full = build_complex(augmented_points(points, added), system, key);
  const std::size_t base = aug.base_count;
  aug.complex = filter_vertices(full, [&](VertexIndex v) { return v < base || aug.retained[v - base]; });
  return aug;
}

/// Line format: one simplex per line, its dimension followed by vertex indices.
inline void write_simplices(std::ostream& os, const ComplexSample& c) {
  os << "# rcsc-simplices v1: <dimension> <vertex indices...>\n";
  for (const auto& list : c.simplices) {
    for (std::size_t s = 0; s < list.size(); ++s) {
      os << list.dimension();
      for (VertexIndex v : list[s]) os << ' ' << v;
      os << '\n';
    }
  }
}

}  // namespace rcsc
