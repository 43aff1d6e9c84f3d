#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "netepi/dist.hpp"
#include "netepi/error.hpp"
#include "netepi/rng.hpp"

namespace netepi {

using Vertex = std::uint32_t;

/// Undirected simple graph stored as sorted adjacency lists.
class SparseGraph {
 public:
  SparseGraph() = default;

  /// Builds a simple graph from an edge list. Self-loops and repeated edges
  /// are dropped (this is the erasure step of the configuration model).
  static SparseGraph from_edges(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges) {
    SparseGraph g;
    g.adj_.resize(n);
    for (const auto& [u, v] : edges) {
      if (u >= n || v >= n) throw config_error("edge endpoint out of range");
      if (u == v) continue;
      g.adj_[u].push_back(v);
      g.adj_[v].push_back(u);
    }
    for (auto& list : g.adj_) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return g;
  }

  std::size_t size() const noexcept { return adj_.size(); }

  std::size_t edge_count() const noexcept {
    std::size_t twice = 0;
    for (const auto& list : adj_) twice += list.size();
    return twice / 2;
  }

  std::span<const Vertex> neighbors(Vertex v) const { return adj_[v]; }
  std::size_t degree(Vertex v) const { return adj_[v].size(); }

  /// Edges as (u, v) with u < v, ordered by u then v.
  std::vector<std::pair<Vertex, Vertex>> edges() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    for (Vertex u = 0; u < adj_.size(); ++u)
      for (Vertex v : adj_[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  /// Symmetric, loop-free, duplicate-free, sorted.
  bool is_simple() const {
    for (Vertex u = 0; u < adj_.size(); ++u) {
      const auto& list = adj_[u];
      for (std::size_t i = 0; i < list.size(); ++i) {
        const Vertex v = list[i];
        if (v == u || v >= adj_.size()) return false;
        if (i > 0 && list[i - 1] >= v) return false;
        if (!std::binary_search(adj_[v].begin(), adj_[v].end(), u)) return false;
      }
    }
    return true;
  }

  bool operator==(const SparseGraph&) const = default;

 private:
  std::vector<std::vector<Vertex>> adj_;
};

/// ER(n, c/n): each unordered pair is an edge independently with
/// probability c/n. Uses geometric skipping, so cost is O(n + edges).
inline SparseGraph erdos_renyi(std::size_t n, double mean_degree, std::uint64_t seed) {
  if (n == 0) throw config_error("graph needs at least one vertex");
  if (!(mean_degree > 0.0)) throw config_error("mean degree must be > 0");
  const double p = mean_degree / static_cast<double>(n);
  if (p > 1.0) throw config_error("edge probability c/n exceeds 1");

  Rng rng(seed);
  std::vector<std::pair<Vertex, Vertex>> edges;
  if (p == 1.0) {
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    return SparseGraph::from_edges(n, edges);
  }
  // Batagelj-Brandes walk over the lower triangle (v > w).
  const double log_q = std::log1p(-p);
  std::int64_t v = 1;
  std::int64_t w = -1;
  const auto nn = static_cast<std::int64_t>(n);
  while (v < nn) {
    const double skip = std::floor(std::log(rng.uniform_pos()) / log_q);
    w += 1 + static_cast<std::int64_t>(std::min(skip, 1e18));
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) edges.emplace_back(static_cast<Vertex>(w), static_cast<Vertex>(v));
  }
  return SparseGraph::from_edges(n, edges);
}

/// Erased configuration model on an explicit degree sequence: uniform
/// pairing of half-edges, then removal of self-loops and parallel edges.
inline SparseGraph configuration_model(std::span<const std::size_t> degrees, std::uint64_t seed) {
  const std::size_t n = degrees.size();
  if (n == 0) throw config_error("graph needs at least one vertex");
  std::size_t total = 0;
  for (std::size_t d : degrees) {
    if (d >= n) throw config_error("degree must be smaller than the number of vertices");
    total += d;
  }
  if (total % 2 != 0) throw config_error("degree sequence must have an even sum");

  std::vector<Vertex> stubs;
  stubs.reserve(total);
  for (Vertex v = 0; v < n; ++v) stubs.insert(stubs.end(), degrees[v], v);

  Rng rng(seed);
  for (std::size_t i = stubs.size(); i > 1; --i) std::swap(stubs[i - 1], stubs[rng.below(i)]);

  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(total / 2);
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) edges.emplace_back(stubs[i], stubs[i + 1]);
  return SparseGraph::from_edges(n, edges);
}

/// Samples i.i.d. degrees from `law`, fixes an odd sum by incrementing one
/// uniformly chosen vertex, then builds the erased configuration model.
inline SparseGraph configuration_model(std::size_t n, const DegreeDistribution& law, std::uint64_t seed) {
  if (n == 0) throw config_error("graph needs at least one vertex");
  if (law.max_degree() >= n) throw config_error("degree law support must lie below n");
  Rng rng(split_seed(seed, 0));
  const auto probs = law.probs();
  std::vector<double> cdf(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cdf.begin());

  std::vector<std::size_t> degrees(n);
  std::size_t total = 0;
  for (auto& d : degrees) {
    const double u = rng.uniform() * cdf.back();
    d = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    d = std::min(d, probs.size() - 1);
    total += d;
  }
  if (total % 2 != 0) {
    std::size_t v = rng.below(n);
    // a vertex already at n-1 cannot grow; move on to the next one
    while (degrees[v] + 1 >= n) v = (v + 1) % n;
    ++degrees[v];
  }
  return configuration_model(degrees, split_seed(seed, 1));
}

inline DegreeDistribution degree_histogram(const SparseGraph& g) {
  std::vector<std::size_t> counts(1, 0);
  for (Vertex v = 0; v < g.size(); ++v) {
    const std::size_t d = g.degree(v);
    if (d >= counts.size()) counts.resize(d + 1, 0);
    ++counts[d];
  }
  return DegreeDistribution::from_counts(counts);
}

/// One "u v" line per edge, u < v.
inline void write_edge_list(std::ostream& os, const SparseGraph& g) {
  for (const auto& [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

}  // namespace netepi
