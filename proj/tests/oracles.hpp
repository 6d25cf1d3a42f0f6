// Independent reference implementations used only by the tests. Nothing here
// shares code with the library beyond the Graph type.
#ifndef RELYROUTE_TESTS_ORACLES_HPP
#define RELYROUTE_TESTS_ORACLES_HPP

#include "relyroute/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <random>
#include <vector>

namespace oracle {

using relyroute::Arc;
using relyroute::Graph;
using relyroute::Vertex;

// Breadth-first search over the arcs whose bit is clear in `failed`.
inline bool reachable(const std::vector<Arc>& arcs, std::size_t n, std::uint32_t failed, Vertex s, Vertex t)
{
  std::vector<char> seen(n, 0);
  std::deque<Vertex> queue{s};
  seen[s] = 1;
  while (!queue.empty()) {
    Vertex u = queue.front();
    queue.pop_front();
    if (u == t)
      return true;
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      if ((failed >> a) & 1u)
        continue;
      auto [from, to] = arcs[a];
      if (from == u && !seen[to]) {
        seen[to] = 1;
        queue.push_back(to);
      }
    }
  }
  return false;
}

/// counts[i] = number of i-arc failure sets that disconnect t from s.
inline std::vector<std::uint64_t> cut_counts(const Graph& g, Vertex s, Vertex t)
{
  const auto arcs = g.arcs();
  const std::size_t m = arcs.size();
  std::vector<std::uint64_t> counts(m + 1, 0);
  for (std::uint32_t failed = 0; failed < (std::uint32_t{1} << m); ++failed)
    if (!reachable(arcs, g.vertex_count(), failed, s, t))
      ++counts[static_cast<std::size_t>(__builtin_popcount(failed))];
  return counts;
}

/// Smallest number of arcs whose removal separates t from s.
inline std::size_t min_cut(const Graph& g, Vertex s, Vertex t)
{
  auto counts = cut_counts(g, s, t);
  std::size_t i = 0;
  while (counts[i] == 0)
    ++i;
  return i;
}

/// Sum of p^up (1-p)^down over the states where t is reachable.
inline double reliability(const Graph& g, Vertex s, Vertex t, double p)
{
  const auto arcs = g.arcs();
  const std::size_t m = arcs.size();
  double total = 0.0;
  for (std::uint32_t failed = 0; failed < (std::uint32_t{1} << m); ++failed) {
    if (!reachable(arcs, g.vertex_count(), failed, s, t))
      continue;
    int down = __builtin_popcount(failed);
    total += std::pow(p, static_cast<double>(m) - down) * std::pow(1.0 - p, down);
  }
  return total;
}

/// Random simple graph with at most max_arcs stored arcs.
inline Graph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t max_arcs, bool directed)
{
  std::vector<Arc> candidates;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = directed ? 0 : i + 1; j < n; ++j)
      if (i != j)
        candidates.emplace_back(i, j);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const std::size_t per_pick = directed ? 1 : 2;
  std::size_t limit = std::min(candidates.size(), max_arcs / per_pick);
  std::uniform_int_distribution<std::size_t> pick(limit / 2, limit);
  candidates.resize(pick(rng));
  std::vector<Arc> arcs;
  for (auto [i, j] : candidates) {
    arcs.emplace_back(i, j);
    if (!directed)
      arcs.emplace_back(j, i);
  }
  return Graph(n, directed, arcs);
}

} // namespace oracle

#endif // RELYROUTE_TESTS_ORACLES_HPP
