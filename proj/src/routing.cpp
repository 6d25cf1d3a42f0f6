#include "relyroute/routing.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace relyroute {

std::string_view to_string(RoutingMode mode)
{
  return mode == RoutingMode::Dart ? "dart" : "atr";
}

RoutingMode parse_routing_mode(std::string_view text)
{
  if (text == "dart" || text == "DART")
    return RoutingMode::Dart;
  if (text == "atr" || text == "ATR")
    return RoutingMode::Atr;
  throw std::invalid_argument("routing mode must be 'dart' or 'atr', got '" + std::string(text) + "'");
}

RoutingTables::RoutingTables(RoutingMode mode, std::size_t bits,
                             std::vector<std::vector<std::optional<std::size_t>>> costs,
                             std::vector<std::vector<std::optional<RouteEntry>>> entries)
    : mode_(mode), bits_(bits), costs_(std::move(costs)), entries_(std::move(entries))
{
}

const RouteEntry* RoutingTables::entry(Vertex u, std::size_t level) const
{
  if (u >= entries_.size() || level >= bits_)
    throw std::out_of_range("routing table lookup out of range");
  const auto& e = entries_[u][level];
  return e ? &*e : nullptr;
}

std::optional<std::size_t> RoutingTables::cost(Vertex u, std::size_t level) const
{
  if (u >= costs_.size() || level >= bits_)
    throw std::out_of_range("routing table lookup out of range");
  return costs_[u][level];
}

RoutingTables build_tables(const Graph& g, const AddressMap& addrs, RoutingMode mode)
{
  const std::size_t n = g.vertex_count();
  const std::size_t l = addrs.bits();
  if (addrs.node_count() < n)
    throw std::invalid_argument("address map covers " + std::to_string(addrs.node_count()) + " of " +
                                std::to_string(n) + " nodes");
  for (Vertex v = 0; v < n; ++v)
    if (!addrs.has(v))
      throw std::invalid_argument("address map has no address for node " + std::to_string(v));

  // divergence[u][w] for every arc, computed once.
  std::vector<std::vector<std::size_t>> divergence(n);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex w : g.out_neighbors(u))
      divergence[u].push_back(level_of_divergence(addrs.at(u), addrs.at(w)));

  // Synchronous Bellman-Ford rounds. A neighbour inside the subtree is one hop
  // away; a neighbour sharing the (k+1)-bit prefix relays its own level-k cost.
  using Cost = std::optional<std::size_t>;
  std::vector<std::vector<Cost>> cost(n, std::vector<Cost>(l));
  for (std::size_t round = 0; round <= n; ++round) {
    auto next = cost;
    for (Vertex u = 0; u < n; ++u) {
      const auto& nb = g.out_neighbors(u);
      for (std::size_t k = 0; k < l; ++k) {
        Cost best;
        for (std::size_t i = 0; i < nb.size(); ++i) {
          Cost via;
          if (divergence[u][i] == k)
            via = 1;
          else if (divergence[u][i] > k && cost[nb[i]][k])
            via = *cost[nb[i]][k] + 1;
          if (via && (!best || *via < *best))
            best = via;
        }
        next[u][k] = best;
      }
    }
    if (next == cost)
      break;
    cost = std::move(next);
  }

  std::vector<std::vector<std::optional<RouteEntry>>> entries(n, std::vector<std::optional<RouteEntry>>(l));
  for (Vertex u = 0; u < n; ++u) {
    const auto& nb = g.out_neighbors(u);
    for (std::size_t k = 0; k < l; ++k) {
      if (!cost[u][k])
        continue;
      RouteEntry entry{k, {}};
      for (std::size_t i = 0; i < nb.size(); ++i) {
        Vertex w = nb[i];
        if (divergence[u][i] == k)
          entry.next_hops.push_back({w, 1});
        else if (divergence[u][i] > k && cost[w][k] &&
                 std::pair(*cost[w][k], w) < std::pair(*cost[u][k], u))
          entry.next_hops.push_back({w, *cost[w][k] + 1});
      }
      if (entry.next_hops.empty())
        throw std::logic_error("finite subtree cost without an admissible next hop");
      if (mode == RoutingMode::Dart) {
        auto best = std::min_element(entry.next_hops.begin(), entry.next_hops.end(), [](const auto& a, const auto& b) {
          return std::pair(a.cost, a.neighbor) < std::pair(b.cost, b.neighbor);
        });
        entry.next_hops = {*best};
      }
      entries[u][k] = std::move(entry);
    }
  }
  return RoutingTables(mode, l, std::move(cost), std::move(entries));
}

namespace {

void check_pair(const Graph& g, const AddressMap& addrs, Vertex s, Vertex t)
{
  if (s >= g.vertex_count() || t >= g.vertex_count())
    throw std::out_of_range("node id out of range");
  if (!addrs.has(s) || !addrs.has(t))
    throw std::invalid_argument("unaddressed endpoint");
}

const RouteEntry* forwarding_entry(const RoutingTables& tables, const AddressMap& addrs, Vertex u, Vertex t)
{
  std::size_t k = level_of_divergence(addrs.at(u), addrs.at(t));
  return tables.entry(u, k);
}

void walk(const RoutingTables& tables, const AddressMap& addrs, Vertex t, std::size_t cap, std::vector<Vertex>& path,
          std::vector<char>& on_path, PathSet& out)
{
  Vertex u = path.back();
  if (u == t) {
    if (out.paths.size() >= cap) {
      out.truncated = true;
      return;
    }
    out.paths.push_back(path);
    return;
  }
  const RouteEntry* entry = forwarding_entry(tables, addrs, u, t);
  if (!entry)
    return;
  for (const auto& hop : entry->next_hops) {
    if (out.truncated)
      return;
    if (on_path[hop.neighbor])
      throw std::logic_error("forwarding revisited node " + std::to_string(hop.neighbor));
    path.push_back(hop.neighbor);
    on_path[hop.neighbor] = 1;
    walk(tables, addrs, t, cap, path, on_path, out);
    on_path[hop.neighbor] = 0;
    path.pop_back();
  }
}

// Forwarding DAG towards t: for every u != t, the arcs to its stored next hops.
std::vector<std::vector<Vertex>> forwarding_dag(const RoutingTables& tables, const AddressMap& addrs, std::size_t n,
                                                Vertex t)
{
  std::vector<std::vector<Vertex>> dag(n);
  for (Vertex u = 0; u < n; ++u) {
    if (u == t)
      continue;
    if (const RouteEntry* entry = forwarding_entry(tables, addrs, u, t))
      for (const auto& hop : entry->next_hops)
        dag[u].push_back(hop.neighbor);
  }
  return dag;
}

std::vector<char> reaches_target(const std::vector<std::vector<Vertex>>& dag, Vertex t)
{
  const std::size_t n = dag.size();
  std::vector<std::vector<Vertex>> reverse(n);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex w : dag[u])
      reverse[w].push_back(u);
  std::vector<char> good(n, 0);
  std::vector<Vertex> stack{t};
  good[t] = 1;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    for (Vertex u : reverse[v])
      if (!good[u]) {
        good[u] = 1;
        stack.push_back(u);
      }
  }
  return good;
}

void collect_pair_arcs(const std::vector<std::vector<Vertex>>& dag, const std::vector<char>& good, Vertex s,
                       std::vector<Arc>& out)
{
  const std::size_t n = dag.size();
  if (!good[s])
    return;
  std::vector<char> seen(n, 0);
  std::vector<Vertex> stack{s};
  seen[s] = 1;
  while (!stack.empty()) {
    Vertex u = stack.back();
    stack.pop_back();
    for (Vertex w : dag[u]) {
      if (!good[w])
        continue;
      out.emplace_back(u, w);
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
}

} // namespace

PathSet discover_paths(const RoutingTables& tables, const Graph& g, const AddressMap& addrs, Vertex s, Vertex t,
                       std::size_t cap)
{
  check_pair(g, addrs, s, t);
  PathSet out{s, t, {}, false};
  if (s == t)
    return out;
  std::vector<Vertex> path{s};
  std::vector<char> on_path(g.vertex_count(), 0);
  on_path[s] = 1;
  walk(tables, addrs, t, cap, path, on_path, out);
  return out;
}

std::vector<Arc> pair_arcs(const RoutingTables& tables, const Graph& g, const AddressMap& addrs, Vertex s, Vertex t)
{
  check_pair(g, addrs, s, t);
  std::vector<Arc> out;
  if (s == t)
    return out;
  auto dag = forwarding_dag(tables, addrs, g.vertex_count(), t);
  collect_pair_arcs(dag, reaches_target(dag, t), s, out);
  std::sort(out.begin(), out.end());
  return out;
}

Graph overlay_graph(const RoutingTables& tables, const Graph& g, const AddressMap& addrs)
{
  const std::size_t n = g.vertex_count();
  std::vector<Arc> arcs;
  for (Vertex t = 0; t < n; ++t) {
    auto dag = forwarding_dag(tables, addrs, n, t);
    auto good = reaches_target(dag, t);
    for (Vertex s = 0; s < n; ++s)
      if (s != t)
        collect_pair_arcs(dag, good, s, arcs);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  return Graph(n, true, arcs);
}

Graph overlay_graph_by_enumeration(const RoutingTables& tables, const Graph& g, const AddressMap& addrs)
{
  const std::size_t n = g.vertex_count();
  std::set<Arc> arcs;
  for (Vertex s = 0; s < n; ++s)
    for (Vertex t = 0; t < n; ++t) {
      if (s == t)
        continue;
      auto found = discover_paths(tables, g, addrs, s, t);
      if (found.truncated)
        throw std::runtime_error("path enumeration truncated; use overlay_graph");
      for (const auto& path : found.paths)
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
          arcs.emplace(path[i], path[i + 1]);
    }
  std::vector<Arc> list(arcs.begin(), arcs.end());
  return Graph(n, true, list);
}

std::string format_paths(const PathSet& paths)
{
  std::string out;
  for (const auto& path : paths.paths) {
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (i)
        out += '-';
      out += std::to_string(path[i]);
    }
    out += '\n';
  }
  return out;
}

} // namespace relyroute
