#ifndef RELYROUTE_ROUTING_HPP
#define RELYROUTE_ROUTING_HPP

#include "relyroute/addressing.hpp"
#include "relyroute/graph.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace relyroute {

enum class RoutingMode { Dart, Atr };

std::string_view to_string(RoutingMode mode);
RoutingMode parse_routing_mode(std::string_view text);

struct NextHop {
  Vertex neighbor;
  std::size_t cost; // hops to the sibling subtree when leaving through `neighbor`

  friend bool operator==(const NextHop&, const NextHop&) = default;
};

/// Forwarding state of one node towards one sibling subtree. DART entries hold
/// a single next hop; ATR entries hold every admissible one, ordered by id.
struct RouteEntry {
  std::size_t level;
  std::vector<NextHop> next_hops;
};

class RoutingTables {
public:
  RoutingTables(RoutingMode mode, std::size_t bits, std::vector<std::vector<std::optional<std::size_t>>> costs,
                std::vector<std::vector<std::optional<RouteEntry>>> entries);

  RoutingMode mode() const noexcept { return mode_; }
  std::size_t bits() const noexcept { return bits_; }
  std::size_t node_count() const noexcept { return entries_.size(); }

  /// nullptr when the level-k sibling subtree of u is empty or unreachable.
  const RouteEntry* entry(Vertex u, std::size_t level) const;
  /// Hop distance from u to its level-k sibling subtree, if reachable.
  std::optional<std::size_t> cost(Vertex u, std::size_t level) const;

private:
  RoutingMode mode_;
  std::size_t bits_;
  std::vector<std::vector<std::optional<std::size_t>>> costs_;
  std::vector<std::vector<std::optional<RouteEntry>>> entries_;
};

/// Distance-vector tables over sibling subtrees. A neighbour w of u may carry
/// traffic for u's level-k subtree when it lies in that subtree, or when it
/// shares u's (k+1)-bit prefix and (cost_w(k), w) < (cost_u(k), u). The
/// second clause makes every forwarding walk strictly decrease
/// (unmatched prefix bits, cost, id), so path sets are finite DAGs.
RoutingTables build_tables(const Graph& g, const AddressMap& addrs, RoutingMode mode);

inline constexpr std::size_t default_path_cap = 1'000'000;

struct PathSet {
  Vertex source;
  Vertex target;
  std::vector<std::vector<Vertex>> paths;
  bool truncated = false;
};

/// Hop-by-hop forwarding from s to t, branching over every stored next hop.
PathSet discover_paths(const RoutingTables& tables, const Graph& g, const AddressMap& addrs, Vertex s, Vertex t,
                       std::size_t cap = default_path_cap);

/// Arcs lying on at least one forwarding path from s to t, found without
/// enumerating paths: forward reachability from s over the per-destination
/// forwarding DAG intersected with the nodes that reach t in it.
std::vector<Arc> pair_arcs(const RoutingTables& tables, const Graph& g, const AddressMap& addrs, Vertex s, Vertex t);

/// Directed overlay: the union of pair_arcs over all ordered pairs.
Graph overlay_graph(const RoutingTables& tables, const Graph& g, const AddressMap& addrs);

/// Same union built from explicit discover_paths enumeration. Exponential;
/// meant for cross-checking small instances.
Graph overlay_graph_by_enumeration(const RoutingTables& tables, const Graph& g, const AddressMap& addrs);

/// One path per line, ids separated by '-'.
std::string format_paths(const PathSet& paths);

} // namespace relyroute

#endif // RELYROUTE_ROUTING_HPP
