#ifndef RELYROUTE_GRAPH_HPP
#define RELYROUTE_GRAPH_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace relyroute {

using Vertex = std::size_t;
using Arc = std::pair<Vertex, Vertex>;

class GraphError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the adjacency-matrix reader. `line` is the 1-based line of the
/// input text; `row`/`column` locate the offending matrix entry when the
/// problem is tied to one (otherwise they are npos).
class ParseError : public std::runtime_error {
public:
  enum class Kind { Header, MalformedRow, NotSquare, NonZeroDiagonal, Asymmetric };

  ParseError(Kind kind, std::size_t line, std::size_t row, std::size_t column, const std::string& what);

  Kind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
  Kind kind_;
  std::size_t line_;
  std::size_t row_;
  std::size_t column_;
};

/// Simple graph on vertices 0..n-1. Undirected graphs store both
/// orientations of every edge, so arc_count() is twice the edge count.
/// Immutable once built.
class Graph {
public:
  Graph() = default;
  Graph(std::size_t n, bool directed, std::span<const Arc> arcs);

  std::size_t vertex_count() const noexcept { return out_.size(); }
  bool directed() const noexcept { return directed_; }
  std::size_t arc_count() const noexcept { return arc_count_; }

  /// Sorted out-neighbours of v.
  const std::vector<Vertex>& out_neighbors(Vertex v) const;
  bool has_arc(Vertex from, Vertex to) const;

  /// All arcs in (from, to) lexicographic order.
  std::vector<Arc> arcs() const;

  /// Number of (undirected) edges for undirected graphs, arcs otherwise.
  std::size_t edge_count() const noexcept { return directed_ ? arc_count_ : arc_count_ / 2; }

  friend bool operator==(const Graph&, const Graph&) = default;

private:
  bool directed_ = false;
  std::size_t arc_count_ = 0;
  std::vector<std::vector<Vertex>> out_;
};

/// Link success probability shared by every arc.
class LinkModel {
public:
  explicit LinkModel(double p);
  double success() const noexcept { return p_; }
  double failure() const noexcept { return 1.0 - p_; }

private:
  double p_;
};

Graph parse_adjacency_matrix(std::string_view text);
std::string serialize_adjacency_matrix(const Graph& g);

Graph read_adjacency_file(const std::string& path);
void write_adjacency_file(const Graph& g, const std::string& path);

/// Directed reachability; an undirected graph behaves as its symmetric digraph.
bool is_connected(const Graph& g, Vertex s, Vertex t);

/// True when every ordered pair is connected.
bool is_strongly_connected(const Graph& g);

/// Minimum number of arcs whose removal leaves t unreachable from s
/// (unit-capacity max-flow).
std::size_t min_cut_size(const Graph& g, Vertex s, Vertex t);

/// Undirected graph with the same vertex set whose edges are the arcs of g
/// taken in both orientations.
Graph symmetrized(const Graph& g);

/// True when every arc of `sub` is also an arc of `super`.
bool arc_subset(const Graph& sub, const Graph& super);

double mean_out_degree(const Graph& g);

} // namespace relyroute

#endif // RELYROUTE_GRAPH_HPP
