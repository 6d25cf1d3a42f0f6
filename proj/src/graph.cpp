#include "relyroute/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <queue>
#include <sstream>

namespace relyroute {

namespace {

std::string position(std::size_t line, std::size_t row, std::size_t column)
{
  std::string out = "line " + std::to_string(line);
  if (row != ParseError::npos)
    out += ", row " + std::to_string(row);
  if (column != ParseError::npos)
    out += ", column " + std::to_string(column);
  return out;
}

std::vector<std::string_view> split_fields(std::string_view line)
{
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
      ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t')
      ++i;
    if (i > start)
      fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

void check_vertex(const Graph& g, Vertex v)
{
  if (v >= g.vertex_count())
    throw GraphError("vertex " + std::to_string(v) + " out of range [0, " + std::to_string(g.vertex_count()) + ")");
}

} // namespace

ParseError::ParseError(Kind kind, std::size_t line, std::size_t row, std::size_t column, const std::string& what)
    : std::runtime_error(position(line, row, column) + ": " + what), kind_(kind), line_(line), row_(row),
      column_(column)
{
}

Graph::Graph(std::size_t n, bool directed, std::span<const Arc> arcs) : directed_(directed), out_(n)
{
  for (auto [from, to] : arcs) {
    if (from >= n || to >= n)
      throw GraphError("arc (" + std::to_string(from) + "," + std::to_string(to) + ") has an endpoint outside [0, " +
                       std::to_string(n) + ")");
    if (from == to)
      throw GraphError("self-loop at vertex " + std::to_string(from));
    out_[from].push_back(to);
  }
  for (std::size_t v = 0; v < n; ++v) {
    auto& nb = out_[v];
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
      throw GraphError("duplicate arc leaving vertex " + std::to_string(v));
    arc_count_ += nb.size();
  }
  if (!directed_) {
    for (std::size_t v = 0; v < n; ++v)
      for (Vertex w : out_[v])
        if (!std::binary_search(out_[w].begin(), out_[w].end(), v))
          throw GraphError("undirected graph is missing arc (" + std::to_string(w) + "," + std::to_string(v) + ")");
  }
}

const std::vector<Vertex>& Graph::out_neighbors(Vertex v) const
{
  check_vertex(*this, v);
  return out_[v];
}

bool Graph::has_arc(Vertex from, Vertex to) const
{
  check_vertex(*this, from);
  check_vertex(*this, to);
  return std::binary_search(out_[from].begin(), out_[from].end(), to);
}

std::vector<Arc> Graph::arcs() const
{
  std::vector<Arc> out;
  out.reserve(arc_count_);
  for (Vertex v = 0; v < out_.size(); ++v)
    for (Vertex w : out_[v])
      out.emplace_back(v, w);
  return out;
}

LinkModel::LinkModel(double p) : p_(p)
{
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("link success probability must lie in [0, 1]");
}

Graph parse_adjacency_matrix(std::string_view text)
{
  using Kind = ParseError::Kind;
  constexpr auto npos = ParseError::npos;

  std::size_t n = 0;
  bool directed = false;
  bool have_header = false;
  std::size_t row = 0;
  std::size_t header_line = 0;
  std::vector<std::vector<char>> matrix;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos)
      end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (!line.empty() && line.front() == '#')
      continue;
    auto fields = split_fields(line);
    if (fields.empty())
      continue;

    if (!have_header) {
      if (fields.size() != 2)
        throw ParseError(Kind::Header, line_no, npos, npos, "header must be '<n> <directed|undirected>'");
      auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), n);
      if (ec != std::errc{} || ptr != fields[0].data() + fields[0].size())
        throw ParseError(Kind::Header, line_no, npos, npos, "vertex count '" + std::string(fields[0]) + "' is not a number");
      if (fields[1] == "directed")
        directed = true;
      else if (fields[1] == "undirected")
        directed = false;
      else
        throw ParseError(Kind::Header, line_no, npos, npos,
                         "orientation must be 'directed' or 'undirected', got '" + std::string(fields[1]) + "'");
      have_header = true;
      header_line = line_no;
      matrix.assign(n, std::vector<char>(n, 0));
      continue;
    }

    if (row >= n)
      throw ParseError(Kind::NotSquare, line_no, row, npos,
                       "more than " + std::to_string(n) + " matrix rows");
    if (fields.size() != n)
      throw ParseError(Kind::NotSquare, line_no, row, std::min(fields.size(), n),
                       "row has " + std::to_string(fields.size()) + " entries, expected " + std::to_string(n));
    for (std::size_t col = 0; col < n; ++col) {
      if (fields[col] == "0")
        matrix[row][col] = 0;
      else if (fields[col] == "1")
        matrix[row][col] = 1;
      else
        throw ParseError(Kind::MalformedRow, line_no, row, col,
                         "entry '" + std::string(fields[col]) + "' is not 0 or 1");
    }
    if (matrix[row][row] != 0)
      throw ParseError(Kind::NonZeroDiagonal, line_no, row, row, "diagonal entry must be 0");
    ++row;
  }

  if (!have_header)
    throw ParseError(Kind::Header, line_no, npos, npos, "missing header line");
  if (row != n)
    throw ParseError(Kind::NotSquare, header_line + row, row, npos,
                     "expected " + std::to_string(n) + " matrix rows, found " + std::to_string(row));

  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!matrix[i][j])
        continue;
      if (!directed && !matrix[j][i])
        throw ParseError(Kind::Asymmetric, npos, j, i,
                         "undirected matrix is not symmetric: entry (" + std::to_string(i) + "," + std::to_string(j) +
                             ") is 1 but (" + std::to_string(j) + "," + std::to_string(i) + ") is 0");
      arcs.emplace_back(i, j);
    }
  return Graph(n, directed, arcs);
}

std::string serialize_adjacency_matrix(const Graph& g)
{
  const std::size_t n = g.vertex_count();
  std::string out = std::to_string(n) + (g.directed() ? " directed\n" : " undirected\n");
  out.reserve(out.size() + n * 2 * n);
  for (Vertex i = 0; i < n; ++i) {
    std::vector<char> row(n, '0');
    for (Vertex j : g.out_neighbors(i))
      row[j] = '1';
    for (std::size_t j = 0; j < n; ++j) {
      if (j)
        out += ' ';
      out += row[j];
    }
    out += '\n';
  }
  return out;
}

Graph read_adjacency_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::ios_base::failure("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_adjacency_matrix(buf.str());
}

void write_adjacency_file(const Graph& g, const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::ios_base::failure("cannot write '" + path + "'");
  out << serialize_adjacency_matrix(g);
  if (!out)
    throw std::ios_base::failure("failed writing '" + path + "'");
}

bool is_connected(const Graph& g, Vertex s, Vertex t)
{
  check_vertex(g, s);
  check_vertex(g, t);
  if (s == t)
    return true;
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<Vertex> stack{s};
  seen[s] = 1;
  while (!stack.empty()) {
    Vertex u = stack.back();
    stack.pop_back();
    for (Vertex w : g.out_neighbors(u)) {
      if (w == t)
        return true;
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return false;
}

bool is_strongly_connected(const Graph& g)
{
  const std::size_t n = g.vertex_count();
  for (Vertex s = 0; s < n; ++s)
    for (Vertex t = 0; t < n; ++t)
      if (!is_connected(g, s, t))
        return false;
  return true;
}

std::size_t min_cut_size(const Graph& g, Vertex s, Vertex t)
{
  check_vertex(g, s);
  check_vertex(g, t);
  if (s == t)
    throw GraphError("min_cut_size needs distinct terminals");

  const std::size_t n = g.vertex_count();
  // residual[u][v]: remaining capacity on u->v; every arc carries one unit.
  std::vector<std::vector<int>> residual(n, std::vector<int>(n, 0));
  for (auto [u, v] : g.arcs())
    residual[u][v] += 1;

  std::size_t flow = 0;
  std::vector<Vertex> parent(n);
  for (;;) {
    std::fill(parent.begin(), parent.end(), n);
    parent[s] = s;
    std::queue<Vertex> queue;
    queue.push(s);
    while (!queue.empty() && parent[t] == n) {
      Vertex u = queue.front();
      queue.pop();
      for (Vertex v = 0; v < n; ++v)
        if (parent[v] == n && residual[u][v] > 0) {
          parent[v] = u;
          queue.push(v);
        }
    }
    if (parent[t] == n)
      return flow;
    for (Vertex v = t; v != s; v = parent[v]) {
      residual[parent[v]][v] -= 1;
      residual[v][parent[v]] += 1;
    }
    ++flow;
  }
}

Graph symmetrized(const Graph& g)
{
  std::vector<Arc> arcs;
  for (auto [u, v] : g.arcs()) {
    arcs.emplace_back(u, v);
    if (!g.has_arc(v, u))
      arcs.emplace_back(v, u);
  }
  return Graph(g.vertex_count(), false, arcs);
}

bool arc_subset(const Graph& sub, const Graph& super)
{
  if (sub.vertex_count() != super.vertex_count())
    return false;
  for (auto [u, v] : sub.arcs())
    if (!super.has_arc(u, v))
      return false;
  return true;
}

double mean_out_degree(const Graph& g)
{
  if (g.vertex_count() == 0)
    return 0.0;
  return static_cast<double>(g.arc_count()) / static_cast<double>(g.vertex_count());
}

} // namespace relyroute
