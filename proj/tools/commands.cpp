#include "commands.hpp"

#include "relyroute/addressing.hpp"
#include "relyroute/graph.hpp"
#include "relyroute/reliability.hpp"
#include "relyroute/routing.hpp"
#include "relyroute/topology.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace relyroute::cli {

namespace {

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

constexpr const char* default_p_grid = "0.05:0.95:0.05";

// `start:stop:step` with inclusive endpoints. Points are snapped to 1e-12 so
// that 0.05 + 2 * 0.05 prints and evaluates as 0.15.
std::vector<double> parse_p_grid(const std::string& text)
{
  double start = 0, stop = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
    throw UsageError("--p-grid must look like start:stop:step, got '" + text + "'");
  if (!(0.0 <= start && start <= stop && stop <= 1.0) || !(step > 0.0))
    throw UsageError("--p-grid needs 0 <= start <= stop <= 1 and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> values;
  values.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    values.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
  return values;
}

std::string number(double v)
{
  return std::isnan(v) ? "nan" : fmt::format("{:.12g}", v);
}

std::string read_text(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::ios_base::failure("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::string& path, const std::string& text)
{
  std::ofstream file(path, std::ios::binary);
  if (!file)
    throw std::ios_base::failure("cannot write '" + path + "'");
  file << text;
  if (!file)
    throw std::ios_base::failure("failed writing '" + path + "'");
}

// Writes to `path`, or to `out` when no path was given.
void emit(const std::string& path, const std::string& text, std::ostream& out)
{
  if (path.empty() || path == "-")
    out << text;
  else
    write_text(path, text);
}

class Metadata {
public:
  template <typename T>
  void add(const std::string& key, const T& value)
  {
    lines_ += fmt::format("# {}={}\n", key, value);
  }
  const std::string& text() const { return lines_; }

private:
  std::string lines_;
};

std::string digest_hex(const AddressMap& map)
{
  return fmt::format("{:016x}", address_map_digest(map));
}

EnumerationOptions enumeration_options()
{
  EnumerationOptions options;
  try {
    options.time_budget = time_budget_from_environment();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return options;
}

FlowWeights load_weights(const std::string& path)
{
  if (path.empty())
    return {};
  try {
    return FlowWeights::parse(read_text(path));
  } catch (const std::invalid_argument& e) {
    throw InputError(path + ": " + e.what());
  }
}

Graph load_physical(const std::string& path)
{
  Graph g = read_adjacency_file(path);
  if (g.directed())
    throw InputError(path + ": routing needs an undirected topology");
  return g;
}

struct Allocation {
  AddressMap map;
  std::string rule;
};

// `bits` is a number, "default" for ceil(log2 n) + 2, or "auto" for the
// smallest length from the default upwards that the allocator can satisfy.
Allocation allocate(const Graph& g, Vertex root, const std::string& bits)
{
  const std::size_t n = g.vertex_count();
  if (root >= n)
    throw UsageError(fmt::format("--root {} is not a node of a {}-node topology", root, n));
  if (!is_strongly_connected(g))
    throw InputError("topology is disconnected; addresses cannot be allocated");
  if (bits == "auto") {
    for (std::size_t l = default_address_bits(n); l <= Address::max_bits; ++l) {
      try {
        return {allocate_addresses(g, root, l), "auto"};
      } catch (const AllocationError&) {
      }
    }
    throw UsageError("no address length up to 63 bits can be allocated");
  }
  std::size_t l = default_address_bits(n);
  std::string rule = "default";
  if (bits != "default") {
    std::size_t used = 0;
    try {
      l = std::stoul(bits, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != bits.size() || l == 0 || l > Address::max_bits)
      throw UsageError("--bits must be 1..63, 'default' or 'auto', got '" + bits + "'");
    rule = "explicit";
  }
  try {
    return {allocate_addresses(g, root, l), rule};
  } catch (const AllocationError& e) {
    throw UsageError(std::string(e.what()) + " (try a larger --bits or --bits auto)");
  }
}

std::string dump_paths(const RoutingTables& tables, const Graph& g, const AddressMap& addrs)
{
  std::string text;
  const std::size_t n = g.vertex_count();
  for (Vertex s = 0; s < n; ++s)
    for (Vertex t = 0; t < n; ++t) {
      if (s == t)
        continue;
      PathSet paths = discover_paths(tables, g, addrs, s, t);
      text += format_paths(paths);
      if (paths.truncated)
        text += fmt::format("# truncated {} {} after {} paths\n", s, t, paths.paths.size());
    }
  return text;
}

std::string budget_pairs(const ReliabilityReport& report)
{
  std::string list;
  for (const auto& pair : report.per_pair)
    if (pair.budget_exceeded)
      list += fmt::format("{}{}-{}", list.empty() ? "" : ",", pair.s, pair.t);
  return list;
}

// gen -----------------------------------------------------------------------

struct GenConfig {
  std::size_t nodes = 16;
  double density = 64;
  double range = default_range_m;
  std::uint64_t seed = 1;
  std::string out;
  std::string sidecar;
  bool no_retry = false;
  std::size_t mesh = 0;
  std::string fixture;
  std::string out_dir;
};

void describe(const Graph& g, std::ostream& out)
{
  out << fmt::format("nodes={} edges={} mean_degree={} connected={}", g.vertex_count(), g.edge_count(),
                     number(mean_out_degree(g)), is_strongly_connected(g) ? "yes" : "no");
}

int cmd_gen(const GenConfig& c, std::ostream& out)
{
  if (!c.fixture.empty()) {
    if (c.fixture != "fig2")
      throw UsageError("unknown fixture '" + c.fixture + "' (available: fig2)");
    if (c.out_dir.empty())
      throw UsageError("--fixture needs --out-dir");
    std::filesystem::create_directories(c.out_dir);
    const std::filesystem::path dir(c.out_dir);
    write_text((dir / "physical.adj").string(), fixture_fig2_physical_text());
    write_text((dir / "dart.adj").string(), fixture_fig2_dart_text());
    write_text((dir / "atr.adj").string(), fixture_fig2_atr_text());
    out << "wrote " << (dir / "physical.adj").string() << ' ' << (dir / "dart.adj").string() << ' '
        << (dir / "atr.adj").string() << '\n';
    return exit_ok;
  }
  if (c.out.empty())
    throw UsageError("gen needs --out");

  if (c.mesh > 0) {
    Graph g = full_mesh(c.mesh);
    write_adjacency_file(g, c.out);
    describe(g, out);
    out << '\n';
    return exit_ok;
  }

  if (c.nodes == 0)
    throw UsageError("--nodes must be positive");
  GeometricScenario scenario;
  Graph g;
  std::size_t attempts = 1;
  try {
    if (c.no_retry) {
      auto topo = random_geometric(c.nodes, c.density, c.range, c.seed);
      g = std::move(topo.graph);
      scenario = std::move(topo.scenario);
    } else {
      auto topo = connected_or_retry(c.nodes, c.density, c.range, c.seed);
      g = std::move(topo.graph);
      scenario = std::move(topo.scenario);
      attempts = topo.attempts;
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  write_adjacency_file(g, c.out);
  write_text(c.sidecar.empty() ? c.out + ".scenario" : c.sidecar, serialize_scenario(scenario));
  describe(g, out);
  out << fmt::format(" side_m={} seed={} attempts={}\n", number(scenario.side_m()), scenario.seed, attempts);
  return exit_ok;
}

// overlay -------------------------------------------------------------------

struct OverlayConfig {
  std::string topo;
  std::string mode;
  Vertex root = 0;
  std::string bits = "default";
  std::string out;
  std::string dump_paths;
  std::string addresses;
};

int cmd_overlay(const OverlayConfig& c, std::ostream& out)
{
  RoutingMode mode;
  try {
    mode = parse_routing_mode(c.mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Graph g = load_physical(c.topo);
  Allocation alloc = allocate(g, c.root, c.bits);
  RoutingTables tables = build_tables(g, alloc.map, mode);
  Graph overlay = overlay_graph(tables, g, alloc.map);
  write_adjacency_file(overlay, c.out);
  if (!c.dump_paths.empty())
    write_text(c.dump_paths, dump_paths(tables, g, alloc.map));
  if (!c.addresses.empty())
    write_text(c.addresses, serialize_address_map(alloc.map));
  out << fmt::format("mode={} root={} bits={} address_digest={} physical_arcs={} overlay_arcs={}\n", to_string(mode),
                     c.root, alloc.map.bits(), digest_hex(alloc.map), g.arc_count(), overlay.arc_count());
  return exit_ok;
}

// reliability ---------------------------------------------------------------

struct ReliabilityConfig {
  std::string graph;
  std::string p_grid = default_p_grid;
  std::string out;
  std::string per_pair;
  std::string pair;
  bool symbolic = false;
  std::string weights;
  unsigned threads = 0;
};

std::pair<Vertex, Vertex> parse_pair(const std::string& text, std::size_t n)
{
  Vertex s = 0, t = 0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> s >> comma >> t) || comma != ',' || !(in >> std::ws).eof())
    throw UsageError("--pair must look like s,t, got '" + text + "'");
  if (s >= n || t >= n || s == t)
    throw UsageError(fmt::format("--pair {} needs two distinct nodes below {}", text, n));
  return {s, t};
}

int cmd_reliability(const ReliabilityConfig& c, std::ostream& out)
{
  const std::vector<double> grid = parse_p_grid(c.p_grid);
  Graph g = read_adjacency_file(c.graph);
  const EnumerationOptions enumeration = enumeration_options();

  if (c.symbolic) {
    auto [s, t] = parse_pair(c.pair, g.vertex_count());
    out << symbolic_polynomial(enumerate_cut_counts(g, s, t, enumeration)).to_string() << '\n';
    if (c.out.empty() && c.per_pair.empty())
      return exit_ok;
  }

  if (g.vertex_count() < 2)
    throw InputError(c.graph + ": mean reliability needs at least two nodes");
  const FlowWeights weights = load_weights(c.weights);
  ReportOptions options{enumeration, c.threads};
  ReliabilityReport report = mean_reliability(g, grid, weights, options);

  Metadata meta;
  meta.add("command", "reliability");
  meta.add("graph", c.graph);
  meta.add("nodes", g.vertex_count());
  meta.add("arcs", g.arc_count());
  meta.add("orientation", g.directed() ? "directed" : "undirected");
  meta.add("p_grid", c.p_grid);
  meta.add("weights", c.weights.empty() ? "uniform" : c.weights);
  meta.add("time_budget_ms", enumeration.time_budget.count());
  if (report.budget_exceeded)
    meta.add("budget_exceeded_pairs", budget_pairs(report));

  std::string csv = meta.text() + "p,mean,std,pairs_connected,pairs_total\n";
  for (std::size_t x = 0; x < grid.size(); ++x)
    csv += fmt::format("{},{},{},{},{}\n", number(grid[x]), number(report.mean[x]), number(report.std_dev[x]),
                       report.pairs_connected, report.pairs_total);
  emit(c.out, csv, out);

  if (!c.per_pair.empty()) {
    std::string detail = meta.text() + "s,t,p,R_st\n";
    for (const auto& pair : report.per_pair)
      for (std::size_t x = 0; x < grid.size(); ++x)
        detail += fmt::format("{},{},{},{}\n", pair.s, pair.t, number(grid[x]), number(pair.values[x]));
    emit(c.per_pair, detail, out);
  }
  return report.budget_exceeded ? exit_budget : exit_ok;
}

// compare -------------------------------------------------------------------

struct CompareConfig {
  std::size_t mesh = 0;
  std::string topo;
  std::size_t nodes = 0;
  double density = 64;
  double range = default_range_m;
  std::uint64_t seed = 1;
  Vertex root = 0;
  std::string bits = "default";
  std::string p_grid = default_p_grid;
  std::string out;
  std::string weights;
  unsigned threads = 0;
};

int cmd_compare(const CompareConfig& c, std::ostream& out)
{
  const int sources = (c.mesh > 0) + !c.topo.empty() + (c.nodes > 0);
  if (sources != 1)
    throw UsageError("compare needs exactly one of --mesh, --topo or --nodes");
  const std::vector<double> grid = parse_p_grid(c.p_grid);
  const EnumerationOptions enumeration = enumeration_options();
  const FlowWeights weights = load_weights(c.weights);

  Metadata meta;
  meta.add("command", "compare");
  Graph g;
  if (c.mesh > 0) {
    g = full_mesh(c.mesh);
    meta.add("topology", fmt::format("full_mesh({})", c.mesh));
  } else if (!c.topo.empty()) {
    g = load_physical(c.topo);
    meta.add("topology", c.topo);
  } else {
    try {
      auto topo = connected_or_retry(c.nodes, c.density, c.range, c.seed);
      g = std::move(topo.graph);
      meta.add("topology", fmt::format("random_geometric(n={}, density={}, range_m={})", c.nodes, number(c.density),
                                       number(c.range)));
      meta.add("generation_seed", topo.scenario.seed);
      meta.add("generation_attempts", topo.attempts);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    } catch (const std::runtime_error& e) {
      throw UsageError(e.what());
    }
  }
  meta.add("seed", c.seed);
  meta.add("nodes", g.vertex_count());
  meta.add("physical_edges", g.edge_count());

  Allocation alloc = allocate(g, c.root, c.bits);
  meta.add("root", c.root);
  meta.add("bits", alloc.map.bits());
  meta.add("bits_rule", alloc.rule);
  meta.add("address_digest", digest_hex(alloc.map));

  ReportOptions options{enumeration, c.threads};
  std::vector<ReliabilityReport> reports;
  for (RoutingMode mode : {RoutingMode::Dart, RoutingMode::Atr}) {
    Graph overlay = overlay_graph(build_tables(g, alloc.map, mode), g, alloc.map);
    meta.add(fmt::format("{}_overlay_arcs", to_string(mode)), overlay.arc_count());
    reports.push_back(mean_reliability(overlay, grid, weights, options));
  }
  meta.add("reliability_graph", "directed overlay");
  meta.add("p_grid", c.p_grid);
  meta.add("weights", c.weights.empty() ? "uniform" : c.weights);
  meta.add("time_budget_ms", enumeration.time_budget.count());
  const bool over_budget = reports[0].budget_exceeded || reports[1].budget_exceeded;
  if (reports[0].budget_exceeded)
    meta.add("dart_budget_exceeded_pairs", budget_pairs(reports[0]));
  if (reports[1].budget_exceeded)
    meta.add("atr_budget_exceeded_pairs", budget_pairs(reports[1]));

  std::string csv = meta.text() + "p,mean_dart,std_dart,mean_atr,std_atr\n";
  for (std::size_t x = 0; x < grid.size(); ++x)
    csv += fmt::format("{},{},{},{},{}\n", number(grid[x]), number(reports[0].mean[x]), number(reports[0].std_dev[x]),
                       number(reports[1].mean[x]), number(reports[1].std_dev[x]));
  emit(c.out, csv, out);
  return over_budget ? exit_budget : exit_ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Overlay extraction and exact routing reliability for tree-based dynamic addressing", "relyroute"};
  app.require_subcommand(1);

  GenConfig gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a physical topology");
  gen_cmd->add_option("--nodes", gen.nodes, "Node count of a random geometric topology")->capture_default_str();
  gen_cmd->add_option("--density", gen.density, "Nodes per km^2")->capture_default_str();
  gen_cmd->add_option("--range", gen.range, "Transmission range in meters")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Matrix file to write");
  gen_cmd->add_option("--sidecar", gen.sidecar, "Node positions file (default: <out>.scenario)");
  gen_cmd->add_flag("--no-retry", gen.no_retry, "Keep the first draw even if it is disconnected");
  auto* mesh_opt = gen_cmd->add_option("--mesh", gen.mesh, "Write a full mesh on this many nodes instead");
  auto* fixture_opt = gen_cmd->add_option("--fixture", gen.fixture, "Write a bundled fixture (fig2)");
  gen_cmd->add_option("--out-dir", gen.out_dir, "Directory for fixture files");
  mesh_opt->excludes(fixture_opt);

  OverlayConfig overlay;
  auto* overlay_cmd = app.add_subcommand("overlay", "Build the DART or ATR overlay of a topology");
  overlay_cmd->add_option("--topo", overlay.topo, "Undirected topology matrix")->required();
  overlay_cmd->add_option("--mode", overlay.mode, "dart or atr")->required();
  overlay_cmd->add_option("--root", overlay.root, "Root of the address tree")->capture_default_str();
  overlay_cmd->add_option("--bits", overlay.bits, "Address length, 'default' or 'auto'")->capture_default_str();
  overlay_cmd->add_option("--out", overlay.out, "Directed overlay matrix to write")->required();
  overlay_cmd->add_option("--dump-paths", overlay.dump_paths, "Write every discovered path, one per line");
  overlay_cmd->add_option("--addresses", overlay.addresses, "Write the address map");

  ReliabilityConfig rel;
  auto* rel_cmd = app.add_subcommand("reliability", "Mean terminal-pair reliability of a graph");
  rel_cmd->add_option("--graph", rel.graph, "Matrix file")->required();
  rel_cmd->add_option("--p-grid", rel.p_grid, "start:stop:step, inclusive")->capture_default_str();
  rel_cmd->add_option("--out", rel.out, "CSV file (default: stdout)");
  rel_cmd->add_option("--per-pair", rel.per_pair, "Also write s,t,p,R_st rows to this file");
  auto* pair_opt = rel_cmd->add_option("--pair", rel.pair, "Terminal pair s,t for --symbolic");
  auto* symbolic_opt = rel_cmd->add_flag("--symbolic", rel.symbolic, "Print the exact polynomial of --pair");
  rel_cmd->add_option("--weights", rel.weights, "Flow weights, lines of 's t z'");
  rel_cmd->add_option("--threads", rel.threads, "Worker threads (0: one per core)")->capture_default_str();
  pair_opt->needs(symbolic_opt);
  symbolic_opt->needs(pair_opt);

  CompareConfig cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "DART versus ATR mean reliability on one topology");
  auto* cmp_mesh = cmp_cmd->add_option("--mesh", cmp.mesh, "Full mesh on this many nodes");
  auto* cmp_topo = cmp_cmd->add_option("--topo", cmp.topo, "Undirected topology matrix");
  auto* cmp_nodes = cmp_cmd->add_option("--nodes", cmp.nodes, "Generate a random geometric topology");
  cmp_cmd->add_option("--density", cmp.density, "Nodes per km^2")->capture_default_str();
  cmp_cmd->add_option("--range", cmp.range, "Transmission range in meters")->capture_default_str();
  cmp_cmd->add_option("--seed", cmp.seed, "Generator seed")->capture_default_str();
  cmp_cmd->add_option("--root", cmp.root, "Root of the address tree")->capture_default_str();
  cmp_cmd->add_option("--bits", cmp.bits, "Address length, 'default' or 'auto'")->capture_default_str();
  cmp_cmd->add_option("--p-grid", cmp.p_grid, "start:stop:step, inclusive")->capture_default_str();
  cmp_cmd->add_option("--out", cmp.out, "CSV file (default: stdout)");
  cmp_cmd->add_option("--weights", cmp.weights, "Flow weights, lines of 's t z'");
  cmp_cmd->add_option("--threads", cmp.threads, "Worker threads (0: one per core)")->capture_default_str();
  cmp_mesh->excludes(cmp_topo)->excludes(cmp_nodes);
  cmp_topo->excludes(cmp_nodes);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? exit_ok : exit_usage;
  }

  try {
    if (gen_cmd->parsed())
      return cmd_gen(gen, out);
    if (overlay_cmd->parsed())
      return cmd_overlay(overlay, out);
    if (rel_cmd->parsed())
      return cmd_reliability(rel, out);
    return cmd_compare(cmp, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << " (raise RELYROUTE_TIME_BUDGET_MS)\n";
    return exit_budget;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const GraphError& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
}

} // namespace relyroute::cli
