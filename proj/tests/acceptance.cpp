// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
// any hard check fails.

#include "commands.hpp"
#include "oracles.hpp"

#include "relyroute/addressing.hpp"
#include "relyroute/graph.hpp"
#include "relyroute/reliability.hpp"
#include "relyroute/routing.hpp"
#include "relyroute/topology.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>

using namespace relyroute;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double oracle_tolerance = 1e-12;
constexpr double dominance_tolerance = 1e-12;
constexpr double fixture_seconds = 1.0;
constexpr double oracle_seconds = 60.0;
constexpr double statistical_seconds = 600.0;
constexpr std::size_t monte_carlo_trials = 100000;
constexpr double monte_carlo_sigmas = 3.0;
constexpr int monte_carlo_required = 28;
constexpr int statistical_soft_required = 7;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> grid()
{
  std::vector<double> p;
  for (int i = 1; i <= 19; ++i)
    p.push_back(i * 0.05);
  return p;
}

double exact(const Graph& g, Vertex s, Vertex t, double p)
{
  return terminal_pair_reliability(enumerate_cut_counts(g, s, t), p);
}

struct Overlays {
  Graph dart;
  Graph atr;
};

Overlays overlays(const Graph& g, const AddressMap& addrs)
{
  return {overlay_graph(build_tables(g, addrs, RoutingMode::Dart), g, addrs),
          overlay_graph(build_tables(g, addrs, RoutingMode::Atr), g, addrs)};
}

std::optional<AddressMap> smallest_allocation(const Graph& g)
{
  for (std::size_t bits = default_address_bits(g.vertex_count()); bits <= Address::max_bits; ++bits) {
    try {
      return allocate_addresses(g, 0, bits);
    } catch (const AllocationError&) {
    }
  }
  return std::nullopt;
}

Outcome fixture_fidelity()
{
  auto start = Clock::now();
  const std::string dir = RELYROUTE_DATA_DIR "/fig2/";
  Graph physical = read_adjacency_file(dir + "physical.adj");
  Graph dart = read_adjacency_file(dir + "dart.adj");
  Graph atr = read_adjacency_file(dir + "atr.adj");
  double elapsed = seconds_since(start);
  std::size_t diff = atr.arc_count() - dart.arc_count();
  bool pass = physical.arc_count() == 34 && dart.arc_count() == 24 && atr.arc_count() == 34 &&
              arc_subset(dart, atr) && diff == 10 && elapsed < fixture_seconds;
  return {pass, fmt::format("physical={} dart={} atr={} dart_subset_atr={} missing={} time={:.3f}s",
                            physical.arc_count(), dart.arc_count(), atr.arc_count(), arc_subset(dart, atr), diff,
                            elapsed)};
}

Outcome oracle_equivalence()
{
  auto start = Clock::now();
  std::mt19937_64 rng(2024);
  const double ps[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::size_t graphs = 0, directed = 0;
  double worst = 0.0;
  std::size_t max_arcs = 0;
  while (graphs < 120) {
    bool is_directed = graphs % 2 == 0;
    std::size_t n = 2 + rng() % 7;
    Graph g = oracle::random_graph(rng, n, 14, is_directed);
    Vertex s = rng() % n, t = rng() % n;
    if (s == t)
      continue;
    auto counts = enumerate_cut_counts(g, s, t);
    for (double p : ps)
      worst = std::max(worst, std::abs(terminal_pair_reliability(counts, p) - oracle::reliability(g, s, t, p)));
    max_arcs = std::max(max_arcs, g.arc_count());
    ++graphs;
    directed += is_directed;
  }
  double elapsed = seconds_since(start);
  return {worst <= oracle_tolerance && max_arcs <= 14 && elapsed < oracle_seconds,
          fmt::format("graphs={} directed={} max_arcs={} max_abs_error={:.3g} time={:.2f}s", graphs, directed,
                      max_arcs, worst, elapsed)};
}

Outcome closed_forms()
{
  const Arc link_arcs[] = {{0, 1}};
  const Arc series_arcs[] = {{0, 1}, {1, 2}};
  const Arc diamond_arcs[] = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  struct Case {
    Graph g;
    Vertex t;
    std::string expected;
  };
  std::vector<Case> cases{{Graph(2, true, link_arcs), 1, "1*p"},
                          {Graph(3, true, series_arcs), 2, "1*p^2"},
                          {Graph(4, true, diamond_arcs), 3, "-1*p^4 + 2*p^2"}};
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    auto poly = symbolic_polynomial(enumerate_cut_counts(c.g, 0, c.t));
    bool match = poly.to_string() == c.expected;
    for (double p : {0.1, 0.5, 0.9})
      match = match && std::abs(poly.evaluate(p) - oracle::reliability(c.g, 0, c.t, p)) <= oracle_tolerance;
    pass = pass && match;
    detail += fmt::format("[{}] ", poly.to_string());
  }
  double diamond_half = oracle::reliability(cases[2].g, 0, 3, 0.5);
  auto diamond_exact = symbolic_polynomial(enumerate_cut_counts(cases[2].g, 0, 3)).evaluate_exact(Rational(1, 2));
  pass = pass && diamond_half == 0.4375 && diamond_exact == Rational(7, 16);
  return {pass, detail + fmt::format("diamond(0.5)={} brute_force={}", diamond_exact.convert_to<double>(),
                                     diamond_half)};
}

Outcome full_mesh_gap()
{
  Graph k4 = full_mesh(4);
  AddressMap addrs = allocate_addresses(k4, 0, 2);
  Overlays o = overlays(k4, addrs);
  auto p = grid();
  auto dart = mean_reliability(o.dart, p);
  auto atr = mean_reliability(o.atr, p);
  bool dominates = true;
  std::vector<double> gap;
  for (std::size_t i = 0; i < p.size(); ++i) {
    gap.push_back(atr.mean[i] - dart.mean[i]);
    dominates = dominates && gap.back() >= -dominance_tolerance;
  }
  const std::size_t lo = 0, mid = 9, hi = 18;
  bool pass = dominates && gap[mid] > gap[lo] && gap[mid] > gap[hi] && !dart.budget_exceeded && !atr.budget_exceeded;
  return {pass, fmt::format("addresses={} dominates={} gap(0.05)={:.6f} gap(0.5)={:.6f} gap(0.95)={:.6f}",
                            fmt::format("{}/{}/{}/{}", addrs.at(0).to_string(), addrs.at(1).to_string(),
                                        addrs.at(2).to_string(), addrs.at(3).to_string()),
                            dominates, gap[lo], gap[mid], gap[hi])};
}

std::pair<Outcome, Outcome> statistical()
{
  auto start = Clock::now();
  auto p = grid();
  const std::size_t probes[] = {5, 9, 13}; // p = 0.3, 0.5, 0.7
  Graph k4 = full_mesh(4);
  auto k4_atr = mean_reliability(overlays(k4, allocate_addresses(k4, 0, 2)).atr, p);

  bool hard = true, aborted = false;
  int soft_hits = 0;
  std::set<std::vector<Arc>> distinct;
  std::string bits;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Graph g = connected_or_retry(16, 64, default_range_m, seed).graph;
    distinct.insert(g.arcs());
    auto addrs = smallest_allocation(g);
    if (!addrs) {
      hard = false;
      continue;
    }
    bits += fmt::format("{}{}", bits.empty() ? "" : ",", addrs->bits());
    Overlays o = overlays(g, *addrs);
    auto dart = mean_reliability(o.dart, p);
    auto atr = mean_reliability(o.atr, p);
    aborted = aborted || dart.budget_exceeded || atr.budget_exceeded;
    for (std::size_t i = 0; i < p.size(); ++i)
      hard = hard && atr.mean[i] >= dart.mean[i] - dominance_tolerance;

    bool above = true;
    for (std::size_t i : probes) {
      std::vector<double> values;
      for (const auto& pair : atr.per_pair)
        values.push_back(pair.values[i]);
      std::nth_element(values.begin(), values.begin() + values.size() / 2, values.end());
      double median = values[values.size() / 2];
      if (values.size() % 2 == 0)
        median = (median + *std::max_element(values.begin(), values.begin() + values.size() / 2)) / 2.0;
      above = above && median > k4_atr.mean[i];
    }
    soft_hits += above;
  }
  double elapsed = seconds_since(start);
  bool pass = hard && !aborted && elapsed < statistical_seconds;
  return {{pass, fmt::format("seeds=10 distinct_topologies={} bits={} atr>=dart={} budget_aborts={} time={:.1f}s",
                             distinct.size(), bits, hard, aborted, elapsed)},
          {soft_hits >= statistical_soft_required,
           fmt::format("median ATR pair reliability above K4 ATR at p=0.3,0.5,0.7 in {}/10 seeds (need {})",
                       soft_hits, statistical_soft_required)}};
}

Outcome dominance()
{
  std::size_t draws = 0, pairs_checked = 0, violations = 0;
  const double ps[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::mt19937_64 rng(77);
  for (std::uint64_t seed = 1; draws < 120; ++seed) {
    std::size_t n = 4 + seed % 9;
    Graph g = connected_or_retry(n, 64, default_range_m, seed).graph;
    auto addrs = smallest_allocation(g);
    if (!addrs)
      continue;
    ++draws;
    Overlays o = overlays(g, *addrs);
    if (!arc_subset(o.dart, o.atr) || !arc_subset(o.atr, symmetrized(g)))
      ++violations;
    for (int k = 0; k < 4; ++k) {
      Vertex s = rng() % n, t = rng() % n;
      if (s == t)
        continue;
      auto dart = enumerate_cut_counts(o.dart, s, t);
      auto atr = enumerate_cut_counts(o.atr, s, t);
      for (double p : ps)
        if (terminal_pair_reliability(atr, p) < terminal_pair_reliability(dart, p) - dominance_tolerance)
          ++violations;
      ++pairs_checked;
    }
  }
  return {violations == 0,
          fmt::format("draws={} pairs={} p_values=5 violations={}", draws, pairs_checked, violations)};
}

Outcome monte_carlo()
{
  std::mt19937_64 rng(31337);
  const double ps[] = {0.3, 0.5, 0.7};
  int within = 0, cells = 0;
  std::uint64_t mc_seed = 1;
  for (int graph = 0; graph < 10; ++graph) {
    std::size_t n = 5 + graph % 4;
    Graph g = oracle::random_graph(rng, n, 24, graph % 2 == 0);
    for (double p : ps) {
      double value = exact(g, 0, static_cast<Vertex>(n - 1), p);
      auto est = monte_carlo_reliability(g, 0, static_cast<Vertex>(n - 1), p, monte_carlo_trials, mc_seed++);
      bool ok = est.std_error > 0.0 ? std::abs(value - est.estimate) <= monte_carlo_sigmas * est.std_error
                                    : value == est.estimate;
      within += ok;
      ++cells;
    }
  }
  return {within >= monte_carlo_required,
          fmt::format("cells_within_3se={}/{} (need {}) trials={}", within, cells, monte_carlo_required,
                      monte_carlo_trials)};
}

Outcome determinism()
{
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "relyroute_acceptance";
  fs::create_directories(dir);
  std::string bytes[2];
  int codes[2];
  for (int run = 0; run < 2; ++run) {
    std::string path = (dir / fmt::format("run{}.csv", run)).string();
    std::ostringstream out, err;
    codes[run] = cli::run({"compare", "--mesh", "4", "--seed", "42", "--out", path}, out, err);
    std::ifstream in(path, std::ios::binary);
    std::ostringstream content;
    content << in.rdbuf();
    bytes[run] = content.str();
  }
  fs::remove_all(dir);
  bool pass = codes[0] == 0 && codes[1] == 0 && !bytes[0].empty() && bytes[0] == bytes[1];
  return {pass, fmt::format("exit={},{} bytes={} identical={}", codes[0], codes[1], bytes[0].size(),
                            bytes[0] == bytes[1])};
}

} // namespace

int main()
{
  int failures = 0;
  auto report = [&](const std::string& name, const Outcome& outcome, bool counts = true) {
    fmt::print("{} {}: {}\n", outcome.pass ? "PASS" : (counts ? "FAIL" : "MISS"), name, outcome.detail);
    std::fflush(stdout);
    if (counts && !outcome.pass)
      ++failures;
  };
  auto guarded = [&](const std::string& name, const std::function<Outcome()>& check) {
    try {
      report(name, check());
    } catch (const std::exception& e) {
      report(name, {false, std::string("exception: ") + e.what()});
    }
  };

  guarded("1 fixture fidelity", fixture_fidelity);
  guarded("2 oracle equivalence", oracle_equivalence);
  guarded("3 closed forms", closed_forms);
  guarded("4 full mesh ATR/DART gap", full_mesh_gap);
  try {
    auto [hard, soft] = statistical();
    report("5 random topologies ATR >= DART", hard);
    report("5 random topologies vs full mesh (soft)", soft, false);
  } catch (const std::exception& e) {
    report("5 random topologies ATR >= DART", {false, std::string("exception: ") + e.what()});
  }
  guarded("6 dominance", dominance);
  guarded("7 Monte Carlo consistency", monte_carlo);
  guarded("8 determinism", determinism);
  fmt::print("{} hard failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
