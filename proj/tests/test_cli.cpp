#include "doctest.h"

#include "commands.hpp"
#include "oracles.hpp"

#include "relyroute/graph.hpp"
#include "relyroute/topology.hpp"

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace relyroute;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args)
{
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Scratch {
public:
  Scratch()
  {
    static int counter = 0;
    dir_ = fs::temp_directory_path() / ("relyroute_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  std::string operator/(const std::string& name) const { return (dir_ / name).string(); }

private:
  fs::path dir_;
};

std::string slurp(const std::string& path)
{
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Data rows of a CSV with '#' metadata, split on commas.
std::vector<std::vector<std::string>> rows(const std::string& csv)
{
  std::vector<std::vector<std::string>> table;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ','))
      cells.push_back(cell);
    table.push_back(cells);
  }
  return table;
}

class EnvGuard {
public:
  EnvGuard(const char* name, const char* value) : name_(name) { ::setenv(name, value, 1); }
  ~EnvGuard() { ::unsetenv(name_); }

private:
  const char* name_;
};

} // namespace

TEST_SUITE("cli") {

TEST_CASE("help and usage errors")
{
  CHECK(invoke({"--help"}).code == cli::exit_ok);
  CHECK(invoke({}).code == cli::exit_usage);
  CHECK(invoke({"frobnicate"}).code == cli::exit_usage);
  CHECK(invoke({"reliability"}).code == cli::exit_usage);
  CHECK(invoke({"compare"}).code == cli::exit_usage);
  CHECK(invoke({"compare", "--mesh", "3", "--nodes", "5"}).code == cli::exit_usage);
  CHECK(invoke({"compare", "--mesh", "3", "--p-grid", "0.5:0.1:0.1"}).code == cli::exit_usage);
  CHECK(invoke({"compare", "--mesh", "3", "--p-grid", "0.1,0.2"}).code == cli::exit_usage);
  CHECK(invoke({"compare", "--mesh", "3", "--bits", "zero"}).code == cli::exit_usage);
  CHECK(invoke({"compare", "--mesh", "3", "--root", "3"}).code == cli::exit_usage);
  CHECK(invoke({"gen", "--fixture", "fig9", "--out-dir", "x"}).code == cli::exit_usage);
}

TEST_CASE("series graph polynomial")
{
  Scratch tmp;
  const Arc arcs[] = {{0, 1}, {1, 2}};
  write_adjacency_file(Graph(3, true, arcs), tmp / "series3.adj");
  Result r = invoke({"reliability", "--graph", tmp / "series3.adj", "--pair", "0,2", "--symbolic"});
  CHECK(r.code == cli::exit_ok);
  CHECK(r.out == "1*p^2\n");

  CHECK(invoke({"reliability", "--graph", tmp / "series3.adj", "--pair", "0,2"}).code == cli::exit_usage);
  CHECK(invoke({"reliability", "--graph", tmp / "series3.adj", "--symbolic"}).code == cli::exit_usage);
  CHECK(invoke({"reliability", "--graph", tmp / "series3.adj", "--pair", "0,7", "--symbolic"}).code ==
        cli::exit_usage);
}

TEST_CASE("input errors")
{
  Scratch tmp;
  CHECK(invoke({"reliability", "--graph", tmp / "missing.adj"}).code == cli::exit_input);
  {
    std::ofstream bad(tmp / "bad.adj");
    bad << "2 undirected\n0 1\n0 0\n";
  }
  Result r = invoke({"reliability", "--graph", tmp / "bad.adj"});
  CHECK(r.code == cli::exit_input);
  CHECK(r.err.find("error:") == 0);
  {
    std::ofstream dir(tmp / "directed.adj");
    dir << "2 directed\n0 1\n0 0\n";
  }
  CHECK(invoke({"overlay", "--topo", tmp / "directed.adj", "--mode", "dart", "--out", tmp / "o.adj"}).code ==
        cli::exit_input);
  write_adjacency_file(Graph(3, false, {}), tmp / "empty.adj");
  CHECK(invoke({"overlay", "--topo", tmp / "empty.adj", "--mode", "dart", "--out", tmp / "o.adj"}).code ==
        cli::exit_input);
  {
    std::ofstream w(tmp / "weights.txt");
    w << "0 1 nope\n";
  }
  CHECK(invoke({"compare", "--mesh", "3", "--weights", tmp / "weights.txt"}).code == cli::exit_input);
}

TEST_CASE("mean reliability of the full mesh")
{
  Scratch tmp;
  REQUIRE(invoke({"gen", "--mesh", "4", "--out", tmp / "k4.adj"}).code == cli::exit_ok);
  Result r = invoke({"reliability", "--graph", tmp / "k4.adj", "--per-pair", tmp / "pairs.csv"});
  REQUIRE(r.code == cli::exit_ok);
  auto table = rows(r.out);
  REQUIRE(table.size() == 19);
  CHECK(table.front()[0] == "0.05");
  CHECK(table.back()[0] == "0.95");
  CHECK(table[9][0] == "0.5");
  CHECK(std::stod(table[9][1]) == doctest::Approx(0.75).epsilon(1e-12));
  for (std::size_t i = 1; i < table.size(); ++i)
    CHECK(std::stod(table[i][1]) >= std::stod(table[i - 1][1]));
  for (const auto& row : table) {
    CHECK(row[3] == "12");
    CHECK(row[4] == "12");
  }
  CHECK(r.out.find("# p_grid=0.05:0.95:0.05\n") != std::string::npos);
  CHECK(rows(slurp(tmp / "pairs.csv")).size() == 12 * 19);
}

TEST_CASE("weights file changes the mean")
{
  Scratch tmp;
  {
    std::ofstream w(tmp / "weights.txt");
    w << "# light flow\n0 1 0.5\n";
  }
  REQUIRE(invoke({"gen", "--mesh", "2", "--out", tmp / "k2.adj"}).code == cli::exit_ok);
  Result r =
      invoke({"reliability", "--graph", tmp / "k2.adj", "--p-grid", "0.5:0.5:0.1", "--weights", tmp / "weights.txt"});
  REQUIRE(r.code == cli::exit_ok);
  auto table = rows(r.out);
  REQUIRE(table.size() == 1);
  // (0.5 * 0.5 + 0.5) / 2
  CHECK(std::stod(table[0][1]) == doctest::Approx(0.375));
}

TEST_CASE("gen writes topology and sidecar")
{
  Scratch tmp;
  Result r = invoke({"gen", "--nodes", "16", "--density", "64", "--seed", "7", "--out", tmp / "t16.adj"});
  REQUIRE(r.code == cli::exit_ok);
  CHECK(r.out.find("nodes=16 edges=50 ") == 0);
  CHECK(r.out.find("connected=yes") != std::string::npos);
  Graph g = read_adjacency_file(tmp / "t16.adj");
  CHECK(g == connected_or_retry(16, 64, 250, 7).graph);
  CHECK(slurp(tmp / "t16.adj.scenario") == serialize_scenario(connected_or_retry(16, 64, 250, 7).scenario));

  CHECK(invoke({"gen", "--nodes", "2", "--density", "0.0001", "--out", tmp / "far.adj"}).code == cli::exit_usage);
  Result once = invoke({"gen", "--nodes", "2", "--density", "0.0001", "--no-retry", "--out", tmp / "far.adj"});
  CHECK(once.code == cli::exit_ok);
  CHECK(once.out.find("connected=no") != std::string::npos);
}

TEST_CASE("fixture overlays")
{
  Scratch tmp;
  REQUIRE(invoke({"gen", "--fixture", "fig2", "--out-dir", tmp / "fx"}).code == cli::exit_ok);
  auto fx = fixture_fig2();
  CHECK(read_adjacency_file(tmp / "fx/physical.adj") == fx.physical);
  CHECK(read_adjacency_file(tmp / "fx/dart.adj") == fx.dart_overlay);
  CHECK(read_adjacency_file(tmp / "fx/atr.adj") == fx.atr_overlay);

  Result d = invoke({"overlay", "--topo", tmp / "fx/physical.adj", "--mode", "dart", "--bits", "auto", "--out",
                     tmp / "dart.adj", "--dump-paths", tmp / "paths.txt", "--addresses", tmp / "addr.txt"});
  Result a = invoke({"overlay", "--topo", tmp / "fx/physical.adj", "--mode", "atr", "--bits", "auto", "--out",
                     tmp / "atr.adj"});
  REQUIRE(d.code == cli::exit_ok);
  REQUIRE(a.code == cli::exit_ok);
  Graph dart = read_adjacency_file(tmp / "dart.adj");
  Graph atr = read_adjacency_file(tmp / "atr.adj");
  CHECK(dart.directed());
  CHECK(arc_subset(dart, atr));
  CHECK(dart.arc_count() < atr.arc_count());

  // one DART path per ordered pair, each a walk over overlay arcs
  std::istringstream paths(slurp(tmp / "paths.txt"));
  std::string line;
  std::size_t count = 0;
  while (std::getline(paths, line)) {
    ++count;
    std::vector<Vertex> hops;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, '-'))
      hops.push_back(std::stoul(cell));
    for (std::size_t i = 0; i + 1 < hops.size(); ++i)
      CHECK(dart.has_arc(hops[i], hops[i + 1]));
  }
  CHECK(count == 8 * 7);
  CHECK(slurp(tmp / "addr.txt").rfind("l=", 0) == 0);
}

TEST_CASE("compare on the full mesh")
{
  Result r = invoke({"compare", "--mesh", "4", "--seed", "42"});
  REQUIRE(r.code == cli::exit_ok);
  CHECK(r.out.find("# reliability_graph=directed overlay\n") != std::string::npos);
  auto table = rows(r.out);
  REQUIRE(table.size() == 19);
  std::vector<double> gap;
  for (const auto& row : table) {
    double dart = std::stod(row[1]), atr = std::stod(row[3]);
    CHECK(atr >= dart - 1e-12);
    gap.push_back(atr - dart);
  }
  CHECK(gap[9] > gap[0]);
  CHECK(gap[9] > gap[18]);
  CHECK(table[9][1] == "0.5546875");
  CHECK(table[9][3] == "0.75");
}

TEST_CASE("compare values match brute force on the overlays")
{
  Scratch tmp;
  REQUIRE(invoke({"gen", "--mesh", "4", "--out", tmp / "k4.adj"}).code == cli::exit_ok);
  for (std::string mode : {"dart", "atr"}) {
    REQUIRE(invoke({"overlay", "--topo", tmp / "k4.adj", "--mode", mode, "--out", tmp / (mode + ".adj")}).code ==
            cli::exit_ok);
  }
  Result r = invoke({"compare", "--topo", tmp / "k4.adj", "--p-grid", "0.3:0.7:0.2"});
  REQUIRE(r.code == cli::exit_ok);
  auto table = rows(r.out);
  REQUIRE(table.size() == 3);
  Graph dart = read_adjacency_file(tmp / "dart.adj");
  Graph atr = read_adjacency_file(tmp / "atr.adj");
  for (const auto& row : table) {
    double p = std::stod(row[0]);
    double dart_mean = 0.0, atr_mean = 0.0;
    for (Vertex s = 0; s < 4; ++s)
      for (Vertex t = 0; t < 4; ++t)
        if (s != t) {
          dart_mean += oracle::reliability(dart, s, t, p) / 12.0;
          atr_mean += oracle::reliability(atr, s, t, p) / 12.0;
        }
    CHECK(std::stod(row[1]) == doctest::Approx(dart_mean).epsilon(1e-11));
    CHECK(std::stod(row[3]) == doctest::Approx(atr_mean).epsilon(1e-11));
  }
}

TEST_CASE("two-node mesh reliability equals p")
{
  Result r = invoke({"compare", "--mesh", "2"});
  REQUIRE(r.code == cli::exit_ok);
  for (const auto& row : rows(r.out)) {
    CHECK(row[1] == row[0]);
    CHECK(row[3] == row[0]);
    CHECK(row[2] == "0");
    CHECK(row[4] == "0");
  }
}

TEST_CASE("output is deterministic")
{
  Scratch tmp;
  Result a = invoke({"compare", "--mesh", "4", "--seed", "42", "--out", tmp / "a.csv", "--threads", "1"});
  Result b = invoke({"compare", "--mesh", "4", "--seed", "42", "--out", tmp / "b.csv", "--threads", "4"});
  REQUIRE(a.code == cli::exit_ok);
  REQUIRE(b.code == cli::exit_ok);
  CHECK(slurp(tmp / "a.csv") == slurp(tmp / "b.csv"));
  CHECK_FALSE(slurp(tmp / "a.csv").empty());

  Result g1 = invoke({"compare", "--nodes", "10", "--seed", "3", "--bits", "auto"});
  Result g2 = invoke({"compare", "--nodes", "10", "--seed", "3", "--bits", "auto"});
  CHECK(g1.code == cli::exit_ok);
  CHECK(g1.out == g2.out);
}

TEST_CASE("exceeded time budget still writes the table")
{
  EnvGuard budget("RELYROUTE_TIME_BUDGET_MS", "1");
  Result r = invoke({"compare", "--mesh", "16", "--bits", "auto", "--threads", "1"});
  CHECK(r.code == cli::exit_budget);
  auto table = rows(r.out);
  CHECK(table.size() == 19);
  CHECK(r.out.find("budget_exceeded_pairs=") != std::string::npos);

  EnvGuard broken("RELYROUTE_TIME_BUDGET_MS", "soon");
  CHECK(invoke({"compare", "--mesh", "3"}).code == cli::exit_usage);
}

} // TEST_SUITE
