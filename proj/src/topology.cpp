#include "relyroute/topology.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace relyroute {

namespace {

constexpr const char* fig2_physical = "8 undirected\n"
                                      "0 1 0 0 0 0 1 0\n"
                                      "1 0 0 0 1 1 1 1\n"
                                      "0 0 0 1 1 0 1 0\n"
                                      "0 0 1 0 1 0 1 0\n"
                                      "0 1 1 1 0 1 1 1\n"
                                      "0 1 0 0 1 0 1 1\n"
                                      "1 1 1 1 1 1 0 1\n"
                                      "0 1 0 0 1 1 1 0\n";

constexpr const char* fig2_dart = "8 directed\n"
                                  "0 1 0 0 0 0 1 0\n"
                                  "1 0 0 0 1 1 0 1\n"
                                  "0 0 0 1 1 0 1 0\n"
                                  "0 0 1 0 1 0 1 0\n"
                                  "0 1 0 0 0 0 1 0\n"
                                  "0 1 0 0 1 0 1 0\n"
                                  "1 1 1 0 0 0 0 0\n"
                                  "0 1 0 0 1 1 1 0\n";

// Entry-for-entry identical to the physical matrix.
constexpr const char* fig2_atr = fig2_physical;

double unit_interval(std::mt19937_64& engine)
{
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

} // namespace

double GeometricScenario::side_m() const
{
  return deployment_side_m(n, density);
}

Graph full_mesh(std::size_t n)
{
  if (n == 0)
    throw std::invalid_argument("full mesh needs at least one node");
  std::vector<Arc> arcs;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = 0; j < n; ++j)
      if (i != j)
        arcs.emplace_back(i, j);
  return Graph(n, false, arcs);
}

double deployment_side_m(std::size_t n, double density)
{
  if (!(density > 0.0))
    throw std::invalid_argument("density must be positive");
  return std::sqrt(static_cast<double>(n) / density) * 1000.0;
}

GeneratedTopology random_geometric(std::size_t n, double density, double range_m, std::uint64_t seed)
{
  if (n == 0)
    throw std::invalid_argument("random geometric graph needs at least one node");
  if (!(density > 0.0))
    throw std::invalid_argument("density must be positive");
  if (!(range_m > 0.0))
    throw std::invalid_argument("transmission range must be positive");

  GeometricScenario scenario{n, density, range_m, seed, {}};
  const double side = scenario.side_m();
  std::mt19937_64 engine(seed);
  scenario.positions.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = unit_interval(engine) * side;
    double y = unit_interval(engine) * side;
    scenario.positions.push_back({x, y});
  }

  std::vector<Arc> arcs;
  const double r2 = range_m * range_m;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = 0; j < n; ++j) {
      if (i == j)
        continue;
      double dx = scenario.positions[i].x_m - scenario.positions[j].x_m;
      double dy = scenario.positions[i].y_m - scenario.positions[j].y_m;
      if (dx * dx + dy * dy <= r2)
        arcs.emplace_back(i, j);
    }
  return {Graph(n, false, arcs), std::move(scenario)};
}

RetriedTopology connected_or_retry(std::size_t n, double density, double range_m, std::uint64_t seed)
{
  for (std::size_t attempt = 1; attempt <= max_generation_attempts; ++attempt) {
    auto topo = random_geometric(n, density, range_m, seed + (attempt - 1));
    if (is_strongly_connected(topo.graph))
      return {std::move(topo.graph), std::move(topo.scenario), attempt};
  }
  throw std::runtime_error(fmt::format("no connected topology for n={} density={} range={} within {} attempts from seed {}",
                                       n, density, range_m, max_generation_attempts, seed));
}

std::string fixture_fig2_physical_text()
{
  return fig2_physical;
}

std::string fixture_fig2_dart_text()
{
  return fig2_dart;
}

std::string fixture_fig2_atr_text()
{
  return fig2_atr;
}

Fig2Fixture fixture_fig2()
{
  return {parse_adjacency_matrix(fig2_physical), parse_adjacency_matrix(fig2_dart), parse_adjacency_matrix(fig2_atr)};
}

std::string serialize_scenario(const GeometricScenario& scenario)
{
  std::string out = fmt::format("# n={} density={} range_m={} seed={} side_m={:.6f}\n", scenario.n, scenario.density,
                                scenario.range_m, scenario.seed, scenario.side_m());
  for (std::size_t i = 0; i < scenario.positions.size(); ++i)
    out += fmt::format("{} {:.6f} {:.6f}\n", i, scenario.positions[i].x_m, scenario.positions[i].y_m);
  return out;
}

} // namespace relyroute
