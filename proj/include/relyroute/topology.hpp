#ifndef RELYROUTE_TOPOLOGY_HPP
#define RELYROUTE_TOPOLOGY_HPP

#include "relyroute/graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace relyroute {

inline constexpr double default_range_m = 250.0;
inline constexpr std::size_t max_generation_attempts = 1000;

struct Position {
  double x_m;
  double y_m;
};

/// Parameters and node placement of a unit-disk deployment. The square
/// area has side sqrt(n / density) km, so the node density stays fixed as n
/// grows.
struct GeometricScenario {
  std::size_t n = 0;
  double density = 0.0; // nodes per km^2
  double range_m = default_range_m;
  std::uint64_t seed = 0;
  std::vector<Position> positions;

  double side_m() const;
};

struct GeneratedTopology {
  Graph graph;
  GeometricScenario scenario;
};

struct RetriedTopology {
  Graph graph;
  GeometricScenario scenario;
  std::size_t attempts = 0;
};

struct Fig2Fixture {
  Graph physical;
  Graph dart_overlay;
  Graph atr_overlay;
};

Graph full_mesh(std::size_t n);

/// Side of the deployment square in meters.
double deployment_side_m(std::size_t n, double density);

/// Positions come from mt19937_64(seed): for each node in id order, x then y,
/// each drawn as (engine() >> 11) * 2^-53 * side. That mapping is frozen.
GeneratedTopology random_geometric(std::size_t n, double density, double range_m, std::uint64_t seed);

/// Tries seed, seed+1, ... until the unit-disk graph is connected; throws
/// after max_generation_attempts failures.
RetriedTopology connected_or_retry(std::size_t n, double density, double range_m, std::uint64_t seed);

/// The 8-node physical, DART and ATR matrices used as a reference fixture.
Fig2Fixture fixture_fig2();

/// Canonical matrix text of the three fixture graphs.
std::string fixture_fig2_physical_text();
std::string fixture_fig2_dart_text();
std::string fixture_fig2_atr_text();

/// Sidecar text: '#' header echoing the parameters, then `id x_m y_m` per node.
std::string serialize_scenario(const GeometricScenario& scenario);

} // namespace relyroute

#endif // RELYROUTE_TOPOLOGY_HPP
