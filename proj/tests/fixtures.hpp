// Shared instance builders for the unit and acceptance suites.
#pragma once

#include <random>
#include <vector>

#include "kdst/graph.hpp"
#include "kdst/util.hpp"

namespace fixtures {

inline kdst::KdstInstance diamond(int k = 2) {
  std::vector<kdst::Edge> edges{
      {0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}};
  return kdst::make_instance(4, std::move(edges), 0, {3}, k, 2);
}

inline kdst::KdstInstance two_edge_path(double c1 = 2.0, double c2 = 3.0) {
  std::vector<kdst::Edge> edges{{0, 1, c1}, {1, 2, c2}};
  return kdst::make_instance(3, std::move(edges), 0, {2}, 1, 2);
}

inline kdst::EdgeSetSolution all_edges(const kdst::KdstInstance& inst) {
  std::vector<int> ids(inst.graph().edge_count());
  for (int e = 0; e < inst.graph().edge_count(); ++e) ids[e] = e;
  return kdst::EdgeSetSolution::from_ids(std::move(ids));
}

// Strongly connected graph with two hub vertices wired to and from every
// city, so any ordered city pair has two vertex-disjoint length-2 routes.
// Random chords and costs come from the seed.
struct HubGraph {
  kdst::DirectedGraph graph;
  std::vector<int> terminals;
};

inline HubGraph strongly_connected_hub_graph(int cities, int terminal_count,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(kdst::splitmix64(seed ^ 0xabcdef123456ULL));
  const int h1 = cities;
  const int h2 = cities + 1;
  std::vector<kdst::Edge> edges;
  auto cost = [&] { return static_cast<double>(1 + kdst::uniform_below(rng, 5)); };
  for (int u = 0; u < cities; ++u) {
    edges.push_back({u, h1, cost()});
    edges.push_back({h1, u, cost()});
    edges.push_back({u, h2, cost()});
    edges.push_back({h2, u, cost()});
  }
  for (int u = 0; u < cities; ++u)
    for (int v = 0; v < cities; ++v)
      if (u != v && kdst::uniform_unit(rng) < 0.3)
        edges.push_back({u, v, cost()});
  std::vector<int> terminals;
  for (int t = 0; t < terminal_count; ++t) terminals.push_back(t);
  return {kdst::DirectedGraph(cities + 2, std::move(edges)), terminals};
}

} // namespace fixtures
