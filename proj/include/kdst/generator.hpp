#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kdst/errors.hpp"
#include "kdst/graph.hpp"
#include "kdst/util.hpp"

namespace kdst {

// width parallel root->mid->t channels of unit cost; the canonical diamond
// is width = 2, k = 2.
struct DiamondParams {
  int width = 2;
  int k = 2;
};

inline KdstInstance generate_diamond(const DiamondParams& params) {
  if (params.width < 1) throw ConfigError("diamond width must be positive");
  if (params.k < 1 || params.k > params.width)
    throw ConfigError("diamond needs 1 <= k <= width");
  const int t = params.width + 1;
  std::vector<Edge> edges;
  for (int mid = 1; mid <= params.width; ++mid) {
    edges.push_back({0, mid, 1.0});
    edges.push_back({mid, t, 1.0});
  }
  return make_instance(params.width + 2, std::move(edges), 0, {t}, params.k, 2);
}

// Single directed path r -> v1 -> ... -> t with k = 1 and D = length.
struct PathParams {
  int length = 2;
  int cost_min = 1;
  int cost_max = 9;
};

inline KdstInstance generate_path(const PathParams& params, std::uint64_t seed) {
  if (params.length < 1) throw ConfigError("path length must be positive");
  if (params.cost_min < 0 || params.cost_max < params.cost_min)
    throw ConfigError("path cost range invalid");
  std::mt19937_64 rng(splitmix64(seed));
  std::vector<Edge> edges;
  for (int v = 0; v < params.length; ++v) {
    const double c = static_cast<double>(
        params.cost_min +
        uniform_below(rng, static_cast<std::uint64_t>(params.cost_max -
                                                      params.cost_min + 1)));
    edges.push_back({v, v + 1, c});
  }
  return make_instance(params.length + 1, std::move(edges), 0, {params.length},
                       1, params.length);
}

// Random layered DAG on layers 0..depth with the root alone in layer 0 and
// the terminals forming layer depth. Feasibility is guaranteed by planting k
// vertex-disjoint layered paths per terminal before sprinkling random edges.
struct LayeredDagParams {
  int n = 10;
  int depth = 3;
  double edge_probability = 0.3;
  int k = 2;
  int terminal_count = 2;
  int cost_min = 1;
  int cost_max = 9;
  bool integer_costs = true;
};

inline KdstInstance generate_layered_dag(const LayeredDagParams& params,
                                         std::uint64_t seed) {
  const int h = params.terminal_count;
  if (params.depth < 1) throw ConfigError("layered-dag depth must be >= 1");
  if (h < 1) throw ConfigError("layered-dag needs at least one terminal");
  if (params.k < 1) throw ConfigError("layered-dag needs k >= 1");
  if (!(params.edge_probability >= 0.0 && params.edge_probability <= 1.0))
    throw ConfigError("edge probability must lie in [0,1]");
  if (params.cost_min < 0 || params.cost_max < params.cost_min)
    throw ConfigError("cost range invalid");
  const int internal_layers = params.depth - 1;
  const int internal_vertices = params.n - 1 - h;
  if (internal_layers > 0 && internal_vertices < internal_layers * params.k)
    throw ConfigError("layered-dag: not enough internal vertices for k-wide layers");
  if (internal_layers == 0 && params.depth == 1 && params.k > 1)
    throw ConfigError("layered-dag: depth 1 supports k = 1 only");

  // Layer sizes: remainder goes to the earlier layers.
  std::vector<std::vector<int>> layers(params.depth + 1);
  layers[0] = {0};
  int next_vertex = 1;
  if (internal_layers > 0) {
    const int base = internal_vertices / internal_layers;
    const int extra = internal_vertices % internal_layers;
    for (int l = 1; l <= internal_layers; ++l) {
      const int width = base + (l <= extra ? 1 : 0);
      for (int i = 0; i < width; ++i) layers[l].push_back(next_vertex++);
    }
  }
  std::vector<int> terminals;
  for (int i = 0; i < h; ++i) {
    layers[params.depth].push_back(next_vertex);
    terminals.push_back(next_vertex++);
  }

  std::mt19937_64 rng(splitmix64(seed));
  std::set<std::pair<int, int>> arcs;

  // Plant k vertex-disjoint layered paths per terminal.
  for (int t : terminals) {
    std::vector<std::vector<int>> columns(params.depth + 1);
    columns[0] = std::vector<int>(params.k, 0);
    columns[params.depth] = std::vector<int>(params.k, t);
    for (int l = 1; l < params.depth; ++l) {
      std::vector<int> pool = layers[l];
      for (std::size_t i = pool.size(); i > 1; --i)
        std::swap(pool[i - 1], pool[uniform_below(rng, i)]);
      pool.resize(params.k);
      columns[l] = std::move(pool);
    }
    for (int j = 0; j < params.k; ++j)
      for (int l = 0; l < params.depth; ++l)
        arcs.insert({columns[l][j], columns[l + 1][j]});
  }

  // Random extra edges between consecutive layers.
  for (int l = 0; l < params.depth; ++l)
    for (int u : layers[l])
      for (int v : layers[l + 1])
        if (uniform_unit(rng) < params.edge_probability) arcs.insert({u, v});

  // Costs drawn in canonical (tail, head) order, so the draw sequence is a
  // function of the arc set alone.
  std::vector<Edge> edges;
  edges.reserve(arcs.size());
  for (const auto& [u, v] : arcs) {
    double c;
    if (params.integer_costs) {
      c = static_cast<double>(
          params.cost_min +
          uniform_below(rng, static_cast<std::uint64_t>(params.cost_max -
                                                        params.cost_min + 1)));
    } else {
      c = params.cost_min +
          uniform_unit(rng) * (params.cost_max - params.cost_min);
    }
    edges.push_back({u, v, c});
  }
  return KdstInstance(DirectedGraph(next_vertex, std::move(edges)), 0,
                      std::move(terminals), params.k, params.depth);
}

} // namespace kdst
