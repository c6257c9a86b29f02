#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "kdst/generator.hpp"
#include "kdst/path_space.hpp"
#include "oracles.hpp"

using namespace kdst;

namespace {

KdstInstance diamond_instance(int k = 2) {
  std::vector<Edge> edges{{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}};
  return make_instance(4, std::move(edges), 0, {3}, k, 2);
}

KdstInstance path_instance(int depth_bound) {
  std::vector<Edge> edges{{0, 1, 1.0}, {1, 2, 1.0}};
  return make_instance(3, std::move(edges), 0, {2}, 1, depth_bound);
}

KdstInstance random_dag_instance(std::mt19937_64& rng, int n, int depth) {
  // Random DAG on a topological order, rooted at 0; terminal = last vertex
  // reachable or just vertex n-1 (tests that need groups check reachability).
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng() % 100 < 45)
        edges.push_back({u, v, static_cast<double>(1 + rng() % 5)});
  return make_instance(n, std::move(edges), 0, {n - 1}, 1, depth);
}

} // namespace

TEST_CASE("path graph enumerates exactly its prefixes") {
  const PathSpace ps = enumerate_paths(path_instance(2));
  REQUIRE(ps.size() == 3);
  REQUIRE(ps.depth == std::vector<int>{0, 1, 2});
  REQUIRE(ps.vertex_sequence(2) == std::vector<int>{0, 1, 2});
}

TEST_CASE("diamond enumerates five paths in BFS order") {
  const PathSpace ps = enumerate_paths(diamond_instance());
  REQUIRE(ps.size() == 5);
  REQUIRE(ps.vertex_sequence(1) == std::vector<int>{0, 1});
  REQUIRE(ps.vertex_sequence(2) == std::vector<int>{0, 2});
  REQUIRE(ps.vertex_sequence(3) == std::vector<int>{0, 1, 3});
  REQUIRE(ps.vertex_sequence(4) == std::vector<int>{0, 2, 3});
}

TEST_CASE("enumeration count matches the naive DFS oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const KdstInstance inst = random_dag_instance(rng, 8, 3);
    const PathSpace ps = enumerate_paths(inst);
    const oracle::PathCounter counter{8, inst.graph().edges(), 0};
    REQUIRE(ps.size() == counter.count_all(3));
  }
}

TEST_CASE("Q_l(e) counts match the oracle on random instances") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 7); // up to 10
    const int depth = 2 + static_cast<int>(rng() % 2);
    const KdstInstance inst = random_dag_instance(rng, n, depth);
    const PathSpace ps = enumerate_paths(inst);
    const oracle::PathCounter counter{n, inst.graph().edges(), 0};
    for (int e = 0; e < inst.graph().edge_count(); ++e)
      for (int len = 1; len <= depth; ++len)
        REQUIRE(ps.count_ending_at_edge(e, len) ==
                counter.count_to_edge(e, len));
    for (int v = 0; v < n; ++v) {
      int ending_here = 0;
      for (int p : ps.by_end_vertex[v]) {
        (void)p;
        ++ending_here;
      }
      REQUIRE(ending_here == counter.count_to_vertex(v, depth));
    }
  }
}

TEST_CASE("path cap aborts with the count reached") {
  LayeredDagParams params;
  params.n = 12;
  params.depth = 3;
  params.edge_probability = 1.0;
  params.k = 2;
  params.terminal_count = 2;
  const KdstInstance inst = generate_layered_dag(params, 1);
  PathEnumerationOptions opts;
  opts.max_paths = 10;
  REQUIRE_THROWS_AS(enumerate_paths(inst, opts), ResourceCapError);
  REQUIRE_THROWS_WITH(enumerate_paths(inst, opts),
                      Catch::Matchers::ContainsSubstring("10"));
}

TEST_CASE("diamond suffix tree: 5 nodes, 4 edges, one group of two") {
  const KdstInstance inst = diamond_instance();
  const GstTree tree = build_gst_tree(enumerate_paths(inst), inst);
  REQUIRE(tree.node_count() == 5);
  REQUIRE(tree.edge_count() == 4);
  REQUIRE(tree.groups.size() == 1);
  REQUIRE(tree.groups[0] == std::vector<int>{3, 4});
  for (int v = 1; v < 5; ++v) REQUIRE(tree.edge_cost[v] == 1.0);
}

TEST_CASE("unreachable terminal within D hops is an infeasibility error") {
  REQUIRE_THROWS_AS(build_gst_tree(enumerate_paths(path_instance(1)),
                                   path_instance(1)),
                    InfeasibleError);
}

TEST_CASE("group sizes equal oracle r,t path counts") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const KdstInstance inst = random_dag_instance(rng, 8, 3);
    const oracle::PathCounter counter{8, inst.graph().edges(), 0};
    if (counter.count_to_vertex(7, 3) == 0) continue;
    const GstTree tree = build_gst_tree(enumerate_paths(inst), inst);
    REQUIRE(static_cast<int>(tree.groups[0].size()) ==
            counter.count_to_vertex(7, 3));
  }
}

TEST_CASE("tree path cost equals graph path cost, node-path bijection holds") {
  std::mt19937_64 rng(14);
  const KdstInstance inst = random_dag_instance(rng, 8, 3);
  const PathSpace ps = enumerate_paths(inst);
  const GstTree tree = build_gst_tree(ps, inst);
  for (int v = 0; v < tree.node_count(); ++v) {
    double graph_cost = 0.0;
    for (int e : ps.edge_ids(v)) graph_cost += inst.graph().edge(e).cost;
    REQUIRE(tree.tree_path_cost(v) == Catch::Approx(graph_cost));
    // Vertex sequences are pairwise distinct: the map path -> node is 1-1.
    for (int w = v + 1; w < tree.node_count(); ++w)
      REQUIRE(ps.vertex_sequence(v) != ps.vertex_sequence(w));
  }
}

TEST_CASE("map_tree_edges_to_graph deduplicates origins") {
  const KdstInstance inst = diamond_instance();
  const GstTree tree = build_gst_tree(enumerate_paths(inst), inst);
  REQUIRE(map_tree_edges_to_graph({}, tree).edges.empty());

  // Both group-node edges map to the two t-edges.
  const EdgeSetSolution into_groups = map_tree_edges_to_graph({3, 4}, tree);
  std::vector<Edge> arcs;
  for (int id : into_groups.edges) arcs.push_back(inst.graph().edge(id));
  REQUIRE(arcs.size() == 2);
  REQUIRE(arcs[0].head == 3);
  REQUIRE(arcs[1].head == 3);

  const EdgeSetSolution all = map_tree_edges_to_graph({1, 2, 3, 4}, tree);
  REQUIRE(all.edges == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("dot dump mentions every node") {
  const KdstInstance inst = diamond_instance();
  const GstTree tree = build_gst_tree(enumerate_paths(inst), inst);
  const std::string dot = gst_tree_to_dot(tree);
  REQUIRE(dot.find("digraph") != std::string::npos);
  REQUIRE(dot.find("n4") != std::string::npos);
  REQUIRE(dot.find("group 0") != std::string::npos);
}
