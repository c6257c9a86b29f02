#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "kdst/errors.hpp"
#include "kdst/graph.hpp"
#include "kdst/lp_model.hpp"
#include "kdst/path_space.hpp"
#include "kdst/simplex.hpp"
#include "kdst/util.hpp"
#include "kdst/verify.hpp"

namespace kdst {

struct RoundingConfig {
  std::uint64_t rng_seed = 0;
  std::optional<int> iteration_override;
  double repeat_constant = 2.0; // the 2 in 2*D*k*log2(n)
  int max_restarts = 20;
  int threads = 1;
};

// x'_e = min(x_e, x'_parent) in root-to-leaf order (node ids are already
// topological). Marking probabilities then stay within [0,1]; group flow on a
// tree edge also crosses its parent edge, so LP-GST feasibility survives and
// the cost can only drop.
inline std::vector<double> monotonize(const GstTree& tree,
                                      std::vector<double> x_hat) {
  for (int v = 1; v < tree.node_count(); ++v) {
    const int parent = tree.parent_edge(v);
    const double cap = parent == 0 ? 1.0 : x_hat[parent];
    x_hat[v] = std::clamp(x_hat[v], 0.0, cap);
  }
  return x_hat;
}

// GKR rounding: mark edge e with probability x_e / x_parent(e) (depth-1 edges
// with probability x_e), keep the root-connected marked component. Requires a
// monotone x_hat; a zero parent value forces probability zero.
inline std::vector<int> gkr_round(const GstTree& tree,
                                  const std::vector<double>& x_hat,
                                  std::mt19937_64& rng) {
  std::vector<char> selected(tree.node_count(), 0);
  std::vector<int> picked;
  for (int v = 1; v < tree.node_count(); ++v) {
    const int parent = tree.parent_edge(v);
    const double parent_value = parent == 0 ? 1.0 : x_hat[parent];
    const double prob =
        parent_value <= 0.0 ? 0.0 : std::min(1.0, x_hat[v] / parent_value);
    const bool marked = uniform_unit(rng) < prob;
    if (marked && (parent == 0 || selected[parent])) {
      selected[v] = 1;
      picked.push_back(v);
    }
  }
  return picked;
}

struct RoundIteration {
  std::vector<int> tree_edges;  // Z~_i
  std::vector<int> graph_edges; // Z_i
  double cost = 0.0;
};

struct RoundingTranscript {
  std::uint64_t seed = 0;
  int iterations = 0; // N per attempt
  int attempts = 0;   // 1 + restarts
  int restarts() const { return attempts - 1; }
  std::vector<RoundIteration> rounds; // final attempt
  double union_cost = 0.0;
  bool feasible = false;
};

struct PipelineResult {
  EdgeSetSolution solution;
  RoundingTranscript transcript;
  VerificationReport report;
  double lp_objective = 0.0;
  double embedded_cost = 0.0; // cost(x_hat) before monotonize
  double monotone_cost = 0.0; // cost(x_hat) after monotonize
  int path_count = 0;
};

namespace detail {

inline int iteration_count_kdst(const RoundingConfig& cfg, int depth, int k,
                                int n) {
  if (cfg.iteration_override) return std::max(1, *cfg.iteration_override);
  const double raw = cfg.repeat_constant * depth * k *
                     std::log2(static_cast<double>(std::max(2, n)));
  return std::max(1, static_cast<int>(std::ceil(raw)));
}

inline int iteration_count_dst(const RoundingConfig& cfg, int depth, int h) {
  if (cfg.iteration_override) return std::max(1, *cfg.iteration_override);
  const double raw =
      cfg.repeat_constant * depth * std::log2(static_cast<double>(h + 1));
  return std::max(1, static_cast<int>(std::ceil(raw)));
}

inline PipelineResult run_pipeline(const KdstInstance& inst,
                                   const RoundingConfig& cfg, int iterations,
                                   const PathEnumerationOptions& path_opts,
                                   const simplex::SolverConfig& solver_cfg) {
  PipelineResult result;
  GstTree tree = build_gst_tree(enumerate_paths(inst, path_opts), inst);
  result.path_count = tree.node_count();

  const KdstLp star = build_lp_kdst_star(inst, tree.paths);
  const lp::LpSolution lp_solution = simplex::solve(star.lp, solver_cfg);
  if (lp_solution.status == lp::SolveStatus::Infeasible)
    throw InfeasibleError(
        "LP-k-DST* is infeasible: some terminal cannot carry " +
        std::to_string(inst.k()) + " units of flow within depth " +
        std::to_string(inst.depth_bound()));
  if (lp_solution.status != lp::SolveStatus::Optimal)
    throw SolverError("LP-k-DST* solve ended without an optimum");
  result.lp_objective = lp_solution.objective_value;

  const GstLp gst = build_lp_gst(tree);
  const lp::LpSolution embedded = embed_solution(star, lp_solution, tree, gst);
  result.embedded_cost = embedded.objective_value;

  std::vector<double> x_hat(tree.node_count(), 0.0);
  for (int v = 1; v < tree.node_count(); ++v)
    x_hat[v] = embedded.values[gst.xhat_var[v]];
  x_hat = monotonize(tree, std::move(x_hat));
  for (int v = 1; v < tree.node_count(); ++v)
    result.monotone_cost += tree.edge_cost[v] * x_hat[v];

  RoundingTranscript& transcript = result.transcript;
  transcript.seed = cfg.rng_seed;
  transcript.iterations = iterations;

  const int max_attempts = std::max(1, cfg.max_restarts + 1);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<RoundIteration> rounds(iterations);
    parallel_for(static_cast<std::size_t>(iterations), cfg.threads,
                 [&](std::size_t iter) {
                   std::mt19937_64 rng(derive_stream(
                       cfg.rng_seed, static_cast<std::uint64_t>(attempt), iter));
                   RoundIteration& round = rounds[iter];
                   round.tree_edges = gkr_round(tree, x_hat, rng);
                   const EdgeSetSolution mapped =
                       map_tree_edges_to_graph(round.tree_edges, tree);
                   round.graph_edges = mapped.edges;
                   round.cost = solution_cost(mapped, inst.graph());
                 });
    std::vector<int> all;
    for (const RoundIteration& round : rounds)
      all.insert(all.end(), round.graph_edges.begin(), round.graph_edges.end());
    EdgeSetSolution unioned = EdgeSetSolution::from_ids(std::move(all));
    VerificationReport report = verify(unioned, inst);

    transcript.attempts = attempt + 1;
    if (report.feasible) {
      transcript.rounds = std::move(rounds);
      transcript.union_cost = report.cost;
      transcript.feasible = true;
      result.solution = std::move(unioned);
      result.report = std::move(report);
      if (result.lp_objective > 0.0)
        result.report.lp_ratio = result.report.cost / result.lp_objective;
      return result;
    }
  }
  throw RoundingError("rounding produced no feasible union after " +
                      std::to_string(max_attempts) + " attempts of " +
                      std::to_string(iterations) + " iterations each");
}

} // namespace detail

// Algorithm: solve LP-k-DST*, embed into LP-GST on the suffix tree, run GKR
// rounding ceil(c*D*k*log2 n) times and return the union of the mapped
// rounds; on an infeasible union, retry with fresh randomness (same LP
// solution) up to max_restarts times.
inline PipelineResult run_algorithm_kdst(
    const KdstInstance& inst, const RoundingConfig& cfg = {},
    const PathEnumerationOptions& path_opts = {},
    const simplex::SolverConfig& solver_cfg = {}) {
  const int n = inst.graph().vertex_count();
  const int iterations =
      detail::iteration_count_kdst(cfg, inst.depth_bound(), inst.k(), n);
  return detail::run_pipeline(inst, cfg, iterations, path_opts, solver_cfg);
}

// DST specialization (k = 1): ceil(c*D*log2(h+1)) iterations suffice.
inline PipelineResult run_algorithm_dst(
    const KdstInstance& inst, const RoundingConfig& cfg = {},
    const PathEnumerationOptions& path_opts = {},
    const simplex::SolverConfig& solver_cfg = {}) {
  if (inst.k() != 1)
    throw ConfigError("run_algorithm_dst requires k = 1, got k = " +
                      std::to_string(inst.k()));
  const int iterations = detail::iteration_count_dst(cfg, inst.depth_bound(),
                                                     inst.terminal_count());
  return detail::run_pipeline(inst, cfg, iterations, path_opts, solver_cfg);
}

struct SteinerSubgraphResult {
  EdgeSetSolution solution; // edge ids of the input graph
  double cost = 0.0;
  bool feasible = false;
  // lambda for every ordered terminal pair (s, t), s != t.
  std::vector<std::tuple<int, int, int>> pair_connectivity;
  PipelineResult outward; // rooted run from t*
  PipelineResult inward;  // rooted run toward t* (on the reversed graph)
};

// Rootless variant: pick t* = first terminal, connect t* -> T \ {t*} with one
// rooted run and T \ {t*} -> t* with a second run on the reversed graph; the
// union is k-edge-connected on T by transitivity.
inline SteinerSubgraphResult run_steiner_subgraph(
    const DirectedGraph& graph, const std::vector<int>& terminals, int k,
    int depth_bound, const RoundingConfig& cfg = {},
    const PathEnumerationOptions& path_opts = {},
    const simplex::SolverConfig& solver_cfg = {}) {
  if (terminals.size() < 2)
    throw ConfigError("steiner subgraph needs at least two terminals");
  const int hub = terminals[0];
  std::vector<int> others(terminals.begin() + 1, terminals.end());

  RoundingConfig cfg_out = cfg;
  cfg_out.rng_seed = splitmix64(cfg.rng_seed ^ 0x0f0f0f0f0f0f0f0fULL);
  RoundingConfig cfg_in = cfg;
  cfg_in.rng_seed = splitmix64(cfg.rng_seed ^ 0xf0f0f0f0f0f0f0f0ULL);

  SteinerSubgraphResult result;
  {
    KdstInstance inst = make_instance(graph.vertex_count(), graph.edges(), hub,
                                      others, k, depth_bound);
    result.outward = run_algorithm_kdst(inst, cfg_out, path_opts, solver_cfg);
    for (int e : result.outward.solution.edges)
      result.solution.edges.push_back(inst.source_edges()[e]);
  }
  {
    std::vector<Edge> reversed;
    reversed.reserve(graph.edges().size());
    for (const Edge& e : graph.edges()) reversed.push_back({e.head, e.tail, e.cost});
    KdstInstance inst = make_instance(graph.vertex_count(), std::move(reversed),
                                      hub, others, k, depth_bound);
    result.inward = run_algorithm_kdst(inst, cfg_in, path_opts, solver_cfg);
    // Positions in the reversed edge list coincide with ids in `graph`.
    for (int e : result.inward.solution.edges)
      result.solution.edges.push_back(inst.source_edges()[e]);
  }
  result.solution = EdgeSetSolution::from_ids(std::move(result.solution.edges));
  result.cost = solution_cost(result.solution, graph);

  result.feasible = true;
  for (int s : terminals)
    for (int t : terminals) {
      if (s == t) continue;
      const int lam = lambda_in_subgraph(graph, result.solution.edges, s, t);
      result.pair_connectivity.push_back({s, t, lam});
      result.feasible = result.feasible && lam >= k;
    }
  return result;
}

} // namespace kdst
