#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "kdst/errors.hpp"
#include "kdst/generator.hpp"
#include "kdst/graph.hpp"
#include "kdst/lp.hpp"
#include "kdst/rounding.hpp"
#include "kdst/verify.hpp"

namespace kdst {

using nlohmann::json;

inline json to_json(const EdgeSetSolution& sol, const DirectedGraph& graph) {
  json arcs = json::array();
  for (int id : sol.edges) {
    const Edge& e = graph.edge(id);
    arcs.push_back({{"id", id}, {"tail", e.tail}, {"head", e.head},
                    {"cost", e.cost}});
  }
  return {{"edges", sol.edges}, {"arcs", arcs},
          {"cost", solution_cost(sol, graph)}};
}

inline EdgeSetSolution solution_from_json(const json& j) {
  if (!j.contains("edges") || !j["edges"].is_array())
    throw ParseError("solution json needs an 'edges' array");
  return EdgeSetSolution::from_ids(j["edges"].get<std::vector<int>>());
}

inline json to_json(const VerificationReport& report,
                    const std::vector<int>& terminals) {
  json lambdas = json::object();
  for (std::size_t i = 0; i < terminals.size(); ++i)
    lambdas[std::to_string(terminals[i])] = report.lambda[i];
  json out = {{"lambda", lambdas},
              {"feasible", report.feasible},
              {"cost", report.cost}};
  if (report.lp_ratio) out["lp_ratio"] = *report.lp_ratio;
  if (report.opt_ratio) out["opt_ratio"] = *report.opt_ratio;
  return out;
}

inline json to_json(const RoundingTranscript& transcript) {
  json rounds = json::array();
  for (const RoundIteration& round : transcript.rounds)
    rounds.push_back({{"tree_edges", round.tree_edges},
                      {"graph_edges", round.graph_edges},
                      {"cost", round.cost}});
  return {{"seed", transcript.seed},
          {"iterations", transcript.iterations},
          {"attempts", transcript.attempts},
          {"restarts", transcript.restarts()},
          {"union_cost", transcript.union_cost},
          {"feasible", transcript.feasible},
          {"rounds", rounds}};
}

inline json to_json(const PipelineResult& result, const KdstInstance& inst) {
  return {{"solution", to_json(result.solution, inst.graph())},
          {"report", to_json(result.report, inst.terminals())},
          {"transcript", to_json(result.transcript)},
          {"lp_objective", result.lp_objective},
          {"embedded_cost", result.embedded_cost},
          {"monotone_cost", result.monotone_cost},
          {"path_count", result.path_count}};
}

inline json to_json(const lp::LpSolution& solution, const lp::LinearProgram& lp) {
  json values = json::object();
  if (solution.status == lp::SolveStatus::Optimal)
    for (int j = 0; j < lp.variable_count(); ++j)
      values[lp.variable_name(j)] = solution.values[j];
  return {{"status", lp::to_string(solution.status)},
          {"objective", solution.objective_value},
          {"values", values},
          {"iterations", solution.stats.iterations}};
}

// Generator dispatch used by the CLI and the experiment runner.
inline KdstInstance generate_instance(const std::string& name,
                                      const json& params, std::uint64_t seed) {
  auto get_int = [&](const char* key, int fallback) {
    return params.contains(key) ? params.at(key).get<int>() : fallback;
  };
  auto get_double = [&](const char* key, double fallback) {
    return params.contains(key) ? params.at(key).get<double>() : fallback;
  };
  if (name == "diamond") {
    DiamondParams p;
    p.width = get_int("width", p.width);
    p.k = get_int("k", p.k);
    return generate_diamond(p);
  }
  if (name == "path") {
    PathParams p;
    p.length = get_int("length", p.length);
    p.cost_min = get_int("cost_min", p.cost_min);
    p.cost_max = get_int("cost_max", p.cost_max);
    return generate_path(p, seed);
  }
  if (name == "layered-dag") {
    LayeredDagParams p;
    p.n = get_int("n", p.n);
    p.depth = get_int("depth", p.depth);
    p.edge_probability = get_double("edge_probability", p.edge_probability);
    p.k = get_int("k", p.k);
    p.terminal_count = get_int("terminals", p.terminal_count);
    p.cost_min = get_int("cost_min", p.cost_min);
    p.cost_max = get_int("cost_max", p.cost_max);
    if (params.contains("integer_costs"))
      p.integer_costs = params.at("integer_costs").get<bool>();
    return generate_layered_dag(p, seed);
  }
  throw ConfigError("unknown generator '" + name +
                    "' (expected diamond, path or layered-dag)");
}

} // namespace kdst
