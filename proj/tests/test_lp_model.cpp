#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "kdst/generator.hpp"
#include "kdst/lp_model.hpp"
#include "kdst/mps.hpp"
#include "kdst/simplex.hpp"
#include "kdst/verify.hpp"

using namespace kdst;
using lp::SolveStatus;

namespace {

KdstInstance diamond_instance(int k = 2) {
  std::vector<Edge> edges{{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}};
  return make_instance(4, std::move(edges), 0, {3}, k, 2);
}

KdstInstance path_instance(double c1 = 2.0, double c2 = 3.0) {
  std::vector<Edge> edges{{0, 1, c1}, {1, 2, c2}};
  return make_instance(3, std::move(edges), 0, {2}, 1, 2);
}

struct SolvedStar {
  KdstInstance inst;
  GstTree tree;
  KdstLp star;
  lp::LpSolution solution;
  GstLp gst;
  lp::LpSolution embedded;
};

SolvedStar solve_star(KdstInstance inst) {
  PathSpace paths = enumerate_paths(inst);
  GstTree tree = build_gst_tree(std::move(paths), inst);
  KdstLp star = build_lp_kdst_star(inst, tree.paths);
  lp::LpSolution solution = simplex::solve(star.lp);
  REQUIRE(solution.status == SolveStatus::Optimal);
  GstLp gst = build_lp_gst(tree);
  lp::LpSolution embedded = embed_solution(star, solution, tree, gst);
  return {std::move(inst), std::move(tree), std::move(star),
          std::move(solution), std::move(gst), std::move(embedded)};
}

LayeredDagParams small_dag(int k, int depth, int n) {
  LayeredDagParams params;
  params.n = n;
  params.depth = depth;
  params.k = k;
  params.terminal_count = 2;
  params.edge_probability = 0.3;
  return params;
}

} // namespace

TEST_CASE("LP-k-DST* on the diamond has optimum 4") {
  const SolvedStar s = solve_star(diamond_instance());
  REQUIRE(s.solution.objective_value == Catch::Approx(4.0));
}

TEST_CASE("LP-k-DST* on the two-edge path has optimum 5") {
  const SolvedStar s = solve_star(path_instance());
  REQUIRE(s.solution.objective_value == Catch::Approx(5.0));
}

TEST_CASE("LP-k-DST is never above LP-k-DST*") {
  const KdstInstance diamond = diamond_instance();
  const PathSpace paths = enumerate_paths(diamond);
  const auto plain = simplex::solve(build_lp_kdst(diamond, paths).lp);
  REQUIRE(plain.status == SolveStatus::Optimal);
  REQUIRE(plain.objective_value == Catch::Approx(4.0));

  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const KdstInstance inst = generate_layered_dag(small_dag(2, 3, 10), seed);
    const PathSpace ip = enumerate_paths(inst);
    const auto weak = simplex::solve(build_lp_kdst(inst, ip).lp);
    const auto strong = simplex::solve(build_lp_kdst_star(inst, ip).lp);
    REQUIRE(weak.status == SolveStatus::Optimal);
    REQUIRE(strong.status == SolveStatus::Optimal);
    REQUIRE(weak.objective_value <=
            strong.objective_value + 1e-6 * (1.0 + strong.objective_value));
  }
}

TEST_CASE("LP-k-DST* stays below the exact optimum") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    LayeredDagParams params = small_dag(2, 3, 9);
    params.edge_probability = 0.25;
    const KdstInstance inst = generate_layered_dag(params, seed);
    if (inst.graph().edge_count() > 24) continue;
    const SolvedStar s = solve_star(inst);
    const auto opt = exact_opt(inst);
    REQUIRE(opt.has_value());
    REQUIRE(s.solution.objective_value <= opt->cost * (1.0 + 1e-6) + 1e-9);
  }
}

TEST_CASE("LP-GST values on hand-checked trees") {
  SECTION("diamond tree optimum is 2") {
    const KdstInstance inst = diamond_instance();
    const GstTree tree = build_gst_tree(enumerate_paths(inst), inst);
    const auto sol = simplex::solve(build_lp_gst(tree).lp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    REQUIRE(sol.objective_value == Catch::Approx(2.0));
  }
  SECTION("single path tree pays the path cost") {
    const KdstInstance inst = path_instance(2.0, 3.0);
    const GstTree tree = build_gst_tree(enumerate_paths(inst), inst);
    const auto sol = simplex::solve(build_lp_gst(tree).lp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    REQUIRE(sol.objective_value == Catch::Approx(5.0));
  }
  SECTION("group at a root child pays exactly that edge") {
    std::vector<Edge> edges{{0, 1, 4.0}, {1, 2, 1.0}};
    const KdstInstance inst = make_instance(3, std::move(edges), 0, {1}, 1, 2);
    const GstTree tree = build_gst_tree(enumerate_paths(inst), inst);
    const auto sol = simplex::solve(build_lp_gst(tree).lp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    REQUIRE(sol.objective_value == Catch::Approx(4.0));
  }
}

TEST_CASE("embedding an integral diamond optimum is the identity") {
  const SolvedStar s = solve_star(diamond_instance());
  for (int v = 1; v < s.tree.node_count(); ++v)
    REQUIRE(s.embedded.values[s.gst.xhat_var[v]] == Catch::Approx(1.0));
  for (int fv : s.gst.fhat_var[0])
    REQUIRE(s.embedded.values[fv] == Catch::Approx(1.0));
}

TEST_CASE("embedding requires an optimal input") {
  const KdstInstance inst = diamond_instance();
  const GstTree tree = build_gst_tree(enumerate_paths(inst), inst);
  const KdstLp star = build_lp_kdst_star(inst, tree.paths);
  const GstLp gst = build_lp_gst(tree);
  lp::LpSolution bogus;
  bogus.status = SolveStatus::Infeasible;
  REQUIRE_THROWS_AS(embed_solution(star, bogus, tree, gst), ValidationError);
}

TEST_CASE("embedded points satisfy LP-GST on random seeds") {
  for (std::uint64_t seed = 21; seed <= 32; ++seed) {
    const KdstInstance inst = generate_layered_dag(small_dag(2, 3, 10), seed);
    const SolvedStar s = solve_star(inst);
    REQUIRE(s.gst.lp.max_violation(s.embedded.values) < 1e-6);
  }
}

TEST_CASE("Lemma 5 cost bound: embedded cost <= k^(D-2) * LP cost") {
  for (int k = 1; k <= 3; ++k) {
    for (int depth = 2; depth <= 3; ++depth) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const KdstInstance inst =
            generate_layered_dag(small_dag(k, depth, 11), seed);
        const SolvedStar s = solve_star(inst);
        const double bound = std::pow(static_cast<double>(k), depth - 2) *
                             s.solution.objective_value;
        REQUIRE(s.embedded.objective_value <= bound * (1.0 + 1e-9) + 1e-12);
      }
    }
  }
}

TEST_CASE("restriction keeps one unit of surviving group flow (Lemma 6)") {
  SECTION("empty F is the identity") {
    const SolvedStar s = solve_star(diamond_instance());
    const auto restricted = restrict_solution(s.embedded, s.tree, s.gst, {});
    REQUIRE(restricted.values == s.embedded.values);
  }
  SECTION("diamond minus one t-edge still carries a unit") {
    const SolvedStar s = solve_star(diamond_instance());
    const auto at_edge = s.inst.graph().find_edge(1, 3);
    REQUIRE(at_edge.has_value());
    const auto restricted =
        restrict_solution(s.embedded, s.tree, s.gst, {*at_edge});
    // Node 3 is the path (r,a,t); its flow must vanish.
    REQUIRE(restricted.values[s.gst.fhat_var[0][0]] == 0.0);
    const auto flows = group_flow(restricted, s.gst);
    REQUIRE(flows[0] >= 1.0 - 1e-6);
  }
  SECTION("single banned edge on random k=2 seeds") {
    for (std::uint64_t seed = 41; seed <= 60; ++seed) {
      const KdstInstance inst = generate_layered_dag(small_dag(2, 3, 10), seed);
      const SolvedStar s = solve_star(inst);
      for (int banned = 0; banned < inst.graph().edge_count(); ++banned) {
        const auto restricted =
            restrict_solution(s.embedded, s.tree, s.gst, {banned});
        for (double flow : group_flow(restricted, s.gst))
          REQUIRE(flow >= 1.0 - 1e-6);
      }
    }
  }
}

TEST_CASE("integral witnesses of minimal solutions satisfy LP-k-DST*") {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    for (int k = 1; k <= 2; ++k) {
      LayeredDagParams params = small_dag(k, 3, 8);
      params.terminal_count = 1;
      const KdstInstance inst = generate_layered_dag(params, seed);
      const PathSpace paths = enumerate_paths(inst);
      const KdstLp star = build_lp_kdst_star(inst, paths);

      std::vector<EdgeSetSolution> minimal_solutions;
      std::vector<int> everything(inst.graph().edge_count());
      for (int e = 0; e < inst.graph().edge_count(); ++e) everything[e] = e;
      minimal_solutions.push_back(
          minimalize(EdgeSetSolution::from_ids(everything), inst, rng));
      minimal_solutions.push_back(minimalize(baseline_t_approx(inst), inst, rng));
      if (inst.graph().edge_count() <= 24) {
        const auto opt = exact_opt(inst);
        REQUIRE(opt.has_value());
        minimal_solutions.push_back(minimalize(opt->solution, inst, rng));
      }
      for (const EdgeSetSolution& sol : minimal_solutions) {
        const auto witness = integral_witness(sol, star, paths);
        REQUIRE(star.lp.max_violation(witness) <= 1e-9);
        REQUIRE(star.lp.objective_value(witness) ==
                Catch::Approx(solution_cost(sol, inst.graph())));
        ++checked;
      }
    }
  }
  REQUIRE(checked >= 48);
}

TEST_CASE("model LPs export tagged MPS names and re-import") {
  const KdstInstance inst = diamond_instance();
  const PathSpace paths = enumerate_paths(inst);
  const KdstLp star = build_lp_kdst_star(inst, paths);
  const std::string mps = lp::write_mps(star.lp, "DIAMOND");
  REQUIRE(mps.find("x_0") != std::string::npos);
  REQUIRE(mps.find("y_1") != std::string::npos);
  REQUIRE(mps.find("f_0_3") != std::string::npos);

  const lp::LinearProgram back = lp::read_mps(mps);
  REQUIRE(back.variable_count() == star.lp.variable_count());
  const auto direct = simplex::solve(star.lp);
  const auto again = simplex::solve(back);
  REQUIRE(again.objective_value ==
          Catch::Approx(direct.objective_value).epsilon(1e-9));
  // Tags survive the round trip.
  bool found_f = false;
  for (int j = 0; j < back.variable_count(); ++j)
    if (back.tags[j].kind == lp::VarTag::Kind::F) found_f = true;
  REQUIRE(found_f);
}
