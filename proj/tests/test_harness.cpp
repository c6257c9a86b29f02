#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "kdst/experiment.hpp"
#include "fixtures.hpp"

using namespace kdst;

namespace {

// Everything but the trailing wall-clock column, which is the one
// intentionally nondeterministic CSV field.
std::string strip_wall_column(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto cut = line.rfind(',');
    out << line.substr(0, cut) << "\n";
  }
  return out.str();
}

} // namespace

TEST_CASE("diamond generator builds the canonical instance") {
  const KdstInstance inst = generate_diamond({2, 2});
  REQUIRE(inst == fixtures::diamond());
  REQUIRE_THROWS_AS(generate_diamond({2, 3}), ConfigError);
}

TEST_CASE("layered-dag generation is a function of (params, seed)") {
  LayeredDagParams params;
  params.n = 10;
  params.depth = 3;
  params.edge_probability = 0.4;
  params.k = 2;
  params.terminal_count = 2;
  const KdstInstance a = generate_layered_dag(params, 7);
  const KdstInstance b = generate_layered_dag(params, 7);
  REQUIRE(a == b);
  const KdstInstance c = generate_layered_dag(params, 8);
  REQUIRE_FALSE(a == c);
}

TEST_CASE("generated instances are layered, plant k-connectivity, round-trip") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    LayeredDagParams params;
    params.n = 11;
    params.depth = 3;
    params.k = 2;
    params.terminal_count = 2;
    params.edge_probability = 0.3;
    const KdstInstance inst = generate_layered_dag(params, seed);

    REQUIRE(layered_dag_layers(inst).has_value());
    const KdstInstance reparsed = parse_instance(serialize_instance(inst));
    REQUIRE(inst == reparsed);
    for (int t : inst.terminals())
      REQUIRE(lambda_in_subgraph(inst.graph(), fixtures::all_edges(inst).edges,
                                 inst.root(), t) >= inst.k());
  }
}

TEST_CASE("generator dispatch by name") {
  REQUIRE(generate_instance("diamond", {{"width", 2}, {"k", 2}}, 0) ==
          fixtures::diamond());
  const KdstInstance path = generate_instance("path", {{"length", 3}}, 5);
  REQUIRE(path.depth_bound() == 3);
  REQUIRE(path.k() == 1);
  REQUIRE_THROWS_AS(generate_instance("nope", {}, 0), ConfigError);
}

TEST_CASE("spec validation rejects bad fields") {
  REQUIRE_THROWS_AS(spec_from_json({{"generator", "nope"}}), ConfigError);
  REQUIRE_THROWS_AS(spec_from_json({{"generator", "diamond"},
                                    {"seeds", json::array()},
                                    {"algorithms", {"kdst"}}}),
                    ConfigError);
  REQUIRE_THROWS_AS(spec_from_json({{"generator", "diamond"},
                                    {"seeds", {1}},
                                    {"algorithms", {"sorcery"}}}),
                    ConfigError);
}

TEST_CASE("diamond experiment yields ratio 1.0 against exact") {
  ExperimentSpec spec;
  spec.generator = "diamond";
  spec.params = {{"width", 2}, {"k", 2}};
  spec.seeds = {1};
  spec.algorithms = {"kdst", "exact"};
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].algorithm == "kdst");
  REQUIRE(rows[0].feasible == true);
  REQUIRE(rows[0].ratio_alg_opt.has_value());
  REQUIRE(*rows[0].ratio_alg_opt == 1.0);
  REQUIRE(rows[1].algorithm == "exact");
  REQUIRE(rows[1].algorithm_cost == 4.0);
}

TEST_CASE("row failures never abort the batch") {
  ExperimentSpec spec;
  spec.generator = "layered-dag";
  // depth 1 with k=2 is rejected by the generator: per-row config error.
  spec.params = {{"n", 4}, {"depth", 1}, {"k", 2}, {"terminals", 2}};
  spec.seeds = {1, 2};
  spec.algorithms = {"kdst"};
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    REQUIRE_FALSE(row.error.empty());
    REQUIRE_FALSE(row.algorithm_cost.has_value());
  }
}

TEST_CASE("experiment CSV reproduces bit-for-bit, including parallel runs") {
  ExperimentSpec spec;
  spec.generator = "layered-dag";
  spec.params = {{"n", 10}, {"depth", 3}, {"k", 2}, {"terminals", 2},
                 {"edge_probability", 0.35}};
  spec.seeds = {1, 2, 3, 4};
  spec.algorithms = {"kdst", "baseline", "exact"};
  const std::string first = strip_wall_column(rows_to_csv(run_experiment(spec, 1)));
  const std::string second = strip_wall_column(rows_to_csv(run_experiment(spec, 1)));
  const std::string parallel =
      strip_wall_column(rows_to_csv(run_experiment(spec, 4)));
  REQUIRE(first == second);
  REQUIRE(first == parallel);
}

TEST_CASE("experiment writes CSV and per-run transcripts") {
  const std::string dir =
      (std::filesystem::temp_directory_path() / "kdst_exp_test").string();
  std::filesystem::remove_all(dir);
  ExperimentSpec spec;
  spec.generator = "diamond";
  spec.seeds = {9};
  spec.algorithms = {"kdst"};
  spec.output_dir = dir;
  const auto rows = run_experiment_to_files(spec);
  REQUIRE(rows.size() == 1);
  REQUIRE(std::filesystem::exists(dir + "/results.csv"));
  REQUIRE(std::filesystem::exists(dir + "/run_9_kdst.json"));
  std::ifstream in(dir + "/run_9_kdst.json");
  json j;
  in >> j;
  REQUIRE(j["report"]["feasible"] == true);
  REQUIRE(j["transcript"]["rounds"].size() ==
          j["transcript"]["iterations"].get<std::size_t>());
  std::filesystem::remove_all(dir);
}

TEST_CASE("summarize rolls a CSV up per algorithm") {
  ExperimentSpec spec;
  spec.generator = "diamond";
  spec.seeds = {1, 2};
  spec.algorithms = {"kdst", "baseline"};
  const std::string csv = rows_to_csv(run_experiment(spec));
  const std::string table = summarize_csv(csv);
  REQUIRE(table.find("kdst") != std::string::npos);
  REQUIRE(table.find("baseline") != std::string::npos);
  REQUIRE_THROWS_AS(summarize_csv("bogus\n"), ParseError);
}

TEST_CASE("pipeline JSON serialization is self-consistent") {
  const KdstInstance inst = fixtures::diamond();
  const auto result = run_algorithm_kdst(inst);
  const json j = to_json(result, inst);
  REQUIRE(j["solution"]["cost"] == 4.0);
  REQUIRE(j["report"]["lambda"]["3"] == 2);
  const EdgeSetSolution back = solution_from_json(j["solution"]);
  REQUIRE(back.edges == result.solution.edges);
}
