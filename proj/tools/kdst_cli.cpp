// Command-line front end: instance generation, LP export, rounding runs,
// verification and batch experiments.
//
// Exit codes: 0 success, 1 failure, 2 infeasible, 3 resource cap, 4 config.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kdst/kdst.hpp"

namespace {

using namespace kdst;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file '" + path + "'");
  out << content;
}

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 1;
  std::int64_t path_cap = 2'000'000;
  double repeat_constant = 2.0;
  int max_restarts = 20;
  std::string format = "json";
  bool split_parallel = false;

  RoundingConfig rounding() const {
    RoundingConfig cfg;
    cfg.rng_seed = seed;
    cfg.repeat_constant = repeat_constant;
    cfg.max_restarts = max_restarts;
    cfg.threads = threads;
    return cfg;
  }
  PathEnumerationOptions paths() const { return {path_cap}; }
  ParallelEdgePolicy policy() const {
    return split_parallel ? ParallelEdgePolicy::SplitWithMidpoint
                          : ParallelEdgePolicy::Reject;
  }
};

void emit_report(const GlobalOptions& opt, const json& report) {
  if (opt.format == "csv") {
    std::string keys, values;
    for (auto it = report.begin(); it != report.end(); ++it) {
      if (!it.value().is_primitive()) continue;
      keys += (keys.empty() ? "" : ",") + it.key();
      values += (values.empty() ? "" : ",") + it.value().dump();
    }
    std::cout << keys << "\n" << values << "\n";
  } else {
    std::cout << report.dump(2) << "\n";
  }
}

json pipeline_summary(const PipelineResult& result, const KdstInstance& inst) {
  return {{"feasible", result.report.feasible},
          {"cost", result.report.cost},
          {"lp_value", result.lp_objective},
          {"embedded_cost", result.embedded_cost},
          {"paths", result.path_count},
          {"iterations", result.transcript.iterations},
          {"restarts", result.transcript.restarts()},
          {"lambda", to_json(result.report, inst.terminals())["lambda"]}};
}

int run(int argc, char** argv) {
  CLI::App app{"k edge-connected directed Steiner tree via suffix-tree "
               "embedding and randomized rounding"};
  app.require_subcommand(1);

  GlobalOptions opt;
  app.add_option("--seed", opt.seed, "root RNG seed");
  app.add_option("--threads", opt.threads, "worker threads for rounding/batches");
  app.add_option("--path-cap", opt.path_cap, "abort if |Q_D| would exceed this");
  app.add_option("--repeat-constant", opt.repeat_constant,
                 "c in N = ceil(c*D*k*log2 n)");
  app.add_option("--max-restarts", opt.max_restarts,
                 "rounding retries on an infeasible union");
  app.add_option("--format", opt.format, "report format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--split-parallel", opt.split_parallel,
               "subdivide parallel edges with a zero-cost midpoint instead of "
               "rejecting them");

  // --- solve ---
  auto* solve_cmd = app.add_subcommand("solve", "run the full pipeline on one instance");
  std::string solve_instance, solve_algorithm = "kdst", solve_out,
              solve_transcript, solve_dot;
  solve_cmd->add_option("instance", solve_instance, "instance file")->required();
  solve_cmd->add_option("--algorithm", solve_algorithm, "kdst|dst")
      ->check(CLI::IsMember({"kdst", "dst"}));
  solve_cmd->add_option("-o,--output", solve_out, "write the full run JSON here");
  solve_cmd->add_option("--transcript", solve_transcript,
                        "write the rounding transcript JSON here");
  solve_cmd->add_option("--dump-tree", solve_dot,
                        "write the suffix tree as DOT text");

  // --- lp ---
  auto* lp_cmd = app.add_subcommand("lp", "build and solve a relaxation, export MPS");
  std::string lp_instance, lp_variant = "kdst-star", lp_mps, lp_solution_out,
              lp_dot;
  lp_cmd->add_option("instance", lp_instance, "instance file")->required();
  lp_cmd->add_option("--variant", lp_variant, "kdst-star|kdst|gst")
      ->check(CLI::IsMember({"kdst-star", "kdst", "gst"}));
  lp_cmd->add_option("--mps", lp_mps, "write the LP in MPS format here");
  lp_cmd->add_option("--solution", lp_solution_out,
                     "write the LP solution JSON here");
  lp_cmd->add_option("--dump-tree", lp_dot, "write the suffix tree as DOT text");

  // --- round ---
  auto* round_cmd =
      app.add_subcommand("round", "rounding only, from a stored LP solution");
  std::string round_instance, round_solution, round_out;
  round_cmd->add_option("instance", round_instance, "instance file")->required();
  round_cmd->add_option("--solution", round_solution,
                        "LP solution JSON produced by 'lp --variant kdst-star'")
      ->required();
  round_cmd->add_option("-o,--output", round_out, "write the run JSON here");

  // --- verify ---
  auto* verify_cmd =
      app.add_subcommand("verify", "check a solution's per-terminal connectivity");
  std::string verify_instance, verify_solution;
  verify_cmd->add_option("instance", verify_instance, "instance file")->required();
  verify_cmd->add_option("solution", verify_solution, "solution JSON")->required();

  // --- exact ---
  auto* exact_cmd = app.add_subcommand("exact", "branch-and-bound optimum");
  std::string exact_instance, exact_out;
  std::uint64_t exact_nodes = ExactOptBudget{}.max_nodes;
  int exact_max_edges = ExactOptBudget{}.max_edges;
  exact_cmd->add_option("instance", exact_instance, "instance file")->required();
  exact_cmd->add_option("-o,--output", exact_out, "write the solution JSON here");
  exact_cmd->add_option("--node-budget", exact_nodes, "search node budget");
  exact_cmd->add_option("--max-edges", exact_max_edges, "edge-count guard");

  // --- baseline ---
  auto* baseline_cmd =
      app.add_subcommand("baseline", "|T| min-cost k-flows, unioned");
  std::string baseline_instance, baseline_out;
  baseline_cmd->add_option("instance", baseline_instance, "instance file")
      ->required();
  baseline_cmd->add_option("-o,--output", baseline_out,
                           "write the solution JSON here");

  // --- generate ---
  auto* gen_cmd = app.add_subcommand("generate", "write a benchmark instance");
  std::string gen_name, gen_params = "{}", gen_out;
  gen_cmd->add_option("--generator", gen_name, "diamond|path|layered-dag")
      ->required();
  gen_cmd->add_option("--params", gen_params, "generator parameters as JSON");
  gen_cmd->add_option("-o,--output", gen_out, "instance file (default stdout)");

  // --- experiment ---
  auto* exp_cmd = app.add_subcommand("experiment", "run a batch spec");
  std::string exp_spec, exp_output;
  exp_cmd->add_option("--spec", exp_spec, "experiment spec JSON file")->required();
  exp_cmd->add_option("--output", exp_output,
                      "output directory (overrides the spec)");

  // --- report ---
  auto* report_cmd = app.add_subcommand("report", "summarize a results CSV");
  std::string report_csv;
  bool report_summarize = false;
  report_cmd->add_flag("--summarize", report_summarize, "emit a plain-text table");
  report_cmd->add_option("csv", report_csv, "results.csv path")->required();

  // Let global flags appear after the subcommand name as well.
  for (CLI::App* sub : {solve_cmd, lp_cmd, round_cmd, verify_cmd, exact_cmd,
                        baseline_cmd, gen_cmd, exp_cmd, report_cmd})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::Config);
  }

  if (solve_cmd->parsed()) {
    const KdstInstance inst =
        parse_instance(read_file(solve_instance), opt.policy());
    if (!solve_dot.empty())
      write_file(solve_dot,
                 gst_tree_to_dot(build_gst_tree(enumerate_paths(inst, opt.paths()), inst)));
    const PipelineResult result =
        solve_algorithm == "dst"
            ? run_algorithm_dst(inst, opt.rounding(), opt.paths())
            : run_algorithm_kdst(inst, opt.rounding(), opt.paths());
    if (!solve_out.empty())
      write_file(solve_out, to_json(result, inst).dump(2) + "\n");
    if (!solve_transcript.empty())
      write_file(solve_transcript, to_json(result.transcript).dump(2) + "\n");
    emit_report(opt, pipeline_summary(result, inst));
    return static_cast<int>(ExitCode::Ok);
  }

  if (lp_cmd->parsed()) {
    const KdstInstance inst = parse_instance(read_file(lp_instance), opt.policy());
    const PathSpace paths = enumerate_paths(inst, opt.paths());
    lp::LinearProgram program;
    if (lp_variant == "gst") {
      const GstTree tree = build_gst_tree(paths, inst);
      if (!lp_dot.empty()) write_file(lp_dot, gst_tree_to_dot(tree));
      program = build_lp_gst(tree).lp;
    } else {
      if (!lp_dot.empty())
        write_file(lp_dot, gst_tree_to_dot(build_gst_tree(paths, inst)));
      program = lp_variant == "kdst" ? build_lp_kdst(inst, paths).lp
                                     : build_lp_kdst_star(inst, paths).lp;
    }
    if (!lp_mps.empty()) write_file(lp_mps, lp::write_mps(program));
    const lp::LpSolution solution = simplex::solve(program);
    if (!lp_solution_out.empty())
      write_file(lp_solution_out, to_json(solution, program).dump(2) + "\n");
    emit_report(opt, {{"variant", lp_variant},
                      {"status", lp::to_string(solution.status)},
                      {"objective", solution.objective_value},
                      {"variables", program.variable_count()},
                      {"constraints", program.constraint_count()},
                      {"iterations", solution.stats.iterations}});
    if (solution.status == lp::SolveStatus::Infeasible)
      return static_cast<int>(ExitCode::Infeasible);
    return static_cast<int>(ExitCode::Ok);
  }

  if (round_cmd->parsed()) {
    const KdstInstance inst =
        parse_instance(read_file(round_instance), opt.policy());
    const json stored = json::parse(read_file(round_solution));
    if (!stored.contains("values"))
      throw ConfigError("LP solution file lacks a 'values' object");
    const GstTree tree =
        build_gst_tree(enumerate_paths(inst, opt.paths()), inst);
    std::vector<double> x_hat(tree.node_count(), 0.0);
    for (int v = 1; v < tree.node_count(); ++v) {
      const std::string name = "y_" + std::to_string(v);
      if (!stored["values"].contains(name))
        throw ConfigError("LP solution lacks variable '" + name +
                          "'; was it produced by 'lp --variant kdst-star' on "
                          "this instance?");
      x_hat[v] = stored["values"][name].get<double>();
    }
    x_hat = monotonize(tree, std::move(x_hat));

    const RoundingConfig cfg = opt.rounding();
    const int iterations =
        cfg.iteration_override
            ? *cfg.iteration_override
            : static_cast<int>(std::ceil(
                  cfg.repeat_constant * inst.depth_bound() * inst.k() *
                  std::log2(std::max(2, inst.graph().vertex_count()))));
    RoundingTranscript transcript;
    transcript.seed = cfg.rng_seed;
    transcript.iterations = iterations;
    EdgeSetSolution best;
    VerificationReport report;
    for (int attempt = 0; attempt <= cfg.max_restarts; ++attempt) {
      std::vector<RoundIteration> rounds(iterations);
      parallel_for(static_cast<std::size_t>(iterations), cfg.threads,
                   [&](std::size_t iter) {
                     std::mt19937_64 rng(
                         derive_stream(cfg.rng_seed, attempt, iter));
                     rounds[iter].tree_edges = gkr_round(tree, x_hat, rng);
                     const auto mapped =
                         map_tree_edges_to_graph(rounds[iter].tree_edges, tree);
                     rounds[iter].graph_edges = mapped.edges;
                     rounds[iter].cost = solution_cost(mapped, inst.graph());
                   });
      std::vector<int> all;
      for (const auto& round : rounds)
        all.insert(all.end(), round.graph_edges.begin(),
                   round.graph_edges.end());
      best = EdgeSetSolution::from_ids(std::move(all));
      report = verify(best, inst);
      transcript.attempts = attempt + 1;
      if (report.feasible) {
        transcript.rounds = std::move(rounds);
        transcript.union_cost = report.cost;
        transcript.feasible = true;
        break;
      }
    }
    if (!transcript.feasible)
      throw RoundingError("rounding produced no feasible union after " +
                          std::to_string(transcript.attempts) + " attempts");
    if (!round_out.empty())
      write_file(round_out,
                 json{{"solution", to_json(best, inst.graph())},
                      {"report", to_json(report, inst.terminals())},
                      {"transcript", to_json(transcript)}}
                         .dump(2) +
                     "\n");
    emit_report(opt, {{"feasible", report.feasible},
                      {"cost", report.cost},
                      {"iterations", iterations},
                      {"restarts", transcript.restarts()}});
    return static_cast<int>(ExitCode::Ok);
  }

  if (verify_cmd->parsed()) {
    const KdstInstance inst =
        parse_instance(read_file(verify_instance), opt.policy());
    const EdgeSetSolution sol =
        solution_from_json(json::parse(read_file(verify_solution)));
    const VerificationReport report = verify(sol, inst);
    emit_report(opt, to_json(report, inst.terminals()));
    return report.feasible ? static_cast<int>(ExitCode::Ok)
                           : static_cast<int>(ExitCode::Infeasible);
  }

  if (exact_cmd->parsed()) {
    const KdstInstance inst =
        parse_instance(read_file(exact_instance), opt.policy());
    const auto solution =
        exact_opt(inst, ExactOptBudget{exact_max_edges, exact_nodes});
    if (!solution)
      throw ResourceCapError("exact_opt: node budget exhausted");
    if (!exact_out.empty())
      write_file(exact_out,
                 to_json(solution->solution, inst.graph()).dump(2) + "\n");
    emit_report(opt, {{"cost", solution->cost},
                      {"edges", solution->solution.edges.size()}});
    return static_cast<int>(ExitCode::Ok);
  }

  if (baseline_cmd->parsed()) {
    const KdstInstance inst =
        parse_instance(read_file(baseline_instance), opt.policy());
    const EdgeSetSolution sol = baseline_t_approx(inst);
    if (!baseline_out.empty())
      write_file(baseline_out, to_json(sol, inst.graph()).dump(2) + "\n");
    emit_report(opt, {{"cost", solution_cost(sol, inst.graph())},
                      {"edges", sol.edges.size()}});
    return static_cast<int>(ExitCode::Ok);
  }

  if (gen_cmd->parsed()) {
    json params;
    try {
      params = json::parse(gen_params);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad --params JSON: ") + e.what());
    }
    const KdstInstance inst = generate_instance(gen_name, params, opt.seed);
    const std::string text = serialize_instance(inst);
    if (gen_out.empty()) std::cout << text;
    else write_file(gen_out, text);
    return static_cast<int>(ExitCode::Ok);
  }

  if (exp_cmd->parsed()) {
    json spec_json;
    try {
      spec_json = json::parse(read_file(exp_spec));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad spec JSON: ") + e.what());
    }
    ExperimentSpec spec = spec_from_json(spec_json);
    if (!exp_output.empty()) spec.output_dir = exp_output;
    const auto rows = run_experiment_to_files(spec, opt.threads);
    if (spec.output_dir.empty()) std::cout << rows_to_csv(rows);
    else std::cout << summarize_csv(rows_to_csv(rows));
    return static_cast<int>(ExitCode::Ok);
  }

  if (report_cmd->parsed()) {
    const std::string csv = read_file(report_csv);
    if (report_summarize) std::cout << summarize_csv(csv);
    else std::cout << csv;
    return static_cast<int>(ExitCode::Ok);
  }

  return static_cast<int>(ExitCode::Config);
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const kdst::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(kdst::ExitCode::Failure);
  }
}
