#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kdst/errors.hpp"
#include "kdst/serialization.hpp"
#include "kdst/util.hpp"
#include "kdst/verify.hpp"

namespace kdst {

struct ExperimentSpec {
  std::string generator;
  json params = json::object();
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> algorithms; // kdst | dst | subgraph | baseline | exact
  RoundingConfig rounding;
  PathEnumerationOptions path_options;
  ExactOptBudget exact_budget;
  std::string output_dir; // empty: no per-run JSON transcripts
};

inline ExperimentSpec spec_from_json(const json& j) {
  ExperimentSpec spec;
  if (!j.contains("generator") || !j["generator"].is_string())
    throw ConfigError("experiment spec needs a 'generator' name");
  spec.generator = j["generator"].get<std::string>();
  if (spec.generator != "diamond" && spec.generator != "path" &&
      spec.generator != "layered-dag")
    throw ConfigError("unknown generator '" + spec.generator + "'");
  if (j.contains("params")) spec.params = j["params"];
  if (!j.contains("seeds") || !j["seeds"].is_array() || j["seeds"].empty())
    throw ConfigError("experiment spec needs a nonempty 'seeds' array");
  spec.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  if (!j.contains("algorithms") || !j["algorithms"].is_array() ||
      j["algorithms"].empty())
    throw ConfigError("experiment spec needs a nonempty 'algorithms' array");
  spec.algorithms = j["algorithms"].get<std::vector<std::string>>();
  for (const std::string& a : spec.algorithms)
    if (a != "kdst" && a != "dst" && a != "subgraph" && a != "baseline" &&
        a != "exact")
      throw ConfigError("unknown algorithm '" + a + "'");
  if (j.contains("rounding")) {
    const json& r = j["rounding"];
    if (r.contains("repeat_constant"))
      spec.rounding.repeat_constant = r["repeat_constant"].get<double>();
    if (r.contains("max_restarts"))
      spec.rounding.max_restarts = r["max_restarts"].get<int>();
    if (r.contains("iterations"))
      spec.rounding.iteration_override = r["iterations"].get<int>();
  }
  if (j.contains("path_cap"))
    spec.path_options.max_paths = j["path_cap"].get<std::int64_t>();
  if (j.contains("output")) spec.output_dir = j["output"].get<std::string>();
  return spec;
}

struct ExperimentRow {
  std::uint64_t seed = 0;
  std::string algorithm;
  int n = 0, h = 0, k = 0, depth = 0;
  std::optional<int> path_count;
  std::optional<double> lp_value;
  std::optional<double> algorithm_cost;
  std::optional<double> baseline_cost;
  std::optional<double> exact_cost;
  std::optional<double> ratio_alg_lp;
  std::optional<double> ratio_alg_opt;
  std::optional<double> ratio_baseline_opt;
  std::optional<int> iterations;
  std::optional<int> restarts;
  std::optional<bool> feasible;
  std::string error;
  double wall_ms = 0.0;
  json transcript; // null unless the algorithm produced one
};

namespace detail {

inline double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

// Everything shared by the rows of one instance seed.
struct InstanceContext {
  std::optional<KdstInstance> instance;
  std::optional<int> path_count;
  std::optional<double> lp_value;
  std::optional<double> baseline_cost;
  std::optional<EdgeSetSolution> baseline;
  std::optional<double> exact_cost;
  double baseline_ms = 0.0;
  double exact_ms = 0.0;
  std::string error;       // fatal for every row of this seed
  std::string exact_error; // only the exact row is affected
};

inline InstanceContext build_context(const ExperimentSpec& spec,
                                     std::uint64_t seed, bool want_exact) {
  InstanceContext ctx;
  try {
    ctx.instance = generate_instance(spec.generator, spec.params, seed);
    const PathSpace paths = enumerate_paths(*ctx.instance, spec.path_options);
    ctx.path_count = paths.size();
    const KdstLp star = build_lp_kdst_star(*ctx.instance, paths);
    const lp::LpSolution sol = simplex::solve(star.lp);
    if (sol.status == lp::SolveStatus::Optimal) ctx.lp_value = sol.objective_value;
  } catch (const Error& e) {
    ctx.error = e.what();
    return ctx;
  }
  try {
    const auto start = std::chrono::steady_clock::now();
    ctx.baseline = baseline_t_approx(*ctx.instance);
    ctx.baseline_ms = ms_since(start);
    ctx.baseline_cost = solution_cost(*ctx.baseline, ctx.instance->graph());
  } catch (const Error& e) {
    ctx.error = e.what(); // baseline fails only on infeasible instances
    return ctx;
  }
  if (want_exact) {
    try {
      const auto start = std::chrono::steady_clock::now();
      const auto exact = exact_opt(*ctx.instance, ExactOptBudget{}, ctx.baseline);
      ctx.exact_ms = ms_since(start);
      if (exact) ctx.exact_cost = exact->cost;
      else ctx.exact_error = "exact_opt budget exhausted";
    } catch (const Error& e) {
      ctx.exact_error = e.what();
    }
  }
  return ctx;
}

inline ExperimentRow make_row(const ExperimentSpec& spec, std::uint64_t seed,
                              const std::string& algorithm,
                              const InstanceContext& ctx) {
  ExperimentRow row;
  row.seed = seed;
  row.algorithm = algorithm;
  if (ctx.instance) {
    row.n = ctx.instance->graph().vertex_count();
    row.h = ctx.instance->terminal_count();
    row.k = ctx.instance->k();
    row.depth = ctx.instance->depth_bound();
  }
  row.path_count = ctx.path_count;
  row.lp_value = ctx.lp_value;
  row.baseline_cost = ctx.baseline_cost;
  row.exact_cost = ctx.exact_cost;
  if (!ctx.error.empty()) {
    row.error = ctx.error;
    return row;
  }

  RoundingConfig rounding = spec.rounding;
  rounding.rng_seed = seed;
  const KdstInstance& inst = *ctx.instance;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (algorithm == "kdst" || algorithm == "dst") {
      const PipelineResult result =
          algorithm == "kdst"
              ? run_algorithm_kdst(inst, rounding, spec.path_options)
              : run_algorithm_dst(inst, rounding, spec.path_options);
      row.algorithm_cost = result.report.cost;
      row.iterations = result.transcript.iterations;
      row.restarts = result.transcript.restarts();
      row.feasible = result.report.feasible;
      row.transcript = to_json(result, inst);
    } else if (algorithm == "subgraph") {
      std::vector<int> terminals{inst.root()};
      terminals.insert(terminals.end(), inst.terminals().begin(),
                       inst.terminals().end());
      const SteinerSubgraphResult result = run_steiner_subgraph(
          inst.graph(), terminals, inst.k(), inst.depth_bound(), rounding,
          spec.path_options);
      row.algorithm_cost = result.cost;
      row.feasible = result.feasible;
      row.iterations = result.outward.transcript.iterations;
      row.restarts =
          result.outward.transcript.restarts() + result.inward.transcript.restarts();
      row.transcript = {{"solution", to_json(result.solution, inst.graph())},
                        {"outward", to_json(result.outward, inst)},
                        {"feasible", result.feasible}};
    } else if (algorithm == "baseline") {
      row.algorithm_cost = ctx.baseline_cost;
      row.feasible = ctx.baseline_cost.has_value();
      row.wall_ms = ctx.baseline_ms;
    } else if (algorithm == "exact") {
      row.algorithm_cost = ctx.exact_cost;
      row.feasible = ctx.exact_cost.has_value();
      row.error = ctx.exact_error;
      row.wall_ms = ctx.exact_ms;
    }
  } catch (const Error& e) {
    row.error = e.what();
  }
  if (algorithm != "baseline" && algorithm != "exact")
    row.wall_ms = ms_since(start);

  if (row.algorithm_cost && row.lp_value && *row.lp_value > 0.0)
    row.ratio_alg_lp = *row.algorithm_cost / *row.lp_value;
  if (row.algorithm_cost && row.exact_cost && *row.exact_cost > 0.0)
    row.ratio_alg_opt = *row.algorithm_cost / *row.exact_cost;
  if (row.baseline_cost && row.exact_cost && *row.exact_cost > 0.0)
    row.ratio_baseline_opt = *row.baseline_cost / *row.exact_cost;
  return row;
}

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace detail

// One row per (seed, algorithm). Individual failures land in the row's error
// column; the batch always completes. Wall-clock time sits in the last column
// and is the only nondeterministic output.
inline std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec,
                                                 int threads = 1) {
  const bool want_exact =
      std::find(spec.algorithms.begin(), spec.algorithms.end(), "exact") !=
      spec.algorithms.end();
  std::vector<std::vector<ExperimentRow>> per_seed(spec.seeds.size());
  parallel_for(spec.seeds.size(), threads, [&](std::size_t si) {
    const std::uint64_t seed = spec.seeds[si];
    const detail::InstanceContext ctx =
        detail::build_context(spec, seed, want_exact);
    for (const std::string& algorithm : spec.algorithms)
      per_seed[si].push_back(detail::make_row(spec, seed, algorithm, ctx));
  });
  std::vector<ExperimentRow> rows;
  for (auto& group : per_seed)
    for (auto& row : group) rows.push_back(std::move(row));
  return rows;
}

inline const char* kCsvHeader =
    "seed,algorithm,n,h,k,D,paths,lp_value,alg_cost,baseline_cost,exact_cost,"
    "ratio_alg_lp,ratio_alg_opt,ratio_baseline_opt,iterations,restarts,"
    "feasible,error,wall_ms";

inline std::string rows_to_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  auto opt_num = [](const std::optional<double>& v) {
    return v ? detail::csv_number(*v) : std::string();
  };
  auto opt_int = [](const std::optional<int>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  for (const ExperimentRow& r : rows) {
    std::string error = r.error;
    std::replace(error.begin(), error.end(), ',', ';');
    out << r.seed << ',' << r.algorithm << ',' << r.n << ',' << r.h << ','
        << r.k << ',' << r.depth << ',' << opt_int(r.path_count) << ','
        << opt_num(r.lp_value) << ',' << opt_num(r.algorithm_cost) << ','
        << opt_num(r.baseline_cost) << ',' << opt_num(r.exact_cost) << ','
        << opt_num(r.ratio_alg_lp) << ',' << opt_num(r.ratio_alg_opt) << ','
        << opt_num(r.ratio_baseline_opt) << ',' << opt_int(r.iterations) << ','
        << opt_int(r.restarts) << ','
        << (r.feasible ? (*r.feasible ? "1" : "0") : "") << ',' << error << ','
        << detail::csv_number(r.wall_ms) << "\n";
  }
  return out.str();
}

// Writes the aggregate CSV (and per-run JSON transcripts when the spec names
// an output directory). Returns the rows.
inline std::vector<ExperimentRow> run_experiment_to_files(
    const ExperimentSpec& spec, int threads = 1) {
  auto rows = run_experiment(spec, threads);
  if (!spec.output_dir.empty()) {
    std::filesystem::create_directories(spec.output_dir);
    {
      std::ofstream csv(spec.output_dir + "/results.csv");
      if (!csv) throw ConfigError("cannot write to output directory '" +
                                  spec.output_dir + "'");
      csv << rows_to_csv(rows);
    }
    for (const ExperimentRow& row : rows) {
      if (row.transcript.is_null()) continue;
      std::ofstream out(spec.output_dir + "/run_" + std::to_string(row.seed) +
                        "_" + row.algorithm + ".json");
      out << row.transcript.dump(2) << "\n";
    }
  }
  return rows;
}

// Plain-text roll-up of a results CSV, one line per algorithm.
inline std::string summarize_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw ParseError("summarize: unrecognized CSV header");

  struct Agg {
    int rows = 0, feasible = 0, errors = 0;
    double lp_ratio_sum = 0.0;
    int lp_ratio_n = 0;
    double opt_ratio_sum = 0.0;
    int opt_ratio_n = 0;
    double wall_sum = 0.0;
  };
  std::map<std::string, Agg> by_algorithm;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    fields.resize(19);
    Agg& agg = by_algorithm[fields[1]];
    agg.rows += 1;
    if (fields[16] == "1") agg.feasible += 1;
    if (!fields[17].empty()) agg.errors += 1;
    if (!fields[11].empty()) {
      agg.lp_ratio_sum += std::stod(fields[11]);
      agg.lp_ratio_n += 1;
    }
    if (!fields[12].empty()) {
      agg.opt_ratio_sum += std::stod(fields[12]);
      agg.opt_ratio_n += 1;
    }
    if (!fields[18].empty()) agg.wall_sum += std::stod(fields[18]);
  }

  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-10s %6s %9s %7s %12s %13s %10s\n",
                "algorithm", "rows", "feasible", "errors", "mean(c/LP)",
                "mean(c/OPT)", "wall_ms");
  out << buf;
  for (const auto& [name, agg] : by_algorithm) {
    auto mean = [](double sum, int n) {
      return n > 0 ? sum / n : std::nan("");
    };
    std::snprintf(buf, sizeof(buf), "%-10s %6d %9d %7d %12.4f %13.4f %10.1f\n",
                  name.c_str(), agg.rows, agg.feasible, agg.errors,
                  mean(agg.lp_ratio_sum, agg.lp_ratio_n),
                  mean(agg.opt_ratio_sum, agg.opt_ratio_n), agg.wall_sum);
    out << buf;
  }
  return out.str();
}

} // namespace kdst
