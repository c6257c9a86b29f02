#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "kdst/errors.hpp"
#include "kdst/graph.hpp"
#include "kdst/max_flow.hpp"
#include "kdst/util.hpp"

namespace kdst {

struct VerificationReport {
  std::vector<int> lambda; // per terminal, order of instance.terminals()
  bool feasible = false;
  double cost = 0.0;
  std::optional<double> lp_ratio;
  std::optional<double> opt_ratio;

  int min_lambda() const {
    int lo = std::numeric_limits<int>::max();
    for (int l : lambda) lo = std::min(lo, l);
    return lambda.empty() ? 0 : lo;
  }
};

inline int lambda_in_subgraph(const DirectedGraph& g,
                              const std::vector<int>& edge_ids, int source,
                              int sink) {
  std::vector<std::pair<int, int>> arcs;
  arcs.reserve(edge_ids.size());
  for (int id : edge_ids)
    arcs.push_back({g.edge(id).tail, g.edge(id).head});
  return max_flow_value(g.vertex_count(), arcs, source, sink);
}

// lambda(r, t_i) for every terminal, restricted to the solution edges.
inline VerificationReport verify(const EdgeSetSolution& sol,
                                 const KdstInstance& inst) {
  VerificationReport report;
  report.cost = solution_cost(sol, inst.graph());
  report.lambda.reserve(inst.terminals().size());
  bool ok = true;
  for (int t : inst.terminals()) {
    const int l = lambda_in_subgraph(inst.graph(), sol.edges, inst.root(), t);
    report.lambda.push_back(l);
    ok = ok && l >= inst.k();
  }
  report.feasible = ok;
  return report;
}

// Strips removable edges in a random order. Feasibility is monotone under
// taking supergraphs, so a single pass yields an inclusion-minimal solution.
inline EdgeSetSolution minimalize(const EdgeSetSolution& sol,
                                  const KdstInstance& inst,
                                  std::mt19937_64& rng) {
  if (!verify(sol, inst).feasible)
    throw InfeasibleError("minimalize: input solution is not feasible");
  std::vector<int> order = sol.edges;
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[uniform_below(rng, i)]);

  std::vector<int> kept = sol.edges;
  for (int candidate : order) {
    std::vector<int> without;
    without.reserve(kept.size() - 1);
    for (int id : kept)
      if (id != candidate) without.push_back(id);
    bool feasible = true;
    for (int t : inst.terminals()) {
      if (lambda_in_subgraph(inst.graph(), without, inst.root(), t) < inst.k()) {
        feasible = false;
        break;
      }
    }
    if (feasible) kept = std::move(without);
  }
  return EdgeSetSolution::from_ids(std::move(kept));
}

// ---------------------------------------------------------------------------
// Structural checks for minimal solutions:
//   - lambda(r,v) <= k for every vertex of H,
//   - indegree(v) == lambda(r,v),
//   - indegree(v) <= k,
//   - at most k^(l-2) rooted paths of length <= l end at any edge (l >= 2).
// ---------------------------------------------------------------------------

struct LemmaCheckReport {
  struct Violation {
    std::string lemma;
    std::string detail;
  };
  std::vector<Violation> violations;
  bool all_passed() const { return violations.empty(); }
};

namespace detail {

// Counts simple rooted paths in the subgraph ending at each edge, bucketed by
// exact length. cap guards against runaway enumeration on non-minimal input.
inline bool count_rooted_paths(const DirectedGraph& g,
                               const std::vector<int>& edge_ids, int root,
                               int max_len,
                               std::vector<std::vector<std::int64_t>>& counts,
                               std::int64_t cap = 2'000'000) {
  std::vector<std::vector<int>> out(g.vertex_count());
  for (int id : edge_ids) out[g.edge(id).tail].push_back(id);
  counts.assign(g.edge_count(), std::vector<std::int64_t>(max_len + 1, 0));
  std::vector<char> on_path(g.vertex_count(), 0);
  std::int64_t visited = 0;

  auto dfs = [&](auto&& self, int v, int len) -> bool {
    if (len == max_len) return true;
    for (int id : out[v]) {
      const int w = g.edge(id).head;
      if (on_path[w]) continue;
      if (++visited > cap) return false;
      counts[id][len + 1] += 1;
      on_path[w] = 1;
      if (!self(self, w, len + 1)) return false;
      on_path[w] = 0;
    }
    return true;
  };
  on_path[root] = 1;
  return dfs(dfs, root, 0);
}

} // namespace detail

inline LemmaCheckReport check_minimal_lemmas(const EdgeSetSolution& sol,
                                             const KdstInstance& inst) {
  LemmaCheckReport report;
  const DirectedGraph& g = inst.graph();
  const int k = inst.k();

  std::vector<char> in_solution(g.vertex_count(), 0);
  std::vector<int> indeg(g.vertex_count(), 0);
  for (int id : sol.edges) {
    in_solution[g.edge(id).tail] = 1;
    in_solution[g.edge(id).head] = 1;
    indeg[g.edge(id).head] += 1;
  }
  in_solution[inst.root()] = 1;

  for (int v = 0; v < g.vertex_count(); ++v) {
    if (!in_solution[v] || v == inst.root()) continue;
    const int lam = lambda_in_subgraph(g, sol.edges, inst.root(), v);
    if (lam > k)
      report.violations.push_back(
          {"lambda_at_most_k", "vertex " + std::to_string(v) + " has lambda " +
                                   std::to_string(lam) + " > k"});
    if (indeg[v] != lam)
      report.violations.push_back(
          {"indegree_equals_lambda",
           "vertex " + std::to_string(v) + " has indegree " +
               std::to_string(indeg[v]) + " but lambda " + std::to_string(lam)});
    if (indeg[v] > k)
      report.violations.push_back(
          {"indegree_at_most_k", "vertex " + std::to_string(v) +
                                     " has indegree " + std::to_string(indeg[v])});
  }

  std::vector<std::vector<std::int64_t>> counts;
  if (!detail::count_rooted_paths(g, sol.edges, inst.root(),
                                  inst.depth_bound(), counts)) {
    report.violations.push_back(
        {"path_count_bound", "rooted path enumeration exceeded its cap"});
    return report;
  }
  for (int id : sol.edges) {
    std::int64_t upto = 0;
    for (int len = 1; len <= inst.depth_bound(); ++len) {
      upto += counts[id][len];
      if (len < 2) continue;
      std::int64_t bound = 1;
      for (int i = 0; i < len - 2; ++i) bound *= k;
      if (upto > bound)
        report.violations.push_back(
            {"path_count_bound",
             "edge " + std::to_string(id) + " ends " + std::to_string(upto) +
                 " paths of length <= " + std::to_string(len) + " (bound " +
                 std::to_string(bound) + ")"});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Exact optimum by branch and bound over edge subsets
// ---------------------------------------------------------------------------

struct ExactOptBudget {
  int max_edges = 24;
  std::uint64_t max_nodes = 2'000'000;
};

struct ExactSolution {
  EdgeSetSolution solution;
  double cost = 0.0;
};

namespace detail {

struct BranchAndBound {
  const KdstInstance& inst;
  const std::vector<int> order; // edge ids, most expensive first
  std::uint64_t nodes_left;
  bool stop_on_feasible; // safe only when no zero-cost edge can extend a tie
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<int> best_set;
  bool exhausted = false;

  BranchAndBound(const KdstInstance& i, std::vector<int> ord, std::uint64_t budget)
      : inst(i), order(std::move(ord)), nodes_left(budget) {
    stop_on_feasible = true;
    for (const Edge& e : inst.graph().edges())
      if (e.cost <= 0.0) stop_on_feasible = false;
  }

  bool feasible(const std::vector<char>& excluded) const {
    std::vector<int> active;
    active.reserve(order.size());
    for (int id = 0; id < inst.graph().edge_count(); ++id)
      if (!excluded[id]) active.push_back(id);
    for (int t : inst.terminals())
      if (lambda_in_subgraph(inst.graph(), active, inst.root(), t) < inst.k())
        return false;
    return true;
  }

  bool feasible_included(const std::vector<int>& included) const {
    for (int t : inst.terminals())
      if (lambda_in_subgraph(inst.graph(), included, inst.root(), t) < inst.k())
        return false;
    return true;
  }

  void offer(const std::vector<int>& included, double cost) {
    std::vector<int> sorted = included;
    std::sort(sorted.begin(), sorted.end());
    if (cost < best_cost - 1e-9) {
      best_cost = cost;
      best_set = std::move(sorted);
    } else if (cost <= best_cost + 1e-9 &&
               std::lexicographical_compare(sorted.begin(), sorted.end(),
                                            best_set.begin(), best_set.end())) {
      best_set = std::move(sorted);
    }
  }

  // excluded is indexed by edge id; included holds the chosen ids so far.
  void recurse(std::size_t pos, double included_cost, std::vector<int>& included,
               std::vector<char>& excluded) {
    if (exhausted) return;
    if (nodes_left-- == 0) {
      exhausted = true;
      return;
    }
    if (included_cost > best_cost + 1e-9) return;
    if (feasible_included(included)) {
      offer(included, included_cost);
      // With strictly positive costs any extension costs more, so the
      // subtree is closed. Zero-cost edges could still produce equal-cost
      // lexicographically smaller sets, so keep exploring in that case.
      if (stop_on_feasible) return;
    }
    if (pos == order.size()) return;
    const int e = order[pos];

    excluded[e] = 1;
    if (feasible(excluded)) recurse(pos + 1, included_cost, included, excluded);
    excluded[e] = 0;

    included.push_back(e);
    recurse(pos + 1, included_cost + inst.graph().edge(e).cost, included,
            excluded);
    included.pop_back();
  }
};

} // namespace detail

// Minimum-cost feasible subgraph, or nullopt if the node budget ran out.
// Ties are broken toward the lexicographically smallest edge set. An optional
// warm-start upper bound (e.g. from the flow baseline) speeds up pruning
// without affecting the result.
inline std::optional<ExactSolution> exact_opt(
    const KdstInstance& inst, const ExactOptBudget& budget = {},
    const std::optional<EdgeSetSolution>& upper_bound = std::nullopt) {
  const DirectedGraph& g = inst.graph();
  if (g.edge_count() > budget.max_edges)
    throw ResourceCapError("exact_opt guard: instance has " +
                           std::to_string(g.edge_count()) + " edges (cap " +
                           std::to_string(budget.max_edges) + ")");

  std::vector<int> order(g.edge_count());
  for (int i = 0; i < g.edge_count(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (g.edge(a).cost != g.edge(b).cost) return g.edge(a).cost > g.edge(b).cost;
    return a < b;
  });

  detail::BranchAndBound bnb(inst, std::move(order), budget.max_nodes);
  std::vector<char> excluded(g.edge_count(), 0);
  if (!bnb.feasible(excluded))
    throw InfeasibleError("exact_opt: instance is infeasible (some terminal has "
                          "connectivity below k)");
  if (upper_bound) {
    bnb.best_cost = solution_cost(*upper_bound, g);
    bnb.best_set = upper_bound->edges;
  }
  std::vector<int> included;
  bnb.recurse(0, 0.0, included, excluded);
  if (bnb.exhausted) return std::nullopt;
  ExactSolution out;
  out.solution = EdgeSetSolution::from_ids(std::move(bnb.best_set));
  out.cost = solution_cost(out.solution, g);
  return out;
}

// ---------------------------------------------------------------------------
// Folklore |T|-approximation: union of per-terminal min-cost k-flows
// ---------------------------------------------------------------------------

namespace detail {

// Min-cost flow of value k from root to sink on unit capacities, by
// successive shortest augmenting paths with Dijkstra on reduced costs.
// Returns the edge ids carrying flow. Throws if the terminal cannot receive
// k units.
inline std::vector<int> min_cost_k_flow(const KdstInstance& inst, int sink) {
  const DirectedGraph& g = inst.graph();
  const int n = g.vertex_count();
  const int m = g.edge_count();
  const int root = inst.root();

  // Arc 2i = forward copy of edge i, arc 2i+1 = residual reverse.
  std::vector<int> capacity(2 * m), head(2 * m);
  std::vector<double> arc_cost(2 * m);
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < m; ++i) {
    const Edge& e = g.edge(i);
    capacity[2 * i] = 1;
    head[2 * i] = e.head;
    arc_cost[2 * i] = e.cost;
    adj[e.tail].push_back(2 * i);
    capacity[2 * i + 1] = 0;
    head[2 * i + 1] = e.tail;
    arc_cost[2 * i + 1] = -e.cost;
    adj[e.head].push_back(2 * i + 1);
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> potential(n, 0.0), dist(n);
  std::vector<int> reached_by(n);
  using Item = std::pair<double, int>;

  for (int round = 0; round < inst.k(); ++round) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(reached_by.begin(), reached_by.end(), -1);
    dist[root] = 0.0;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0.0, root});
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[u]) continue;
      for (int a : adj[u]) {
        if (capacity[a] <= 0) continue;
        const int v = head[a];
        const double nd = d + arc_cost[a] + potential[u] - potential[v];
        if (nd < dist[v] - 1e-15) {
          dist[v] = nd;
          reached_by[v] = a;
          heap.push({nd, v});
        }
      }
    }
    if (dist[sink] == kInf)
      throw InfeasibleError("terminal " + std::to_string(sink) +
                            " has connectivity below k in the input graph");
    for (int v = 0; v < n; ++v)
      potential[v] += std::min(dist[v], dist[sink]);
    for (int v = sink; v != root;) {
      const int a = reached_by[v];
      capacity[a] -= 1;
      capacity[a ^ 1] += 1;
      v = head[a ^ 1];
    }
  }

  std::vector<int> support;
  for (int i = 0; i < m; ++i)
    if (capacity[2 * i] == 0) support.push_back(i);
  return support;
}

} // namespace detail

// Min-cost k-flow to each terminal, returned as one union. Feasible by
// construction; costs at most |T| times the optimum.
inline EdgeSetSolution baseline_t_approx(const KdstInstance& inst) {
  std::vector<int> all;
  for (int t : inst.terminals()) {
    const auto support = detail::min_cost_k_flow(inst, t);
    all.insert(all.end(), support.begin(), support.end());
  }
  return EdgeSetSolution::from_ids(std::move(all));
}

// ---------------------------------------------------------------------------
// Optional exhaustive D-shallowness check (exponential; desk sizes only)
// ---------------------------------------------------------------------------

// True iff the solution contains, for every terminal, k pairwise
// edge-disjoint root->terminal paths of length <= D each. Exhaustive search
// over path combinations; guarded because length-bounded disjoint-path
// packing is intractable in general.
inline bool check_d_shallow(const EdgeSetSolution& sol, const KdstInstance& inst,
                            int max_solution_edges = 16) {
  const DirectedGraph& g = inst.graph();
  if (static_cast<int>(sol.edges.size()) > max_solution_edges)
    throw ResourceCapError("check_d_shallow guard: solution has " +
                           std::to_string(sol.edges.size()) + " edges (cap " +
                           std::to_string(max_solution_edges) + ")");

  std::vector<std::vector<int>> out(g.vertex_count());
  std::vector<int> slot(g.edge_count(), -1);
  for (std::size_t i = 0; i < sol.edges.size(); ++i) {
    slot[sol.edges[i]] = static_cast<int>(i);
    out[g.edge(sol.edges[i]).tail].push_back(sol.edges[i]);
  }

  for (int t : inst.terminals()) {
    // All simple root->t paths of length <= D, as edge bitmasks.
    std::vector<std::uint32_t> masks;
    std::vector<char> on_path(g.vertex_count(), 0);
    auto collect = [&](auto&& self, int v, int len, std::uint32_t mask) -> void {
      if (v == t) {
        masks.push_back(mask);
        return;
      }
      if (len == inst.depth_bound()) return;
      for (int id : out[v]) {
        const int w = g.edge(id).head;
        if (on_path[w]) continue;
        on_path[w] = 1;
        self(self, w, len + 1, mask | (1u << slot[id]));
        on_path[w] = 0;
      }
    };
    on_path[inst.root()] = 1;
    collect(collect, inst.root(), 0, 0);
    on_path[inst.root()] = 0;

    auto pick = [&](auto&& self, std::size_t from, std::uint32_t used,
                    int need) -> bool {
      if (need == 0) return true;
      for (std::size_t i = from; i < masks.size(); ++i)
        if ((masks[i] & used) == 0 && self(self, i + 1, used | masks[i], need - 1))
          return true;
      return false;
    };
    if (!pick(pick, 0, 0, inst.k())) return false;
  }
  return true;
}

} // namespace kdst
