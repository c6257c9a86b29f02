#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "kdst/errors.hpp"
#include "kdst/graph.hpp"
#include "kdst/lp.hpp"
#include "kdst/path_space.hpp"

namespace kdst {

// LP-k-DST / LP-k-DST* over an enumerated path space. Variables:
//   x_e   in [0,1]  per graph edge, objective c_e
//   f^i_p >= 0      per terminal i and rooted path p ending at t_i
//   y_p   in [0,1]  per nonempty path (strengthened variant only)
// Constraints (Q restricted to Q_D throughout):
//   (C1) sum_{p in Q_D(t_i): e in p} f^i_p <= x_e
//   (C2) sum_{p in Q_D(t_i)} f^i_p >= k
//   (C3) sum_{p in Q_D(t_i): q prefix of p} f^i_p <= y_q      [star]
//   (C4) sum_{p in Q_l(e)} y_p <= max(1, k^(l-2)) * x_e       [star]
// Rows whose left side is empty are vacuous under nonnegativity and are
// omitted. y is capped at 1 so the tree embedding needs no clamping; the
// integral witness only ever uses y in {0,1}, so the relaxation stays valid.
struct KdstLp {
  lp::LinearProgram lp;
  std::vector<int> x_var;               // per graph edge
  std::vector<std::vector<int>> groups; // terminal -> path ids (Q_D(t_i))
  std::vector<std::vector<int>> f_var;  // terminal -> var per group position
  std::vector<int> y_var;               // per path id; -1 when absent
  bool strengthened = false;
};

namespace detail {

inline KdstLp build_kdst_lp(const KdstInstance& inst, const PathSpace& paths,
                            bool strengthened) {
  KdstLp model;
  model.strengthened = strengthened;
  const DirectedGraph& g = inst.graph();
  const int h = inst.terminal_count();
  const int path_count = paths.size();

  model.x_var.resize(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e)
    model.x_var[e] = model.lp.add_variable(g.edge(e).cost, 0.0, 1.0,
                                           {lp::VarTag::Kind::X, e, -1});

  model.groups.reserve(h);
  model.f_var.resize(h);
  for (int i = 0; i < h; ++i) {
    const int t = inst.terminals()[i];
    const auto& group = paths.by_end_vertex[t];
    if (group.empty())
      throw InfeasibleError("terminal " + std::to_string(t) +
                            " unreachable within " +
                            std::to_string(inst.depth_bound()) + " hops");
    model.groups.push_back(group);
    model.f_var[i].reserve(group.size());
    for (int p : group)
      model.f_var[i].push_back(model.lp.add_variable(
          0.0, 0.0, lp::kInfinity, {lp::VarTag::Kind::F, i, p}));
  }

  if (strengthened) {
    model.y_var.assign(path_count, -1);
    for (int p = 1; p < path_count; ++p)
      model.y_var[p] =
          model.lp.add_variable(0.0, 0.0, 1.0, {lp::VarTag::Kind::Y, p, -1});
  }

  // (C1): bucket per (edge, terminal).
  std::vector<std::vector<std::pair<int, double>>> flow_on_edge(
      static_cast<std::size_t>(g.edge_count()) * h);
  for (int i = 0; i < h; ++i) {
    for (std::size_t gi = 0; gi < model.groups[i].size(); ++gi) {
      const int fv = model.f_var[i][gi];
      for (int v = model.groups[i][gi]; v != 0; v = paths.parent[v])
        flow_on_edge[static_cast<std::size_t>(paths.last_edge[v]) * h + i]
            .push_back({fv, 1.0});
    }
  }
  for (int e = 0; e < g.edge_count(); ++e)
    for (int i = 0; i < h; ++i) {
      auto& bucket = flow_on_edge[static_cast<std::size_t>(e) * h + i];
      if (bucket.empty()) continue;
      bucket.push_back({model.x_var[e], -1.0});
      model.lp.add_constraint(std::move(bucket), lp::Relation::LessEq, 0.0);
    }

  // (C2)
  for (int i = 0; i < h; ++i) {
    std::vector<std::pair<int, double>> row;
    row.reserve(model.f_var[i].size());
    for (int fv : model.f_var[i]) row.push_back({fv, 1.0});
    model.lp.add_constraint(std::move(row), lp::Relation::GreaterEq,
                            static_cast<double>(inst.k()));
  }

  if (!strengthened) return model;

  // (C3): bucket per (prefix path q, terminal); prefixes include q == p.
  std::vector<std::vector<std::pair<int, double>>> flow_below(
      static_cast<std::size_t>(path_count) * h);
  for (int i = 0; i < h; ++i) {
    for (std::size_t gi = 0; gi < model.groups[i].size(); ++gi) {
      const int fv = model.f_var[i][gi];
      for (int q = model.groups[i][gi]; q != 0; q = paths.parent[q])
        flow_below[static_cast<std::size_t>(q) * h + i].push_back({fv, 1.0});
    }
  }
  for (int q = 1; q < path_count; ++q)
    for (int i = 0; i < h; ++i) {
      auto& bucket = flow_below[static_cast<std::size_t>(q) * h + i];
      if (bucket.empty()) continue;
      bucket.push_back({model.y_var[q], -1.0});
      model.lp.add_constraint(std::move(bucket), lp::Relation::LessEq, 0.0);
    }

  // (C4): by_end_edge lists are ordered by path id, and ids are assigned by
  // BFS length, so the depth-<=l prefix of each list is contiguous.
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& enders = paths.by_end_edge[e];
    for (int len = 1; len <= inst.depth_bound(); ++len) {
      std::vector<std::pair<int, double>> row;
      for (int p : enders) {
        if (paths.depth[p] > len) break;
        row.push_back({model.y_var[p], 1.0});
      }
      if (row.empty()) continue;
      const double cap = std::max(1.0, std::pow(static_cast<double>(inst.k()),
                                                static_cast<double>(len - 2)));
      row.push_back({model.x_var[e], -cap});
      model.lp.add_constraint(std::move(row), lp::Relation::LessEq, 0.0);
    }
  }
  return model;
}

} // namespace detail

inline KdstLp build_lp_kdst(const KdstInstance& inst, const PathSpace& paths) {
  return detail::build_kdst_lp(inst, paths, false);
}

inline KdstLp build_lp_kdst_star(const KdstInstance& inst,
                                 const PathSpace& paths) {
  return detail::build_kdst_lp(inst, paths, true);
}

// LP-GST on the suffix tree. Root-to-node paths are unique on a tree, so one
// flow variable per group node suffices.
struct GstLp {
  lp::LinearProgram lp;
  std::vector<int> xhat_var;               // per tree edge (child node id)
  std::vector<std::vector<int>> fhat_var;  // terminal -> var per group position
};

inline GstLp build_lp_gst(const GstTree& tree) {
  GstLp model;
  const int nodes = tree.node_count();
  const int h = static_cast<int>(tree.groups.size());

  model.xhat_var.assign(nodes, -1);
  for (int v = 1; v < nodes; ++v)
    model.xhat_var[v] = model.lp.add_variable(tree.edge_cost[v], 0.0, 1.0,
                                              {lp::VarTag::Kind::XHat, v, -1});
  model.fhat_var.resize(h);
  for (int i = 0; i < h; ++i)
    for (int v : tree.groups[i])
      model.fhat_var[i].push_back(model.lp.add_variable(
          0.0, 0.0, lp::kInfinity, {lp::VarTag::Kind::FHat, i, v}));

  // Capacity: group flow below-or-at a tree edge is capped by that edge.
  std::vector<std::vector<std::pair<int, double>>> below(
      static_cast<std::size_t>(nodes) * h);
  for (int i = 0; i < h; ++i)
    for (std::size_t gi = 0; gi < tree.groups[i].size(); ++gi)
      for (int a = tree.groups[i][gi]; a != 0; a = tree.paths.parent[a])
        below[static_cast<std::size_t>(a) * h + i].push_back(
            {model.fhat_var[i][gi], 1.0});
  for (int v = 1; v < nodes; ++v)
    for (int i = 0; i < h; ++i) {
      auto& bucket = below[static_cast<std::size_t>(v) * h + i];
      if (bucket.empty()) continue;
      bucket.push_back({model.xhat_var[v], -1.0});
      model.lp.add_constraint(std::move(bucket), lp::Relation::LessEq, 0.0);
    }
  for (int i = 0; i < h; ++i) {
    std::vector<std::pair<int, double>> row;
    for (int fv : model.fhat_var[i]) row.push_back({fv, 1.0});
    model.lp.add_constraint(std::move(row), lp::Relation::GreaterEq, 1.0);
  }
  return model;
}

// (x,f,y) -> (xhat, fhat): tree edge {p, p+e} takes y_{p+e}, group node p
// takes f^i_p. With y capped at 1 the clamp below is vacuous; it only guards
// against solver-level tolerance spill.
inline lp::LpSolution embed_solution(const KdstLp& star,
                                     const lp::LpSolution& star_solution,
                                     const GstTree& tree, const GstLp& gst) {
  if (star_solution.status != lp::SolveStatus::Optimal)
    throw ValidationError("embed_solution requires an optimal LP solution");
  if (!star.strengthened)
    throw ValidationError("embed_solution requires the strengthened LP (y variables)");

  lp::LpSolution out;
  out.status = lp::SolveStatus::Optimal;
  out.values.assign(gst.lp.variable_count(), 0.0);
  for (int v = 1; v < tree.node_count(); ++v) {
    const double y = star_solution.values[star.y_var[v]];
    out.values[gst.xhat_var[v]] = std::clamp(y, 0.0, 1.0);
  }
  for (std::size_t i = 0; i < tree.groups.size(); ++i)
    for (std::size_t gi = 0; gi < tree.groups[i].size(); ++gi)
      out.values[gst.fhat_var[i][gi]] =
          star_solution.values[star.f_var[i][gi]];
  out.objective_value = gst.lp.objective_value(out.values);
  return out;
}

// F-restriction of an embedded solution (Lemma 6 test helper): tree edges
// originating in F lose their capacity, flows on paths touching F vanish.
inline lp::LpSolution restrict_solution(const lp::LpSolution& embedded,
                                        const GstTree& tree, const GstLp& gst,
                                        const std::vector<int>& banned_edges) {
  auto banned = [&](int graph_edge) {
    return std::find(banned_edges.begin(), banned_edges.end(), graph_edge) !=
           banned_edges.end();
  };
  lp::LpSolution out = embedded;
  std::vector<char> tainted(tree.node_count(), 0);
  for (int v = 1; v < tree.node_count(); ++v) {
    tainted[v] = tainted[tree.paths.parent[v]] || banned(tree.origin_edge(v));
    if (banned(tree.origin_edge(v))) out.values[gst.xhat_var[v]] = 0.0;
  }
  for (std::size_t i = 0; i < tree.groups.size(); ++i)
    for (std::size_t gi = 0; gi < tree.groups[i].size(); ++gi)
      if (tainted[tree.groups[i][gi]]) out.values[gst.fhat_var[i][gi]] = 0.0;
  out.objective_value = gst.lp.objective_value(out.values);
  return out;
}

// Per-terminal surviving group flow of a restricted solution.
inline std::vector<double> group_flow(const lp::LpSolution& solution,
                                      const GstLp& gst) {
  std::vector<double> sums(gst.fhat_var.size(), 0.0);
  for (std::size_t i = 0; i < gst.fhat_var.size(); ++i)
    for (int fv : gst.fhat_var[i]) sums[i] += solution.values[fv];
  return sums;
}

// 0/1 witness of an integral solution H: x = 1 on E(H), y = 1 on rooted
// paths inside H, f^i = 1 on group paths inside H. For a minimal shallow
// solution this point must satisfy every LP-k-DST* constraint.
inline std::vector<double> integral_witness(const EdgeSetSolution& solution,
                                            const KdstLp& model,
                                            const PathSpace& paths) {
  std::vector<double> values(model.lp.variable_count(), 0.0);
  for (int e : solution.edges) values[model.x_var[e]] = 1.0;
  std::vector<char> inside(paths.size(), 0);
  inside[0] = 1;
  for (int v = 1; v < paths.size(); ++v)
    inside[v] = inside[paths.parent[v]] && solution.contains(paths.last_edge[v]);
  if (!model.y_var.empty())
    for (int v = 1; v < paths.size(); ++v)
      if (inside[v]) values[model.y_var[v]] = 1.0;
  for (std::size_t i = 0; i < model.groups.size(); ++i)
    for (std::size_t gi = 0; gi < model.groups[i].size(); ++gi)
      if (inside[model.groups[i][gi]]) values[model.f_var[i][gi]] = 1.0;
  return values;
}

} // namespace kdst
