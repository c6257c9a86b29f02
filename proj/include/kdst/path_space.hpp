#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "kdst/errors.hpp"
#include "kdst/graph.hpp"

namespace kdst {

struct PathEnumerationOptions {
  std::int64_t max_paths = 2'000'000;
};

// All simple rooted paths of length <= D, stored as a tree: path id 0 is the
// trivial path (r); every nonempty path p+e points at its parent p. Ids are
// assigned in BFS-by-length order with children ordered by (head vertex,
// edge id), so the numbering is canonical for a given instance.
struct PathSpace {
  int depth_bound = 0;
  int root = -1;
  std::vector<int> parent;     // parent[0] == -1
  std::vector<int> last_edge;  // last_edge[0] == -1
  std::vector<int> end_vertex;
  std::vector<int> depth;
  std::vector<std::vector<int>> by_end_vertex; // vertex -> path ids, ascending
  std::vector<std::vector<int>> by_end_edge;   // edge -> path ids, ascending

  int size() const { return static_cast<int>(parent.size()); }

  // Edge ids of path `p`, root first.
  std::vector<int> edge_ids(int p) const {
    std::vector<int> ids;
    for (int v = p; v != 0; v = parent[v]) ids.push_back(last_edge[v]);
    std::reverse(ids.begin(), ids.end());
    return ids;
  }

  std::vector<int> vertex_sequence(int p) const {
    std::vector<int> seq;
    for (int v = p; v != -1; v = parent[v]) seq.push_back(end_vertex[v]);
    std::reverse(seq.begin(), seq.end());
    return seq;
  }

  bool path_visits(int p, int vertex) const {
    for (int v = p; v != -1; v = parent[v])
      if (end_vertex[v] == vertex) return true;
    return false;
  }

  // |Q_l(e)|: paths of length <= l whose last edge is e.
  int count_ending_at_edge(int edge, int max_len) const {
    int count = 0;
    for (int p : by_end_edge[edge])
      if (depth[p] <= max_len) ++count;
    return count;
  }
};

inline PathSpace enumerate_paths(const KdstInstance& inst,
                                 const PathEnumerationOptions& opt = {}) {
  const DirectedGraph& g = inst.graph();
  PathSpace ps;
  ps.depth_bound = inst.depth_bound();
  ps.root = inst.root();
  ps.by_end_vertex.assign(g.vertex_count(), {});
  ps.by_end_edge.assign(g.edge_count(), {});

  ps.parent.push_back(-1);
  ps.last_edge.push_back(-1);
  ps.end_vertex.push_back(inst.root());
  ps.depth.push_back(0);
  ps.by_end_vertex[inst.root()].push_back(0);

  std::vector<int> frontier{0};
  for (int len = 1; len <= inst.depth_bound() && !frontier.empty(); ++len) {
    std::vector<int> next;
    for (int p : frontier) {
      const int v = ps.end_vertex[p];
      // out_edges(v) is ordered by head vertex already (canonical edge sort),
      // which is exactly the (head, edge id) child order we want.
      for (int id : g.out_edges(v)) {
        const int w = g.edge(id).head;
        if (ps.path_visits(p, w)) continue;
        if (ps.size() >= opt.max_paths)
          throw ResourceCapError(
              "path enumeration exceeded the cap of " +
              std::to_string(opt.max_paths) + " paths (reached " +
              std::to_string(ps.size() + 1) + " at length " +
              std::to_string(len) + ")");
        const int child = ps.size();
        ps.parent.push_back(p);
        ps.last_edge.push_back(id);
        ps.end_vertex.push_back(w);
        ps.depth.push_back(len);
        ps.by_end_vertex[w].push_back(child);
        ps.by_end_edge[id].push_back(child);
        next.push_back(child);
      }
    }
    frontier = std::move(next);
  }
  return ps;
}

// Suffix tree of the rooted path family: one node per path, an edge
// {p, p+e} of cost c_e per nonempty path, and one group per terminal holding
// the nodes whose path ends at that terminal. Tree edges are identified with
// their child node id (1..size-1).
struct GstTree {
  PathSpace paths;
  std::vector<std::vector<int>> children; // node -> child node ids, ascending
  std::vector<std::vector<int>> groups;   // terminal -> node ids, ascending
  std::vector<double> edge_cost;          // by child node id; [0] unused

  int node_count() const { return paths.size(); }
  int edge_count() const { return paths.size() - 1; }

  // Tree edges and nonroot nodes share ids; the parent edge of edge v is the
  // edge of v's parent node (0 means "no parent edge": depth-1 edge).
  int parent_edge(int v) const { return paths.parent[v]; }
  int origin_edge(int v) const { return paths.last_edge[v]; }

  double tree_path_cost(int v) const {
    double c = 0.0;
    for (int u = v; u != 0; u = paths.parent[u]) c += edge_cost[u];
    return c;
  }
};

inline GstTree build_gst_tree(PathSpace paths, const KdstInstance& inst) {
  GstTree tree;
  tree.paths = std::move(paths);
  const PathSpace& ps = tree.paths;
  tree.children.assign(ps.size(), {});
  tree.edge_cost.assign(ps.size(), 0.0);
  for (int v = 1; v < ps.size(); ++v) {
    tree.children[ps.parent[v]].push_back(v);
    tree.edge_cost[v] = inst.graph().edge(ps.last_edge[v]).cost;
  }
  tree.groups.reserve(inst.terminals().size());
  for (int t : inst.terminals()) {
    const auto& members = ps.by_end_vertex[t];
    if (members.empty())
      throw InfeasibleError("terminal " + std::to_string(t) +
                            " unreachable within " +
                            std::to_string(inst.depth_bound()) + " hops");
    tree.groups.push_back(members);
  }
  return tree;
}

// Distinct origin edges of a set of tree edges.
inline EdgeSetSolution map_tree_edges_to_graph(const std::vector<int>& tree_edges,
                                               const GstTree& tree) {
  std::vector<int> ids;
  ids.reserve(tree_edges.size());
  for (int v : tree_edges) ids.push_back(tree.origin_edge(v));
  return EdgeSetSolution::from_ids(std::move(ids));
}

inline std::string gst_tree_to_dot(const GstTree& tree) {
  std::ostringstream out;
  out << "digraph gst {\n";
  for (int v = 0; v < tree.node_count(); ++v) {
    out << "  n" << v << " [label=\"";
    const auto seq = tree.paths.vertex_sequence(v);
    for (std::size_t i = 0; i < seq.size(); ++i)
      out << (i ? "," : "") << seq[i];
    out << "\"];\n";
  }
  for (int v = 1; v < tree.node_count(); ++v)
    out << "  n" << tree.paths.parent[v] << " -> n" << v << " [label=\""
        << detail::format_cost(tree.edge_cost[v]) << "\"];\n";
  for (std::size_t i = 0; i < tree.groups.size(); ++i) {
    out << "  // group " << i << ":";
    for (int v : tree.groups[i]) out << " n" << v;
    out << "\n";
  }
  out << "}\n";
  return out.str();
}

} // namespace kdst
