#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kdst/errors.hpp"

namespace kdst {

struct Edge {
  int tail = 0;
  int head = 0;
  double cost = 0.0;
};

inline bool operator==(const Edge& a, const Edge& b) {
  return a.tail == b.tail && a.head == b.head && a.cost == b.cost;
}

// Simple directed graph with nonnegative edge costs. Edges are stored sorted
// by (tail, head), so edge ids are canonical for a given edge set and
// out-neighbour lists come out ordered by head vertex for free.
class DirectedGraph {
public:
  DirectedGraph() = default;

  DirectedGraph(int vertex_count, std::vector<Edge> edges)
      : n_(vertex_count), edges_(std::move(edges)) {
    if (n_ <= 0) throw ValidationError("graph needs a positive vertex count");
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      return std::pair(a.tail, a.head) < std::pair(b.tail, b.head);
    });
    out_.assign(n_, {});
    in_.assign(n_, {});
    for (int id = 0; id < static_cast<int>(edges_.size()); ++id) {
      const Edge& e = edges_[id];
      if (e.tail < 0 || e.tail >= n_ || e.head < 0 || e.head >= n_)
        throw ValidationError("edge endpoint out of range: " + describe(e));
      if (e.tail == e.head)
        throw ValidationError("self-loop not allowed: " + describe(e));
      if (!(e.cost >= 0.0) || !std::isfinite(e.cost))
        throw ValidationError("edge cost must be finite and nonnegative: " +
                              describe(e));
      if (id > 0 && edges_[id - 1].tail == e.tail &&
          edges_[id - 1].head == e.head)
        throw ValidationError("parallel edges not allowed: " + describe(e));
      out_[e.tail].push_back(id);
      in_[e.head].push_back(id);
    }
  }

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const Edge& edge(int id) const { return edges_[id]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& out_edges(int v) const { return out_[v]; }
  const std::vector<int>& in_edges(int v) const { return in_[v]; }

  std::optional<int> find_edge(int tail, int head) const {
    for (int id : out_[tail])
      if (edges_[id].head == head) return id;
    return std::nullopt;
  }

  DirectedGraph reversed() const {
    std::vector<Edge> rev;
    rev.reserve(edges_.size());
    for (const Edge& e : edges_) rev.push_back({e.head, e.tail, e.cost});
    return DirectedGraph(n_, std::move(rev));
  }

  bool operator==(const DirectedGraph& other) const {
    return n_ == other.n_ && edges_ == other.edges_;
  }

private:
  static std::string describe(const Edge& e) {
    return "(" + std::to_string(e.tail) + " -> " + std::to_string(e.head) + ")";
  }

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

// A subgraph given as a set of edge ids of some parent graph.
struct EdgeSetSolution {
  std::vector<int> edges; // sorted, unique

  static EdgeSetSolution from_ids(std::vector<int> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return EdgeSetSolution{std::move(ids)};
  }
  bool contains(int id) const {
    return std::binary_search(edges.begin(), edges.end(), id);
  }
  std::size_t size() const { return edges.size(); }
};

inline double solution_cost(const EdgeSetSolution& sol,
                            const DirectedGraph& graph) {
  double total = 0.0;
  for (int id : sol.edges) {
    if (id < 0 || id >= graph.edge_count())
      throw ValidationError("solution references unknown edge id " +
                            std::to_string(id));
    total += graph.edge(id).cost;
  }
  return total;
}

enum class ParallelEdgePolicy {
  Reject,          // default: the instance must already be simple
  CollapseCheapest, // keep the cheapest copy of each (tail, head) pair
  SplitWithMidpoint, // subdivide extra copies with a zero-cost midpoint
};

struct NormalizationStats {
  int dropped_root_in_edges = 0;
  int collapsed_parallel = 0;
  int split_parallel = 0;
  int warnings() const {
    return dropped_root_in_edges + collapsed_parallel + split_parallel;
  }
};

// A rooted connectivity instance: find a min-cost subgraph with k
// edge-disjoint root->terminal paths for every terminal, where the depth
// bound D caps the usable path length.
class KdstInstance {
public:
  KdstInstance(DirectedGraph graph, int root, std::vector<int> terminals,
               int k, int depth_bound, std::vector<int> source_edges = {},
               NormalizationStats stats = {})
      : graph_(std::move(graph)),
        root_(root),
        terminals_(std::move(terminals)),
        k_(k),
        depth_bound_(depth_bound),
        source_edges_(std::move(source_edges)),
        stats_(stats) {
    if (k_ < 1) throw ValidationError("k must be at least 1");
    if (depth_bound_ < 1) throw ValidationError("depth bound D must be at least 1");
    if (root_ < 0 || root_ >= graph_.vertex_count())
      throw ValidationError("root vertex out of range");
    if (terminals_.empty()) throw ValidationError("at least one terminal required");
    std::vector<int> seen(graph_.vertex_count(), 0);
    for (int t : terminals_) {
      if (t < 0 || t >= graph_.vertex_count())
        throw ValidationError("terminal out of range: " + std::to_string(t));
      if (t == root_)
        throw ValidationError("root listed as terminal: " + std::to_string(t));
      if (seen[t]++)
        throw ValidationError("duplicate terminal: " + std::to_string(t));
    }
    if (!graph_.in_edges(root_).empty())
      throw ValidationError("root must have no incoming edges after normalization");
    if (source_edges_.empty()) {
      source_edges_.resize(graph_.edge_count());
      for (int i = 0; i < graph_.edge_count(); ++i) source_edges_[i] = i;
    }
  }

  const DirectedGraph& graph() const { return graph_; }
  int root() const { return root_; }
  const std::vector<int>& terminals() const { return terminals_; }
  int terminal_count() const { return static_cast<int>(terminals_.size()); }
  int k() const { return k_; }
  int depth_bound() const { return depth_bound_; }
  // Instance edge id -> index into the caller-supplied edge list.
  const std::vector<int>& source_edges() const { return source_edges_; }
  const NormalizationStats& normalization() const { return stats_; }

  bool operator==(const KdstInstance& other) const {
    return graph_ == other.graph_ && root_ == other.root_ &&
           terminals_ == other.terminals_ && k_ == other.k_ &&
           depth_bound_ == other.depth_bound_;
  }

private:
  DirectedGraph graph_;
  int root_;
  std::vector<int> terminals_;
  int k_;
  int depth_bound_;
  std::vector<int> source_edges_;
  NormalizationStats stats_;
};

// Builds an instance from raw parts, applying normalization:
//  - edges entering the root are dropped (counted as warnings),
//  - parallel edges handled per policy (reject / collapse / split).
// source_edges() of the result maps instance edges back to positions in the
// `edges` argument; a split edge maps both halves to the original position.
inline KdstInstance make_instance(int vertex_count, std::vector<Edge> edges,
                                  int root, std::vector<int> terminals, int k,
                                  int depth_bound,
                                  ParallelEdgePolicy policy =
                                      ParallelEdgePolicy::Reject) {
  NormalizationStats stats;
  if (root < 0 || root >= vertex_count)
    throw ValidationError("root vertex out of range");

  struct Raw {
    Edge e;
    int source;
  };
  std::vector<Raw> kept;
  kept.reserve(edges.size());
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
    if (edges[i].head == root) {
      ++stats.dropped_root_in_edges;
      continue;
    }
    kept.push_back({edges[i], i});
  }

  // Group parallel copies; `kept` keeps input order within a group.
  std::vector<Raw> result;
  std::vector<char> done(kept.size(), 0);
  int extra_vertices = 0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (done[i]) continue;
    std::vector<std::size_t> group{i};
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      if (!done[j] && kept[j].e.tail == kept[i].e.tail &&
          kept[j].e.head == kept[i].e.head)
        group.push_back(j);
    }
    for (std::size_t g : group) done[g] = 1;
    if (group.size() == 1) {
      result.push_back(kept[i]);
      continue;
    }
    switch (policy) {
      case ParallelEdgePolicy::Reject:
        throw ValidationError(
            "parallel edges (" + std::to_string(kept[i].e.tail) + " -> " +
            std::to_string(kept[i].e.head) +
            ") rejected; rerun with the split-parallel option to keep them");
      case ParallelEdgePolicy::CollapseCheapest: {
        std::size_t best = group[0];
        for (std::size_t g : group)
          if (kept[g].e.cost < kept[best].e.cost) best = g;
        result.push_back(kept[best]);
        stats.collapsed_parallel += static_cast<int>(group.size()) - 1;
        break;
      }
      case ParallelEdgePolicy::SplitWithMidpoint: {
        result.push_back(kept[group[0]]);
        for (std::size_t gi = 1; gi < group.size(); ++gi) {
          const Raw& r = kept[group[gi]];
          const int mid = vertex_count + extra_vertices++;
          result.push_back({{r.e.tail, mid, r.e.cost}, r.source});
          result.push_back({{mid, r.e.head, 0.0}, r.source});
          ++stats.split_parallel;
        }
        break;
      }
    }
  }

  // Canonical (tail, head) order; carry the source mapping along.
  std::sort(result.begin(), result.end(), [](const Raw& a, const Raw& b) {
    return std::pair(a.e.tail, a.e.head) < std::pair(b.e.tail, b.e.head);
  });
  std::vector<Edge> final_edges;
  std::vector<int> source_map;
  final_edges.reserve(result.size());
  source_map.reserve(result.size());
  for (const Raw& r : result) {
    final_edges.push_back(r.e);
    source_map.push_back(r.source);
  }
  DirectedGraph graph(vertex_count + extra_vertices, std::move(final_edges));
  return KdstInstance(std::move(graph), root, std::move(terminals), k,
                      depth_bound, std::move(source_map), stats);
}

// ---------------------------------------------------------------------------
// Instance file format (line oriented, '#' starts a comment line):
//   kdst 1
//   n <vertex_count> r <root> k <k> D <depth_bound>
//   T <t1> <t2> ... <th>
//   e <tail> <head> <cost>
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline long parse_int(const std::string& tok, const char* what) {
  std::size_t pos = 0;
  long value = 0;
  try {
    value = std::stol(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(std::string("expected integer for ") + what + ", got '" +
                     tok + "'");
  }
  if (pos != tok.size())
    throw ParseError(std::string("trailing characters after ") + what +
                     ": '" + tok + "'");
  return value;
}

inline double parse_number(const std::string& tok, const char* what) {
  std::size_t pos = 0;
  double value = 0;
  try {
    value = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(std::string("expected number for ") + what + ", got '" +
                     tok + "'");
  }
  if (pos != tok.size())
    throw ParseError(std::string("trailing characters after ") + what +
                     ": '" + tok + "'");
  return value;
}

inline std::string format_cost(double c) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", c);
  return buf;
}

} // namespace detail

inline KdstInstance parse_instance(const std::string& text,
                                   ParallelEdgePolicy policy =
                                       ParallelEdgePolicy::Reject) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> lines;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    lines.push_back(detail::tokenize(line));
  }
  if (lines.size() < 3) throw ParseError("instance file truncated");

  if (lines[0].size() != 2 || lines[0][0] != "kdst" || lines[0][1] != "1")
    throw ParseError("bad magic: expected 'kdst 1'");

  const auto& hdr = lines[1];
  if (hdr.size() != 8 || hdr[0] != "n" || hdr[2] != "r" || hdr[4] != "k" ||
      hdr[6] != "D")
    throw ParseError("bad header: expected 'n <count> r <root> k <k> D <depth>'");
  const int n = static_cast<int>(detail::parse_int(hdr[1], "vertex count"));
  const int root = static_cast<int>(detail::parse_int(hdr[3], "root"));
  const int k = static_cast<int>(detail::parse_int(hdr[5], "k"));
  const int depth = static_cast<int>(detail::parse_int(hdr[7], "D"));
  if (k < 1) throw ValidationError("k must be at least 1");
  if (depth < 1) throw ValidationError("depth bound D must be at least 1");

  const auto& tline = lines[2];
  if (tline.empty() || tline[0] != "T")
    throw ParseError("expected terminal line 'T <ids...>'");
  std::vector<int> terminals;
  for (std::size_t i = 1; i < tline.size(); ++i)
    terminals.push_back(static_cast<int>(detail::parse_int(tline[i], "terminal")));

  std::vector<Edge> edges;
  for (std::size_t li = 3; li < lines.size(); ++li) {
    const auto& toks = lines[li];
    if (toks[0] != "e" || toks.size() != 4)
      throw ParseError("expected edge line 'e <tail> <head> <cost>'");
    Edge e;
    e.tail = static_cast<int>(detail::parse_int(toks[1], "edge tail"));
    e.head = static_cast<int>(detail::parse_int(toks[2], "edge head"));
    e.cost = detail::parse_number(toks[3], "edge cost");
    if (e.cost < 0)
      throw ValidationError("negative edge cost on (" + toks[1] + " -> " +
                            toks[2] + ")");
    edges.push_back(e);
  }
  return make_instance(n, std::move(edges), root, std::move(terminals), k,
                       depth, policy);
}

inline std::string serialize_instance(const KdstInstance& inst) {
  std::ostringstream out;
  out << "kdst 1\n";
  out << "n " << inst.graph().vertex_count() << " r " << inst.root() << " k "
      << inst.k() << " D " << inst.depth_bound() << "\n";
  out << "T";
  for (int t : inst.terminals()) out << " " << t;
  out << "\n";
  for (const Edge& e : inst.graph().edges())
    out << "e " << e.tail << " " << e.head << " " << detail::format_cost(e.cost)
        << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Classification and metric completion
// ---------------------------------------------------------------------------

// Strict layering: every edge must go from layer i to layer i+1, the root
// sits in layer 0 and no layer index exceeds D. Edges force the layer
// difference, so each weakly-connected component is determined up to a shift;
// the root pins its own component and other components are shifted to start
// at layer 0. Used for reporting only.
inline std::optional<std::vector<int>> layered_dag_layers(
    const KdstInstance& inst) {
  const DirectedGraph& g = inst.graph();
  const int n = g.vertex_count();
  constexpr int kUnset = std::numeric_limits<int>::min();
  std::vector<int> layer(n, kUnset);
  std::vector<int> component;

  auto propagate = [&](int start, int start_layer) -> bool {
    component.clear();
    layer[start] = start_layer;
    component.push_back(start);
    std::queue<int> queue;
    queue.push(start);
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop();
      auto relax = [&](int v, int want) -> bool {
        if (layer[v] == kUnset) {
          layer[v] = want;
          component.push_back(v);
          queue.push(v);
          return true;
        }
        return layer[v] == want;
      };
      for (int id : g.out_edges(u))
        if (!relax(g.edge(id).head, layer[u] + 1)) return false;
      for (int id : g.in_edges(u))
        if (!relax(g.edge(id).tail, layer[u] - 1)) return false;
    }
    return true;
  };

  if (!propagate(inst.root(), 0)) return std::nullopt;
  for (int v : component)
    if (layer[v] < 0) return std::nullopt; // root must be the earliest layer
  for (int v = 0; v < n; ++v) {
    if (layer[v] != kUnset) continue;
    if (!propagate(v, 0)) return std::nullopt;
    int lo = std::numeric_limits<int>::max();
    for (int u : component) lo = std::min(lo, layer[u]);
    for (int u : component) layer[u] -= lo;
  }
  for (int v = 0; v < n; ++v)
    if (layer[v] > inst.depth_bound()) return std::nullopt;
  return layer;
}

// Complete digraph whose arc costs are shortest-path costs of the input;
// unreachable pairs are omitted. Idempotent, and the result satisfies the
// triangle inequality.
inline DirectedGraph metric_completion(const DirectedGraph& g) {
  const int n = g.vertex_count();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<Edge> completed;
  std::vector<double> dist(n);
  using Item = std::pair<double, int>;
  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), kInf);
    dist[s] = 0.0;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0.0, s});
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[u]) continue;
      for (int id : g.out_edges(u)) {
        const Edge& e = g.edge(id);
        const double nd = d + e.cost;
        if (nd < dist[e.head]) {
          dist[e.head] = nd;
          heap.push({nd, e.head});
        }
      }
    }
    for (int v = 0; v < n; ++v)
      if (v != s && dist[v] < kInf) completed.push_back({s, v, dist[v]});
  }
  return DirectedGraph(n, std::move(completed));
}

} // namespace kdst
