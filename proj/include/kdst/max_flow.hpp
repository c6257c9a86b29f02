#pragma once

#include <limits>
#include <queue>
#include <vector>

namespace kdst {

// Dinic max-flow with integer capacities. Small and predictable; unit
// capacities are all this project needs (edge-disjoint path counting).
class DinicMaxFlow {
public:
  explicit DinicMaxFlow(int n) : n_(n), adj_(n) {}

  void add_edge(int from, int to, int capacity) {
    adj_[from].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({to, capacity});
    adj_[to].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({from, 0});
  }

  int max_flow(int source, int sink) {
    int total = 0;
    while (bfs(source, sink)) {
      iter_.assign(n_, 0);
      while (int pushed = dfs(source, sink, std::numeric_limits<int>::max()))
        total += pushed;
    }
    return total;
  }

private:
  struct Arc {
    int to;
    int capacity; // residual
  };

  bool bfs(int source, int sink) {
    level_.assign(n_, -1);
    std::queue<int> queue;
    level_[source] = 0;
    queue.push(source);
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop();
      for (int id : adj_[u]) {
        const Arc& a = arcs_[id];
        if (a.capacity > 0 && level_[a.to] == -1) {
          level_[a.to] = level_[u] + 1;
          queue.push(a.to);
        }
      }
    }
    return level_[sink] != -1;
  }

  int dfs(int u, int sink, int limit) {
    if (u == sink) return limit;
    for (int& i = iter_[u]; i < static_cast<int>(adj_[u].size()); ++i) {
      const int id = adj_[u][i];
      Arc& a = arcs_[id];
      if (a.capacity > 0 && level_[a.to] == level_[u] + 1) {
        const int pushed = dfs(a.to, sink, std::min(limit, a.capacity));
        if (pushed > 0) {
          a.capacity -= pushed;
          arcs_[id ^ 1].capacity += pushed;
          return pushed;
        }
      }
    }
    return 0;
  }

  int n_;
  std::vector<std::vector<int>> adj_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<int> iter_;
};

// Maximum number of edge-disjoint source->sink paths among the given arcs.
inline int max_flow_value(int vertex_count,
                          const std::vector<std::pair<int, int>>& arcs,
                          int source, int sink) {
  DinicMaxFlow flow(vertex_count);
  for (const auto& [u, v] : arcs) flow.add_edge(u, v, 1);
  return flow.max_flow(source, sink);
}

} // namespace kdst
