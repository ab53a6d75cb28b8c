#pragma once

#include <algorithm>
#include <limits>
#include <vector>

namespace appc {

/// Dinic's algorithm on a small integer-capacity network.
class FlowNetwork {
 public:
  static constexpr int kInfinite = std::numeric_limits<int>::max() / 4;

  explicit FlowNetwork(int nodes) : out_(static_cast<std::size_t>(nodes)) {}

  int node_count() const { return static_cast<int>(out_.size()); }

  void add_edge(int from, int to, int capacity) {
    out_[from].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({to, capacity});
    out_[to].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({from, 0});
  }

  /// Pushes flow until saturated or `limit` is reached; returns the flow value.
  int max_flow(int source, int sink, int limit = kInfinite) {
    int total = 0;
    while (total < limit && build_levels(source, sink)) {
      cursor_.assign(out_.size(), 0);
      while (total < limit) {
        const int pushed = augment(source, sink, limit - total);
        if (pushed == 0) break;
        total += pushed;
      }
    }
    return total;
  }

  /// Nodes reachable from `source` in the residual network (the source side of a min cut).
  std::vector<bool> residual_reachable(int source) const {
    std::vector<bool> seen(out_.size(), false);
    std::vector<int> stack{source};
    seen[source] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int e : out_[v]) {
        const Edge& edge = edges_[e];
        if (edge.capacity > 0 && !seen[edge.to]) {
          seen[edge.to] = true;
          stack.push_back(edge.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Edge {
    int to;
    int capacity;  // residual
  };

  bool build_levels(int source, int sink) {
    level_.assign(out_.size(), -1);
    std::vector<int> queue{source};
    level_[source] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int v = queue[head];
      for (int e : out_[v]) {
        const Edge& edge = edges_[e];
        if (edge.capacity > 0 && level_[edge.to] < 0) {
          level_[edge.to] = level_[v] + 1;
          queue.push_back(edge.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  int augment(int v, int sink, int pushed) {
    if (v == sink) return pushed;
    for (std::size_t& i = cursor_[v]; i < out_[v].size(); ++i) {
      const int e = out_[v][i];
      Edge& edge = edges_[e];
      if (edge.capacity <= 0 || level_[edge.to] != level_[v] + 1) continue;
      const int got = augment(edge.to, sink, std::min(pushed, edge.capacity));
      if (got > 0) {
        edge.capacity -= got;
        edges_[e ^ 1].capacity += got;
        return got;
      }
    }
    return 0;
  }

  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_;
  std::vector<int> level_;
  std::vector<std::size_t> cursor_;
};

}  // namespace appc
