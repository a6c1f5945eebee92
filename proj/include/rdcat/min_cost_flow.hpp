#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace rdcat {

// Successive-shortest-path min-cost flow with Dijkstra over reduced costs.
// Arc costs must be non-negative. Works for real-valued capacities: every
// augmentation saturates an arc or exhausts a supply/demand, so the number of
// rounds is bounded by the graph size. `Epsilon` absorbs rounding residue.
template <typename Value>
class MinCostFlow {
 public:
  struct Arc {
    std::size_t to;
    std::size_t reverse;
    Value capacity;
    Value cost;
  };

  explicit MinCostFlow(std::size_t nodes, Value epsilon = Value{1e-12})
      : graph_(nodes), potential_(nodes, Value{0}), epsilon_(epsilon) {}

  std::size_t add_arc(std::size_t from, std::size_t to, Value capacity, Value cost) {
    graph_[from].push_back({to, graph_[to].size(), capacity, cost});
    graph_[to].push_back({from, graph_[from].size() - 1, Value{0}, -cost});
    return graph_[from].size() - 1;
  }

  struct Result {
    Value flow{0};
    Value cost{0};
  };

  // Sends up to `limit` units from source to sink at minimum cost.
  Result solve(std::size_t source, std::size_t sink, Value limit) {
    Result result;
    const std::size_t n = graph_.size();
    constexpr Value kInf = std::numeric_limits<Value>::max();
    std::vector<Value> dist(n);
    std::vector<std::size_t> prev_node(n), prev_arc(n);

    while (limit - result.flow > epsilon_) {
      std::fill(dist.begin(), dist.end(), kInf);
      dist[source] = Value{0};
      using Item = std::pair<Value, std::size_t>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
      queue.push({Value{0}, source});
      while (!queue.empty()) {
        auto [d, u] = queue.top();
        queue.pop();
        if (d > dist[u]) continue;
        for (std::size_t i = 0; i < graph_[u].size(); ++i) {
          const Arc& arc = graph_[u][i];
          if (arc.capacity <= epsilon_) continue;
          // Reduced costs are non-negative up to rounding; clamp the residue.
          Value reduced = std::max(Value{0}, arc.cost + potential_[u] - potential_[arc.to]);
          Value candidate = d + reduced;
          if (candidate < dist[arc.to]) {
            dist[arc.to] = candidate;
            prev_node[arc.to] = u;
            prev_arc[arc.to] = i;
            queue.push({candidate, arc.to});
          }
        }
      }
      if (dist[sink] == kInf) break;
      for (std::size_t v = 0; v < n; ++v)
        if (dist[v] < kInf) potential_[v] += dist[v];

      Value push = limit - result.flow;
      for (std::size_t v = sink; v != source; v = prev_node[v])
        push = std::min(push, graph_[prev_node[v]][prev_arc[v]].capacity);
      for (std::size_t v = sink; v != source; v = prev_node[v]) {
        Arc& arc = graph_[prev_node[v]][prev_arc[v]];
        arc.capacity -= push;
        graph_[v][arc.reverse].capacity += push;
        result.cost += push * arc.cost;
      }
      result.flow += push;
    }
    return result;
  }

  const std::vector<Arc>& arcs(std::size_t node) const { return graph_[node]; }

 private:
  std::vector<std::vector<Arc>> graph_;
  std::vector<Value> potential_;
  Value epsilon_;
};

}  // namespace rdcat
