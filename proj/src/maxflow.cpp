#include "coarsehom/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

namespace coarsehom {

FlowNetwork::FlowNetwork(int nodes, double epsilon)
    : epsilon_(epsilon), first_(nodes, -1), level_(nodes), cursor_(nodes) {}

int FlowNetwork::add_arc(int from, int to, double capacity, double reverse_capacity) {
  const int id = static_cast<int>(to_.size());
  for (auto [a, b, c] : {std::tuple{from, to, capacity}, std::tuple{to, from, reverse_capacity}}) {
    to_.push_back(b);
    cap_.push_back(c);
    residual_.push_back(c);
    next_.push_back(first_[a]);
    first_[a] = static_cast<int>(to_.size()) - 1;
  }
  return id;
}

double FlowNetwork::flow(int arc) const { return cap_[arc] - residual_[arc]; }

bool FlowNetwork::build_levels(int source, int sink) {
  std::fill(level_.begin(), level_.end(), -1);
  std::vector<int> queue{source};
  level_[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int v = queue[head];
    for (int e = first_[v]; e != -1; e = next_[e]) {
      if (residual_[e] > epsilon_ && level_[to_[e]] < 0) {
        level_[to_[e]] = level_[v] + 1;
        queue.push_back(to_[e]);
      }
    }
  }
  return level_[sink] >= 0;
}

double FlowNetwork::push(int v, int sink, double limit) {
  if (v == sink) return limit;
  for (int& e = cursor_[v]; e != -1; e = next_[e]) {
    const int w = to_[e];
    if (residual_[e] <= epsilon_ || level_[w] != level_[v] + 1) continue;
    const double pushed = push(w, sink, std::min(limit, residual_[e]));
    if (pushed > 0.0) {
      residual_[e] -= pushed;
      residual_[e ^ 1] += pushed;
      return pushed;
    }
  }
  return 0.0;
}

double FlowNetwork::max_flow(int source, int sink) {
  double total = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  while (build_levels(source, sink)) {
    cursor_ = first_;
    while (true) {
      const double pushed = push(source, sink, inf);
      if (pushed <= 0.0) break;
      total += pushed;
    }
  }
  return total;
}

std::vector<char> FlowNetwork::source_side(int source) const {
  std::vector<char> seen(first_.size(), 0);
  std::vector<int> stack{source};
  seen[source] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int e = first_[v]; e != -1; e = next_[e]) {
      if (residual_[e] > epsilon_ && !seen[to_[e]]) {
        seen[to_[e]] = 1;
        stack.push_back(to_[e]);
      }
    }
  }
  return seen;
}

}  // namespace coarsehom
