#pragma once

#include <vector>

namespace coarsehom {

/// Dinic max-flow on real capacities. Arcs come in pairs (arc, arc ^ 1), so
/// an undirected edge of capacity C is one pair with both sides set to C.
class FlowNetwork {
 public:
  explicit FlowNetwork(int nodes, double epsilon = 1e-12);

  int node_count() const noexcept { return static_cast<int>(first_.size()); }

  /// Returns the id of the forward arc.
  int add_arc(int from, int to, double capacity, double reverse_capacity = 0.0);

  double max_flow(int source, int sink);

  /// Net flow pushed along the forward arc (negative if it went backwards
  /// on an undirected pair).
  double flow(int arc) const;
  double capacity(int arc) const { return cap_[arc]; }
  int head(int arc) const { return to_[arc]; }

  /// Nodes reachable from `source` through arcs with residual > epsilon:
  /// the inclusion-minimal source side of a minimum cut.
  std::vector<char> source_side(int source) const;

 private:
  bool build_levels(int source, int sink);
  double push(int v, int sink, double limit);

  double epsilon_;
  std::vector<int> first_;
  std::vector<int> next_;
  std::vector<int> to_;
  std::vector<double> cap_;
  std::vector<double> residual_;
  std::vector<int> level_;
  std::vector<int> cursor_;
};

}  // namespace coarsehom
