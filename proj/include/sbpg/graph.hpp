#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sbpg {

using NodeId = std::string;

struct Edge {
  NodeId from;
  NodeId to;
};

struct NeighborStates {
  std::set<NodeId> prior;
  std::set<NodeId> next;
};

/// Production chain as a bipartite graph of actuators (players) and state
/// nodes (reservoirs). Edges always connect an actuator to a state node.
class ProcessGraph {
 public:
  ProcessGraph() = default;
  ProcessGraph(std::vector<NodeId> actuators, std::vector<NodeId> states,
               std::vector<Edge> edges, std::vector<NodeId> global_states = {});

  const std::vector<NodeId>& actuators() const { return actuators_; }
  const std::vector<NodeId>& states() const { return states_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::set<NodeId>& global_states() const { return global_states_; }

  std::size_t player_count() const { return actuators_.size(); }
  std::size_t player_index(std::string_view player) const;
  bool is_actuator(std::string_view node) const;
  bool is_state(std::string_view node) const;

  /// Throws GraphError for an unknown player.
  NeighborStates neighbor_states(std::string_view player) const;

 private:
  void validate() const;

  std::vector<NodeId> actuators_;
  std::vector<NodeId> states_;
  std::vector<Edge> edges_;
  std::set<NodeId> global_states_;
};

}  // namespace sbpg
