#include "sbpg/graph.hpp"

#include <algorithm>

#include "sbpg/error.hpp"

namespace sbpg {

ProcessGraph::ProcessGraph(std::vector<NodeId> actuators, std::vector<NodeId> states,
                           std::vector<Edge> edges, std::vector<NodeId> global_states)
    : actuators_(std::move(actuators)),
      states_(std::move(states)),
      edges_(std::move(edges)),
      global_states_(global_states.begin(), global_states.end()) {
  validate();
}

bool ProcessGraph::is_actuator(std::string_view node) const {
  return std::find(actuators_.begin(), actuators_.end(), node) != actuators_.end();
}

bool ProcessGraph::is_state(std::string_view node) const {
  return std::find(states_.begin(), states_.end(), node) != states_.end();
}

std::size_t ProcessGraph::player_index(std::string_view player) const {
  auto it = std::find(actuators_.begin(), actuators_.end(), player);
  if (it == actuators_.end()) {
    throw GraphError("unknown player '" + std::string(player) + "'");
  }
  return static_cast<std::size_t>(it - actuators_.begin());
}

NeighborStates ProcessGraph::neighbor_states(std::string_view player) const {
  player_index(player);
  NeighborStates out;
  for (const auto& e : edges_) {
    if (e.to == player) out.prior.insert(e.from);
    if (e.from == player) out.next.insert(e.to);
  }
  return out;
}

void ProcessGraph::validate() const {
  std::set<NodeId> seen;
  for (const auto& n : actuators_) {
    if (!seen.insert(n).second) throw GraphError("duplicate node '" + n + "'");
  }
  for (const auto& n : states_) {
    if (!seen.insert(n).second) throw GraphError("duplicate node '" + n + "'");
  }
  for (const auto& e : edges_) {
    const bool from_act = is_actuator(e.from);
    const bool to_act = is_actuator(e.to);
    if (!from_act && !is_state(e.from)) throw GraphError("edge from unknown node '" + e.from + "'");
    if (!to_act && !is_state(e.to)) throw GraphError("edge to unknown node '" + e.to + "'");
    if (from_act == to_act) {
      throw GraphError("edge " + e.from + " -> " + e.to +
                       (from_act ? " connects two actuators" : " connects two states"));
    }
  }
  for (const auto& a : actuators_) {
    const bool connected = std::any_of(edges_.begin(), edges_.end(),
                                       [&](const Edge& e) { return e.from == a || e.to == a; });
    if (!connected) throw GraphError("player '" + a + "' has no neighbouring state");
  }
  for (const auto& g : global_states_) {
    if (!is_state(g)) throw GraphError("global state '" + g + "' is not a state node");
  }
}

}  // namespace sbpg
