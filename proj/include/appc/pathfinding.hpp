#pragma once

#include <optional>
#include <vector>

#include "appc/grid_world.hpp"
#include "appc/types.hpp"
#include "appc/visibility.hpp"

namespace appc {

/// One agent's stored route. path[progress] is the agent's cell while the plan is current.
struct AgentPlan {
  Path path;
  std::size_t progress = 0;
  long replans = 0;

  void clear() {
    path.clear();
    progress = 0;
  }
};

/// Per-team planner state for one episode.
struct PlanState {
  std::vector<AgentPlan> agents;

  explicit PlanState(std::size_t n = 0) : agents(n) {}
  long replans() const {
    long total = 0;
    for (const auto& a : agents) total += a.replans;
    return total;
  }
};

inline CellMask occupancy(const GridMap& map, const Configuration& config) {
  CellMask occ(map);
  for (Cell c : config.attackers) occ.insert(c);
  for (Cell c : config.defenders) occ.insert(c);
  return occ;
}

namespace detail {

// Re-anchors the stored plan on the agent's current cell; drops it if the agent left the route.
inline void sync_plan(AgentPlan& plan, Cell current, Cell target) {
  if (plan.path.empty()) return;
  if (plan.path.back() != target) {
    plan.clear();
    return;
  }
  if (plan.path[plan.progress] == current) return;
  if (plan.progress + 1 < plan.path.size() && plan.path[plan.progress + 1] == current) {
    ++plan.progress;
    return;
  }
  plan.clear();
}

}  // namespace detail

/// Local-repair step: follow the stored shortest path, and when its next cell is occupied
/// replan around every occupied cell except the agent's own and the target. Returns the
/// agent's current cell to wait.
inline Cell lra_next_move(const GridMap& map, Cell current, Cell target, const CellMask& occupied, AgentPlan& plan) {
  if (current == target) {
    plan.clear();
    return current;
  }
  detail::sync_plan(plan, current, target);
  if (plan.path.empty()) {
    auto fresh = shortest_path(map, current, target);
    if (!fresh) return current;
    plan.path = std::move(*fresh);
    plan.progress = 0;
  }
  const Cell next = plan.path[plan.progress + 1];
  if (!occupied.contains(next)) return next;

  ++plan.replans;
  CellMask forbidden = occupied;
  forbidden.erase(current);
  forbidden.erase(target);
  auto detour = shortest_path(map, current, target, forbidden);
  if (!detour) return current;
  plan.path = std::move(*detour);
  plan.progress = 0;
  const Cell step = plan.path[1];
  // Only the target itself can still be occupied here.
  return occupied.contains(step) ? current : step;
}

/// Desired cell for every attacker (captured ones stay put). Opponents and teammates are
/// obstacles for replanning; the engine resolves intra-team conflicts.
inline std::vector<Cell> attacker_policy(const Instance& inst, const Configuration& config,
                                         const std::vector<bool>& captured, PlanState& state) {
  const CellMask occ = occupancy(inst.map, config);
  std::vector<Cell> desired = config.attackers;
  for (std::size_t i = 0; i < config.attackers.size(); ++i) {
    if (captured[i]) continue;
    desired[i] = lra_next_move(inst.map, config.attackers[i], inst.attacker_targets[i], occ, state.agents[i]);
  }
  return desired;
}

/// Desired cell for every defender without connectivity maintenance. Unassigned defenders hold.
inline std::vector<Cell> defender_policy(const Instance& inst, const Configuration& config,
                                         const std::vector<std::optional<Cell>>& targets, PlanState& state) {
  const CellMask occ = occupancy(inst.map, config);
  std::vector<Cell> desired = config.defenders;
  for (std::size_t i = 0; i < config.defenders.size(); ++i) {
    if (!targets[i]) continue;
    desired[i] = lra_next_move(inst.map, config.defenders[i], *targets[i], occ, state.agents[i]);
  }
  return desired;
}

namespace detail {

inline int components_with_move(const VisibilityGraph& g, std::vector<Cell>& defenders, std::size_t d, Cell to) {
  const Cell from = defenders[d];
  defenders[d] = to;
  const int n = count_components(g, defenders);
  defenders[d] = from;
  return n;
}

}  // namespace detail

/// Connectivity-guarded step for defender `d` against the committed configuration `config`.
/// A move is emitted only if the defender-occupied cells stay connected in G_r (more precisely,
/// the component count does not grow). Otherwise the route is recomputed with disconnecting
/// first steps excluded; if no first step is admissible the defender waits.
inline Cell defender_next_move_connected(const Instance& inst, const VisibilityGraph& g, const Configuration& config,
                                         std::size_t d, Cell target, AgentPlan& plan) {
  const GridMap& map = inst.map;
  const Cell current = config.defenders[d];
  if (current == target) {
    plan.clear();
    return current;
  }
  const CellMask occ = occupancy(map, config);
  std::vector<Cell> defenders = config.defenders;
  const int before = count_components(g, defenders);

  const Cell candidate = lra_next_move(map, current, target, occ, plan);
  if (candidate == current) return current;
  if (!occ.contains(candidate) && detail::components_with_move(g, defenders, d, candidate) <= before) return candidate;

  ++plan.replans;
  CellMask forbidden = occ;
  forbidden.erase(current);
  forbidden.erase(target);
  // Distances to the target around current occupants; the grid is undirected.
  const DistanceField to_target = bfs_distances(map, std::span<const Cell>(&target, 1), forbidden);
  std::optional<Cell> best;
  int best_dist = 0;
  for (const Cell& off : kNeighborOffsets) {
    const Cell n{current.x + off.x, current.y + off.y};
    if (!map.is_free(n) || occ.contains(n)) continue;
    const auto dist = to_target.at(n);
    if (!dist) continue;
    if (best && *dist >= best_dist) continue;
    if (detail::components_with_move(g, defenders, d, n) > before) continue;
    best = n;
    best_dist = *dist;
  }
  if (!best) return current;
  auto rest = shortest_path(map, *best, target, forbidden);
  if (!rest) return current;
  plan.path.assign(1, current);
  plan.path.insert(plan.path.end(), rest->begin(), rest->end());
  plan.progress = 0;
  return *best;
}

/// Sequential-commit defender step: defenders decide in index order and each sees the moves
/// already committed by lower indices. Returns the resulting defender cells.
inline std::vector<Cell> connected_defender_policy(const Instance& inst, const VisibilityGraph& g,
                                                   const Configuration& config,
                                                   const std::vector<std::optional<Cell>>& targets,
                                                   PlanState& state) {
  Configuration committed = config;
  for (std::size_t i = 0; i < committed.defenders.size(); ++i) {
    if (!targets[i]) continue;
    committed.defenders[i] = defender_next_move_connected(inst, g, committed, i, *targets[i], state.agents[i]);
  }
  return committed.defenders;
}

}  // namespace appc
