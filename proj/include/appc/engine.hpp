#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "appc/grid_world.hpp"
#include "appc/pathfinding.hpp"
#include "appc/strategies.hpp"
#include "appc/types.hpp"
#include "appc/visibility.hpp"

namespace appc {

// ---------------------------------------------------------------------------------------------
// Movement rules

struct Move {
  AgentId agent;
  Cell to;
};
using MoveBatch = std::vector<Move>;

enum class MoveRule : std::uint8_t {
  UnknownAgent,         // mover not present in the configuration
  InvalidStep,          // destination is neither the current cell nor a free 4-neighbor
  OccupiedDestination,  // entering a cell whose occupant stays
  SameDestination,      // two movers enter one cell
  Swap,                 // two movers exchange cells across an edge
};

inline const char* rule_name(MoveRule r) {
  switch (r) {
    case MoveRule::UnknownAgent: return "unknown-agent";
    case MoveRule::InvalidStep: return "invalid-step";
    case MoveRule::OccupiedDestination: return "occupied-destination";
    case MoveRule::SameDestination: return "same-destination";
    case MoveRule::Swap: return "swap";
  }
  return "?";
}

struct MoveViolation {
  MoveRule rule;
  std::vector<AgentId> agents;

  std::string describe() const {
    std::ostringstream os;
    os << rule_name(rule);
    for (const auto& a : agents) os << ' ' << a;
    return os.str();
  }
};

/// Checks one simultaneous batch against `current`. Agents not listed wait. Chains of movers
/// and rotations of three or more agents are legal. `map`, when given, also checks that each
/// destination is free.
inline std::optional<MoveViolation> validate_moves(const Configuration& current, const MoveBatch& moves,
                                                   const GridMap* map = nullptr) {
  std::map<Cell, AgentId> occupant;
  for (int i = 0; i < static_cast<int>(current.attackers.size()); ++i)
    occupant[current.attackers[i]] = {Team::Attacker, i};
  for (int i = 0; i < static_cast<int>(current.defenders.size()); ++i)
    occupant[current.defenders[i]] = {Team::Defender, i};

  std::map<AgentId, Cell> dest;
  for (const Move& m : moves) {
    const auto& team = current.team(m.agent.team);
    if (m.agent.index < 0 || m.agent.index >= static_cast<int>(team.size()))
      return MoveViolation{MoveRule::UnknownAgent, {m.agent}};
    const Cell from = current.at(m.agent);
    if (m.to == from) continue;
    if (manhattan(from, m.to) != 1 || (map && !map->is_free(m.to)))
      return MoveViolation{MoveRule::InvalidStep, {m.agent}};
    dest[m.agent] = m.to;
  }

  std::map<Cell, AgentId> entering;
  for (const auto& [agent, to] : dest) {
    auto [it, fresh] = entering.emplace(to, agent);
    if (!fresh) return MoveViolation{MoveRule::SameDestination, {it->second, agent}};
  }
  for (const auto& [agent, to] : dest) {
    auto occ = occupant.find(to);
    if (occ == occupant.end()) continue;
    auto other = dest.find(occ->second);
    if (other == dest.end()) return MoveViolation{MoveRule::OccupiedDestination, {agent, occ->second}};
    if (other->second == current.at(agent)) {
      if (agent < occ->second) return MoveViolation{MoveRule::Swap, {agent, occ->second}};
      return MoveViolation{MoveRule::Swap, {occ->second, agent}};
    }
  }
  return std::nullopt;
}

/// Desired cells for one team -> a legal batch. Invalid steps become waits; then, in agent-index
/// order, moves that clash with an already committed move or with a staying agent are downgraded
/// to waits until the batch is conflict-free.
inline std::vector<Cell> resolve_batch(const GridMap& map, const Configuration& config, Team team,
                                       std::vector<Cell> desired) {
  const auto& cur = config.team(team);
  const auto& others = config.team(team == Team::Attacker ? Team::Defender : Team::Attacker);
  const std::size_t n = cur.size();
  for (std::size_t i = 0; i < n; ++i)
    if (desired[i] != cur[i] && (manhattan(cur[i], desired[i]) != 1 || !map.is_free(desired[i]))) desired[i] = cur[i];

  bool changed = true;
  while (changed) {
    changed = false;
    std::map<Cell, std::size_t> leaving;
    for (std::size_t i = 0; i < n; ++i)
      if (desired[i] != cur[i]) leaving[cur[i]] = i;
    // Swaps: the higher index waits.
    for (std::size_t i = 0; i < n; ++i) {
      if (desired[i] == cur[i]) continue;
      auto it = leaving.find(desired[i]);
      if (it != leaving.end() && desired[it->second] == cur[i]) {
        desired[std::max(i, it->second)] = cur[std::max(i, it->second)];
        changed = true;
      }
    }
    if (changed) continue;
    constexpr std::size_t kStays = static_cast<std::size_t>(-1);
    std::map<Cell, std::size_t> claimed;
    for (const Cell& c : others) claimed[c] = kStays;
    for (std::size_t i = 0; i < n; ++i)
      if (desired[i] == cur[i]) claimed[cur[i]] = kStays;
    for (std::size_t i = 0; i < n; ++i) {
      if (desired[i] == cur[i]) continue;
      if (claimed.contains(desired[i])) {
        desired[i] = cur[i];
        changed = true;
      } else {
        claimed[desired[i]] = i;
      }
    }
  }
  return desired;
}

inline MoveBatch to_batch(Team team, const std::vector<Cell>& current, const std::vector<Cell>& desired) {
  MoveBatch batch;
  for (std::size_t i = 0; i < current.size(); ++i)
    if (desired[i] != current[i]) batch.push_back({{team, static_cast<int>(i)}, desired[i]});
  return batch;
}

/// One time step: the attacker batch is resolved and applied against alpha_t, then the defender
/// batch against the resulting configuration. Returns alpha_{t+1}.
inline Configuration step(const Instance& inst, const Configuration& config, const std::vector<Cell>& attacker_desired,
                          const std::vector<Cell>& defender_desired) {
  Configuration next = config;
  next.attackers = resolve_batch(inst.map, config, Team::Attacker, attacker_desired);
  next.defenders = resolve_batch(inst.map, next, Team::Defender, defender_desired);
  return next;
}

// ---------------------------------------------------------------------------------------------
// Episodes

struct Metrics {
  int targets_saved = 0;               // attackers never captured
  int targets_saved_within_limit = 0;  // attackers not captured by the objective horizon
  long sum_attacker_target_distance = 0;
  long time_at_captured_targets = 0;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct EpisodeResult {
  std::vector<Configuration> trace;              // alpha_0 .. alpha_end
  std::vector<std::optional<int>> capture_time;  // per attacker
  Allocation allocation;
  Metrics metrics;
  long attacker_replans = 0;
  long defender_replans = 0;

  int captured_count() const {
    return static_cast<int>(std::count_if(capture_time.begin(), capture_time.end(), [](const auto& t) { return t.has_value(); }));
  }
};

struct EpisodeOptions {
  SimulationOptions simulation;
  std::optional<int> objective_horizon;   // defaults to the instance step limit
  const VisibilityGraph* visibility = nullptr;  // reused when given; must match (map, r)
};

inline Metrics compute_metrics(const Instance& inst, const EpisodeResult& result, std::optional<int> horizon = {}) {
  const int limit = horizon.value_or(inst.step_limit);
  Metrics m;
  const int n = inst.attacker_count();
  int captured = 0, captured_in_horizon = 0;
  for (const auto& t : result.capture_time) {
    if (!t) continue;
    ++captured;
    if (*t <= limit) ++captured_in_horizon;
    m.time_at_captured_targets += inst.step_limit - *t;
  }
  m.targets_saved = n - captured;
  m.targets_saved_within_limit = n - captured_in_horizon;
  const Configuration& last = result.trace.empty() ? inst.start : result.trace.back();
  const int unreachable = inst.map.width() + inst.map.height();
  for (int i = 0; i < n; ++i) {
    const DistanceField d = bfs_distances(inst.map, last.attackers[i]);
    m.sum_attacker_target_distance += d.get_or(inst.attacker_targets[i], unreachable);
  }
  return m;
}

/// Runs the game loop for up to T steps. Stops early once every attacker is captured or when no
/// agent moved for two consecutive steps. Deterministic in (instance, strategy, seed).
inline EpisodeResult run_episode(const Instance& inst, StrategyId strategy, std::uint64_t seed,
                                 const EpisodeOptions& opt = {}) {
  std::optional<VisibilityGraph> own_graph;
  if (!opt.visibility) own_graph.emplace(inst.map, inst.visibility_range);
  const VisibilityGraph& g = opt.visibility ? *opt.visibility : *own_graph;

  SimulationOptions sim = opt.simulation;
  sim.draws = inst.sim_draws;

  EpisodeResult result;
  result.allocation = allocate(strategy, inst, g, derive_seed(seed, "allocation"), sim);
  const bool connected = uses_communicators(strategy);

  const auto n_att = static_cast<std::size_t>(inst.attacker_count());
  Configuration config = inst.start;
  result.trace.push_back(config);
  result.capture_time.assign(n_att, std::nullopt);
  std::vector<bool> captured(n_att, false);
  for (std::size_t i = 0; i < n_att; ++i)
    if (config.attackers[i] == inst.attacker_targets[i]) {
      captured[i] = true;
      result.capture_time[i] = 0;
    }

  PlanState attacker_plans(n_att);
  PlanState defender_plans(static_cast<std::size_t>(inst.defender_count()));
  int static_steps = 0;
  for (int t = 0; t < inst.step_limit; ++t) {
    if (std::all_of(captured.begin(), captured.end(), [](bool c) { return c; })) break;
    if (static_steps >= 2) break;

    Configuration next = config;
    next.attackers = resolve_batch(inst.map, config, Team::Attacker, attacker_policy(inst, config, captured, attacker_plans));
    for (std::size_t i = 0; i < n_att; ++i)
      if (!captured[i] && next.attackers[i] == inst.attacker_targets[i]) {
        captured[i] = true;
        result.capture_time[i] = t + 1;
      }
    const auto defender_desired =
        connected ? connected_defender_policy(inst, g, next, result.allocation.targets, defender_plans)
                  : defender_policy(inst, next, result.allocation.targets, defender_plans);
    next.defenders = resolve_batch(inst.map, next, Team::Defender, defender_desired);

    static_steps = next == config ? static_steps + 1 : 0;
    config = std::move(next);
    result.trace.push_back(config);
  }
  result.attacker_replans = attacker_plans.replans();
  result.defender_replans = defender_plans.replans();
  result.metrics = compute_metrics(inst, result, opt.objective_horizon);
  return result;
}

}  // namespace appc
