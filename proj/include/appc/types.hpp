#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "appc/grid_world.hpp"

namespace appc {

enum class Team : std::uint8_t { Attacker, Defender };

inline char team_letter(Team t) { return t == Team::Attacker ? 'A' : 'D'; }

struct AgentId {
  Team team = Team::Attacker;
  int index = 0;

  friend constexpr auto operator<=>(const AgentId&, const AgentId&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const AgentId& a) { return os << team_letter(a.team) << a.index; }

/// Placement of every agent at one time step (alpha_t).
struct Configuration {
  std::vector<Cell> attackers;
  std::vector<Cell> defenders;

  const std::vector<Cell>& team(Team t) const { return t == Team::Attacker ? attackers : defenders; }
  std::vector<Cell>& team(Team t) { return t == Team::Attacker ? attackers : defenders; }

  Cell at(AgentId a) const { return team(a.team).at(static_cast<std::size_t>(a.index)); }
  Cell& at(AgentId a) { return team(a.team).at(static_cast<std::size_t>(a.index)); }

  int agent_count() const { return static_cast<int>(attackers.size() + defenders.size()); }

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// A problem instance: map, starts, attacker targets and the run parameters.
struct Instance {
  GridMap map;
  int visibility_range = 4;
  Configuration start;
  std::vector<Cell> attacker_targets;  // attacker i aims at attacker_targets[i]
  int step_limit = 150;
  double communicator_ratio = 0.0;
  int sim_draws = 1;

  int attacker_count() const { return static_cast<int>(start.attackers.size()); }
  int defender_count() const { return static_cast<int>(start.defenders.size()); }
};

/// Thrown for malformed instances, configs and strategy ids.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checks the Instance invariants; throws ConfigError naming the first violation.
inline void validate_instance(const Instance& inst) {
  const GridMap& map = inst.map;
  if (inst.attacker_targets.size() != inst.start.attackers.size())
    throw ConfigError("instance: attacker and target counts differ");
  if (inst.visibility_range < 1) throw ConfigError("instance: visibility range must be >= 1");
  if (inst.step_limit < 0) throw ConfigError("instance: step limit must be >= 0");
  if (!(inst.communicator_ratio >= 0.0 && inst.communicator_ratio < 1.0))
    throw ConfigError("instance: communicator_ratio must lie in [0, 1)");
  if (inst.sim_draws < 1) throw ConfigError("instance: sim_draws must be >= 1");
  CellMask seen(map);
  auto check_agent = [&](Cell c, const char* what) {
    if (!map.is_free(c)) throw ConfigError(std::string("instance: ") + what + " start is not a free cell");
    if (seen.contains(c)) throw ConfigError(std::string("instance: two agents share a start cell"));
    seen.insert(c);
  };
  for (Cell c : inst.start.attackers) check_agent(c, "attacker");
  for (Cell c : inst.start.defenders) check_agent(c, "defender");
  CellMask targets(map);
  for (Cell c : inst.attacker_targets) {
    if (!map.is_free(c)) throw ConfigError("instance: target is not a free cell");
    if (targets.contains(c)) throw ConfigError("instance: two attackers share a target");
    targets.insert(c);
  }
}

}  // namespace appc
