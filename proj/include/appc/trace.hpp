#pragma once

#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "appc/engine.hpp"
#include "appc/grid_world.hpp"
#include "appc/types.hpp"
#include "appc/visibility.hpp"

namespace appc {

// Trace format: one line per time step, comma-separated "team:index:x:y" records with
// team 'A' or 'D'; attackers first, each team in index order.

inline std::string format_configuration(const Configuration& config) {
  std::string line;
  auto emit = [&](char team, const std::vector<Cell>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!line.empty()) line.push_back(',');
      line += team;
      line += ':' + std::to_string(i) + ':' + std::to_string(cells[i].x) + ':' + std::to_string(cells[i].y);
    }
  };
  emit('A', config.attackers);
  emit('D', config.defenders);
  return line;
}

inline std::string format_trace(const std::vector<Configuration>& trace) {
  std::string out;
  for (const auto& config : trace) {
    out += format_configuration(config);
    out.push_back('\n');
  }
  return out;
}

inline Configuration parse_configuration(const std::string& line) {
  std::map<int, Cell> attackers, defenders;
  std::istringstream in(line);
  std::string record;
  while (std::getline(in, record, ',')) {
    char team = 0, c1 = 0, c2 = 0, c3 = 0;
    int index = -1;
    Cell cell;
    std::istringstream rs(record);
    if (!(rs >> team >> c1 >> index >> c2 >> cell.x >> c3 >> cell.y) || c1 != ':' || c2 != ':' || c3 != ':' || index < 0 ||
        (team != 'A' && team != 'D'))
      throw std::runtime_error("trace: malformed record '" + record + "'");
    auto& bucket = team == 'A' ? attackers : defenders;
    if (!bucket.emplace(index, cell).second) throw std::runtime_error("trace: duplicate record '" + record + "'");
  }
  Configuration config;
  auto unpack = [](const std::map<int, Cell>& bucket, std::vector<Cell>& out) {
    for (const auto& [index, cell] : bucket) {
      if (index != static_cast<int>(out.size())) throw std::runtime_error("trace: agent indices are not contiguous");
      out.push_back(cell);
    }
  };
  unpack(attackers, config.attackers);
  unpack(defenders, config.defenders);
  return config;
}

inline std::vector<Configuration> parse_trace(std::istream& in) {
  std::vector<Configuration> trace;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    trace.push_back(parse_configuration(line));
  }
  return trace;
}

struct TraceIssue {
  int time = 0;
  std::string what;
};

/// Post-hoc invariant check of a trace: injectivity of every configuration and legality of every
/// transition (attacker batch against alpha_t, then defender batch against the intermediate
/// configuration). With `map`, destinations must be free cells; with `visibility`, the defender
/// cells must be connected in G_r at every step.
inline std::vector<TraceIssue> check_trace(const std::vector<Configuration>& trace, const GridMap* map = nullptr,
                                           const VisibilityGraph* visibility = nullptr) {
  std::vector<TraceIssue> issues;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const Configuration& c = trace[t];
    std::map<Cell, int> count;
    for (Cell x : c.attackers) ++count[x];
    for (Cell x : c.defenders) ++count[x];
    for (const auto& [cell, k] : count) {
      if (k > 1) {
        std::ostringstream os;
        os << "cell " << cell << " holds " << k << " agents";
        issues.push_back({static_cast<int>(t), os.str()});
      }
      if (map && !map->is_free(cell)) {
        std::ostringstream os;
        os << "agent on non-free cell " << cell;
        issues.push_back({static_cast<int>(t), os.str()});
      }
    }
    if (visibility && !c.defenders.empty()) {
      bool inside = true;
      for (Cell x : c.defenders) inside = inside && visibility->contains(x);
      if (inside && !is_connected(*visibility, c.defenders))
        issues.push_back({static_cast<int>(t), "defender cells are disconnected in the visibility graph"});
    }
    if (t == 0) continue;
    const Configuration& prev = trace[t - 1];
    if (prev.attackers.size() != c.attackers.size() || prev.defenders.size() != c.defenders.size()) {
      issues.push_back({static_cast<int>(t), "agent count changed"});
      continue;
    }
    Configuration mid = prev;
    mid.attackers = c.attackers;
    if (auto v = validate_moves(prev, to_batch(Team::Attacker, prev.attackers, c.attackers), map))
      issues.push_back({static_cast<int>(t), "attacker batch: " + v->describe()});
    if (auto v = validate_moves(mid, to_batch(Team::Defender, mid.defenders, c.defenders), map))
      issues.push_back({static_cast<int>(t), "defender batch: " + v->describe()});
  }
  return issues;
}

}  // namespace appc
