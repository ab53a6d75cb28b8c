#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "appc/grid_world.hpp"
#include "appc/rng.hpp"
#include "appc/types.hpp"
#include "appc/visibility.hpp"

namespace appc {

/// Axis-aligned block of cells [x, x + width) x [y, y + height).
struct Rect {
  int x = 0;
  int y = 0;
  int width = 1;
  int height = 1;

  bool contains(Cell c) const { return c.x >= x && c.y >= y && c.x < x + width && c.y < y + height; }
  bool intersects(const Rect& o) const {
    return x < o.x + o.width && o.x < x + width && y < o.y + o.height && o.y < y + height;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Team size ratio |D|:|A|.
struct TeamRatio {
  int defenders = 1;
  int attackers = 1;

  std::string str() const { return std::to_string(defenders) + ':' + std::to_string(attackers); }
  friend bool operator==(const TeamRatio&, const TeamRatio&) = default;
};

inline TeamRatio parse_ratio(std::string_view text) {
  const auto colon = text.find(':');
  TeamRatio r;
  auto num = [&](std::string_view s, int& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
  };
  if (colon == std::string_view::npos || !num(text.substr(0, colon), r.defenders) || !num(text.substr(colon + 1), r.attackers) ||
      r.defenders < 0 || r.attackers <= 0)
    throw ConfigError("malformed ratio '" + std::string(text) + "' (expected D:A, e.g. 1:2)");
  return r;
}

/// |D| = round(|A| * d / a).
inline int defender_count_for(int attackers, TeamRatio ratio) {
  return static_cast<int>(std::lround(static_cast<double>(attackers) * ratio.defenders / ratio.attackers));
}

struct SpawnSpec {
  Rect attacker_rect;
  Rect defender_rect;
  Rect target_rect;
  int attackers = 50;
  TeamRatio ratio;
  std::uint64_t seed = 0;
  // Parameters copied into the instance.
  int visibility_range = 4;
  int step_limit = 150;
  double communicator_ratio = 0.2;
  int sim_draws = 1;
  // Grow the defender start set so that it is connected in G_r.
  bool connected_defenders = true;
};

namespace detail {

inline std::vector<Cell> free_in(const GridMap& map, const Rect& r, const CellMask& exclude = {}) {
  std::vector<Cell> out;
  for (int y = r.y; y < r.y + r.height; ++y)
    for (int x = r.x; x < r.x + r.width; ++x)
      if (map.is_free({x, y}) && !exclude.contains({x, y})) out.push_back({x, y});
  return out;
}

inline void check_rect(const GridMap& map, const Rect& r, const char* name) {
  if (r.width <= 0 || r.height <= 0 || r.x < 0 || r.y < 0 || r.x + r.width > map.width() || r.y + r.height > map.height())
    throw ConfigError(std::string(name) + " rectangle lies outside the map");
}

inline std::vector<Cell> sample(std::vector<Cell> pool, int count, Rng& rng, const char* name) {
  if (static_cast<int>(pool.size()) < count)
    throw ConfigError(std::string(name) + " rectangle has " + std::to_string(pool.size()) + " free cells, need " +
                      std::to_string(count));
  // Partial Fisher-Yates.
  for (int i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.below(pool.size() - static_cast<std::size_t>(i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(count));
  return pool;
}

// Random connected growth inside the pool: each new cell is drawn uniformly among pool cells
// visible from some already placed cell.
inline std::vector<Cell> sample_connected(const GridMap& map, const VisibilityGraph& g, const std::vector<Cell>& pool,
                                          int count, Rng& rng) {
  if (static_cast<int>(pool.size()) < count)
    throw ConfigError("defender rectangle has " + std::to_string(pool.size()) + " free cells, need " + std::to_string(count));
  std::vector<Cell> placed;
  if (count == 0) return placed;
  CellMask in_pool(map, pool);
  CellMask used(map);
  CellMask frontier_mask(map);
  std::vector<Cell> frontier;
  auto place = [&](Cell c) {
    placed.push_back(c);
    used.insert(c);
    for (int w : g.adjacent(c)) {
      const Cell n = g.cell(w);
      if (in_pool.contains(n) && !used.contains(n) && !frontier_mask.contains(n)) {
        frontier_mask.insert(n);
        frontier.push_back(n);
      }
    }
  };
  place(pool[static_cast<std::size_t>(rng.below(pool.size()))]);
  while (static_cast<int>(placed.size()) < count) {
    std::erase_if(frontier, [&](Cell c) { return used.contains(c); });
    if (frontier.empty()) throw ConfigError("defender rectangle cannot hold a connected defender team");
    std::sort(frontier.begin(), frontier.end());
    place(frontier[static_cast<std::size_t>(rng.below(frontier.size()))]);
  }
  return placed;
}

}  // namespace detail

/// Seeded instance: attackers, defenders and targets drawn without replacement from their
/// rectangles; targets avoid all start cells; attacker i is paired with target i after a shuffle.
inline Instance generate_instance(const GridMap& map, const SpawnSpec& spec) {
  detail::check_rect(map, spec.attacker_rect, "attacker");
  detail::check_rect(map, spec.defender_rect, "defender");
  detail::check_rect(map, spec.target_rect, "target");
  if (spec.attacker_rect.intersects(spec.defender_rect)) throw ConfigError("attacker and defender rectangles overlap");
  if (spec.attackers < 0) throw ConfigError("attacker count must be >= 0");

  Rng rng(spec.seed);
  Instance inst;
  inst.map = map;
  inst.visibility_range = spec.visibility_range;
  inst.step_limit = spec.step_limit;
  inst.communicator_ratio = spec.communicator_ratio;
  inst.sim_draws = spec.sim_draws;

  inst.start.attackers = detail::sample(detail::free_in(map, spec.attacker_rect), spec.attackers, rng, "attacker");
  const int n_def = defender_count_for(spec.attackers, spec.ratio);
  const auto defender_pool = detail::free_in(map, spec.defender_rect);
  if (spec.connected_defenders && n_def > 1) {
    const VisibilityGraph g(map, spec.visibility_range);
    inst.start.defenders = detail::sample_connected(map, g, defender_pool, n_def, rng);
  } else {
    inst.start.defenders = detail::sample(defender_pool, n_def, rng, "defender");
  }
  CellMask starts(map, inst.start.attackers);
  for (Cell c : inst.start.defenders) starts.insert(c);
  inst.attacker_targets = detail::sample(detail::free_in(map, spec.target_rect, starts), spec.attackers, rng, "target");
  rng.shuffle(inst.attacker_targets);
  validate_instance(inst);
  return inst;
}

// ---------------------------------------------------------------------------------------------
// Map families

enum class MapFamily : std::uint8_t { OrthogonalRooms, Ruins, Waterfront };

inline constexpr MapFamily kAllFamilies[] = {MapFamily::OrthogonalRooms, MapFamily::Ruins, MapFamily::Waterfront};

inline std::string_view family_name(MapFamily f) {
  switch (f) {
    case MapFamily::OrthogonalRooms: return "orthogonal-rooms";
    case MapFamily::Ruins: return "ruins";
    case MapFamily::Waterfront: return "waterfront";
  }
  return "?";
}

inline MapFamily parse_family(std::string_view text) {
  for (MapFamily f : kAllFamilies)
    if (family_name(f) == text) return f;
  throw ConfigError("unknown map family '" + std::string(text) + "'");
}

namespace detail {

// Blocks every free cell outside the component of `anchor` so that the map is connected.
inline GridMap keep_component(int width, int height, std::vector<Cell> obstacles, Cell anchor) {
  const GridMap raw(width, height, obstacles);
  const DistanceField reach = bfs_distances(raw, anchor);
  for (const Cell& c : raw.free_cells())
    if (!reach.contains(c)) obstacles.push_back(c);
  return GridMap(width, height, obstacles);
}

}  // namespace detail

/// 3x3 grid of rectangular rooms separated by one-cell walls; every wall between two adjacent
/// rooms has one door of width 1 or 2.
inline GridMap orthogonal_rooms_map(std::uint64_t seed = 1, int size = 40) {
  Rng rng(derive_seed(seed, "orthogonal-rooms"));
  const int a = size / 3, b = 2 * size / 3;  // wall lines
  const int lines[] = {a, b};
  const int spans[][2] = {{0, a}, {a + 1, b}, {b + 1, size}};
  CellMask wall(GridMap(size, size));
  for (int w : lines)
    for (int i = 0; i < size; ++i) {
      wall.insert({w, i});
      wall.insert({i, w});
    }
  auto door = [&](int lo, int hi) {
    const int width = 1 + static_cast<int>(rng.below(2));
    const int room = hi - lo;
    const int start = lo + 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, room - 4 - width + 1))));
    return std::pair{start, width};
  };
  for (int w : lines)
    for (const auto& span : spans) {
      auto [s, width] = door(span[0], span[1]);
      for (int k = 0; k < width; ++k) wall.erase({w, s + k});  // door in a vertical wall
      auto [s2, width2] = door(span[0], span[1]);
      for (int k = 0; k < width2; ++k) wall.erase({s2 + k, w});  // door in a horizontal wall
    }
  std::vector<Cell> obstacles;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      if (wall.contains({x, y})) obstacles.push_back({x, y});
  return detail::keep_component(size, size, std::move(obstacles), {0, 0});
}

/// Open ground scattered with short straight wall fragments.
inline GridMap ruins_map(std::uint64_t seed = 1, int size = 40) {
  Rng rng(derive_seed(seed, "ruins"));
  CellMask wall(GridMap(size, size));
  const int fragments = size * size / 20;
  for (int k = 0; k < fragments; ++k) {
    const int len = 2 + static_cast<int>(rng.below(4));
    const bool horizontal = rng.below(2) == 0;
    const int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(size)));
    const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(size)));
    for (int i = 0; i < len; ++i) wall.insert(horizontal ? Cell{x + i, y} : Cell{x, y + i});
  }
  // Keep the spawn bands clear.
  std::vector<Cell> obstacles;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      if (wall.contains({x, y}) && x >= 4 && x < size - 4) obstacles.push_back({x, y});
  return detail::keep_component(size, size, std::move(obstacles), {0, 0});
}

/// A three-cell-thick barrier across the map with a few narrow crossings.
inline GridMap waterfront_map(std::uint64_t seed = 1, int size = 40) {
  Rng rng(derive_seed(seed, "waterfront"));
  const int x0 = size / 2 - 1;
  CellMask water(GridMap(size, size));
  for (int y = 0; y < size; ++y)
    for (int x = x0; x < x0 + 3; ++x) water.insert({x, y});
  const int crossings = 3;
  for (int k = 0; k < crossings; ++k) {
    const int band = size / crossings;
    const int width = 1 + static_cast<int>(rng.below(2));
    const int y = k * band + 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, band - 4 - width + 1))));
    for (int i = 0; i < width; ++i)
      for (int x = x0; x < x0 + 3; ++x) water.erase({x, y + i});
  }
  std::vector<Cell> obstacles;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      if (water.contains({x, y})) obstacles.push_back({x, y});
  return detail::keep_component(size, size, std::move(obstacles), {0, 0});
}

inline GridMap family_map(MapFamily f, std::uint64_t seed = 1) {
  switch (f) {
    case MapFamily::OrthogonalRooms: return orthogonal_rooms_map(seed);
    case MapFamily::Ruins: return ruins_map(seed);
    case MapFamily::Waterfront: return waterfront_map(seed);
  }
  return orthogonal_rooms_map(seed);
}

/// Default spawn rectangles: attackers on the far side, targets in the protected region,
/// defenders in between.
inline SpawnSpec default_spawn(MapFamily f) {
  SpawnSpec s;
  switch (f) {
    case MapFamily::OrthogonalRooms:
      s.attacker_rect = {0, 0, 40, 6};
      s.defender_rect = {14, 14, 12, 12};
      s.target_rect = {27, 27, 13, 13};
      break;
    case MapFamily::Ruins:
      s.attacker_rect = {0, 0, 4, 40};
      s.defender_rect = {22, 10, 8, 20};
      s.target_rect = {34, 5, 6, 30};
      break;
    case MapFamily::Waterfront:
      s.attacker_rect = {0, 0, 6, 40};
      s.defender_rect = {22, 10, 6, 20};
      s.target_rect = {32, 5, 8, 30};
      break;
  }
  return s;
}

// ---------------------------------------------------------------------------------------------
// Instance file
//
//   [map]
//   <path to ASCII map, relative to the instance file>
//   [params]
//   r=<int>
//   step_limit=<int>
//   communicator_ratio=<decimal>
//   sim_draws=<int>
//   [attackers]   one "x y" per line
//   [defenders]
//   [targets]     line i is the target of attacker i

inline std::string format_decimal(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline std::string format_instance(const Instance& inst, const std::string& map_path) {
  std::ostringstream os;
  os << "[map]\n" << map_path << '\n';
  os << "[params]\n";
  os << "r=" << inst.visibility_range << '\n';
  os << "step_limit=" << inst.step_limit << '\n';
  os << "communicator_ratio=" << format_decimal(inst.communicator_ratio) << '\n';
  os << "sim_draws=" << inst.sim_draws << '\n';
  auto cells = [&](const char* name, const std::vector<Cell>& v) {
    os << '[' << name << "]\n";
    for (const Cell& c : v) os << c.x << ' ' << c.y << '\n';
  };
  cells("attackers", inst.start.attackers);
  cells("defenders", inst.start.defenders);
  cells("targets", inst.attacker_targets);
  return os.str();
}

/// Parses an instance; `load_map` resolves the [map] entry to a GridMap.
template <typename MapLoader>
Instance parse_instance(std::istream& in, MapLoader&& load_map) {
  Instance inst;
  std::string line, section, map_ref;
  bool have_map = false;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    throw ConfigError("instance line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      section = line.substr(1, line.size() - 2);
      if (section != "map" && section != "params" && section != "attackers" && section != "defenders" && section != "targets")
        fail("unknown section '" + section + "'");
      continue;
    }
    if (section == "map") {
      map_ref = line;
      have_map = true;
    } else if (section == "params") {
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail("expected key=value");
      const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
      try {
        std::size_t used = 0;
        if (key == "r") inst.visibility_range = std::stoi(value, &used);
        else if (key == "step_limit") inst.step_limit = std::stoi(value, &used);
        else if (key == "communicator_ratio") inst.communicator_ratio = std::stod(value, &used);
        else if (key == "sim_draws") inst.sim_draws = std::stoi(value, &used);
        else fail("unknown parameter '" + key + "'");
        if (used != value.size()) fail("malformed value for '" + key + "'");
      } catch (const std::logic_error&) {
        fail("malformed value for '" + key + "'");
      }
    } else if (section == "attackers" || section == "defenders" || section == "targets") {
      std::istringstream ls(line);
      Cell c;
      std::string extra;
      if (!(ls >> c.x >> c.y) || (ls >> extra)) fail("expected 'x y'");
      auto& dest = section == "attackers" ? inst.start.attackers
                   : section == "defenders" ? inst.start.defenders
                                            : inst.attacker_targets;
      dest.push_back(c);
    } else {
      fail("content outside of a section");
    }
  }
  if (!have_map) throw ConfigError("instance: missing [map] section");
  inst.map = load_map(map_ref);
  validate_instance(inst);
  return inst;
}

inline GridMap read_map_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open map file '" + path.string() + "'");
  try {
    return parse_map(in);
  } catch (const std::runtime_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

inline Instance read_instance_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open instance file '" + path.string() + "'");
  return parse_instance(in, [&](const std::string& ref) {
    std::filesystem::path p(ref);
    if (p.is_relative()) p = path.parent_path() / p;
    return read_map_file(p);
  });
}

}  // namespace appc
