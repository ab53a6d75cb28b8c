#pragma once

#include <algorithm>
#include <cctype>
#include <climits>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "appc/grid_world.hpp"
#include "appc/max_flow.hpp"
#include "appc/rng.hpp"
#include "appc/types.hpp"
#include "appc/visibility.hpp"

namespace appc {

enum class Role : std::uint8_t { Occupier, Communicator };

/// Target allocation for the defender team (delta^D) plus each defender's role.
struct Allocation {
  std::vector<std::optional<Cell>> targets;  // indexed by defender
  std::vector<Role> roles;

  explicit Allocation(std::size_t defenders = 0) : targets(defenders), roles(defenders, Role::Occupier) {}

  void assign(std::size_t defender, Cell cell) { targets.at(defender) = cell; }

  std::vector<Cell> cells(Role role) const {
    std::vector<Cell> out;
    for (std::size_t i = 0; i < targets.size(); ++i)
      if (targets[i] && roles[i] == role) out.push_back(*targets[i]);
    return out;
  }

  std::size_t assigned_count() const {
    return static_cast<std::size_t>(std::count_if(targets.begin(), targets.end(), [](const auto& t) { return t.has_value(); }));
  }

  bool is_injective() const {
    std::vector<Cell> all;
    for (const auto& t : targets)
      if (t) all.push_back(*t);
    std::sort(all.begin(), all.end());
    return std::adjacent_find(all.begin(), all.end()) == all.end();
  }

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

enum class StrategyId : std::uint8_t { Rnd, RndC, Grd, GrdC, Sim, SimC };

inline constexpr StrategyId kAllStrategies[] = {StrategyId::Rnd, StrategyId::RndC, StrategyId::Grd,
                                                StrategyId::GrdC, StrategyId::Sim,  StrategyId::SimC};

inline std::string_view strategy_name(StrategyId id) {
  switch (id) {
    case StrategyId::Rnd: return "rnd";
    case StrategyId::RndC: return "rnd-c";
    case StrategyId::Grd: return "grd";
    case StrategyId::GrdC: return "grd-c";
    case StrategyId::Sim: return "sim";
    case StrategyId::SimC: return "sim-c";
  }
  return "?";
}

inline StrategyId parse_strategy(std::string_view text) {
  std::string lower(text);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (StrategyId id : kAllStrategies)
    if (strategy_name(id) == lower) return id;
  throw ConfigError("unknown strategy '" + std::string(text) + "'");
}

inline bool uses_communicators(StrategyId id) {
  return id == StrategyId::RndC || id == StrategyId::GrdC || id == StrategyId::SimC;
}

/// Knobs of the bottleneck simulation.
struct SimulationOptions {
  int vicinity_radius = 4;
  int draws = 1;  // random guesses of the attacker targets, frequencies summed over them
};

// ---------------------------------------------------------------------------------------------
// Random and greedy allocation

namespace detail {

inline std::vector<std::size_t> all_defenders(const Instance& inst) {
  std::vector<std::size_t> out(static_cast<std::size_t>(inst.defender_count()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

// Uniform random injective matching of `defenders` (in order) onto `pool`.
inline void assign_random(Allocation& alloc, const std::vector<std::size_t>& defenders, std::vector<Cell> pool, Rng& rng) {
  rng.shuffle(pool);
  for (std::size_t k = 0; k < defenders.size() && k < pool.size(); ++k) alloc.assign(defenders[k], pool[k]);
}

}  // namespace detail

/// Each listed defender gets a distinct attacker target, uniformly at random.
inline void allocate_random(const Instance& inst, std::uint64_t seed, const std::vector<std::size_t>& defenders,
                            Allocation& alloc) {
  Rng rng(derive_seed(seed, "random"));
  detail::assign_random(alloc, defenders, inst.attacker_targets, rng);
}

inline Allocation allocate_random(const Instance& inst, std::uint64_t seed) {
  Allocation alloc(static_cast<std::size_t>(inst.defender_count()));
  allocate_random(inst, seed, detail::all_defenders(inst), alloc);
  return alloc;
}

/// Defenders in seeded random order each take the closest unassigned target (row-major ties);
/// a defender that reaches no unassigned target stays unassigned.
inline void allocate_greedy(const Instance& inst, std::uint64_t seed, const std::vector<std::size_t>& defenders,
                            Allocation& alloc) {
  Rng rng(derive_seed(seed, "greedy"));
  std::vector<std::size_t> order = defenders;
  rng.shuffle(order);
  std::vector<Cell> targets = inst.attacker_targets;
  std::sort(targets.begin(), targets.end());
  std::vector<bool> taken(targets.size(), false);
  for (std::size_t d : order) {
    const DistanceField dist = bfs_distances(inst.map, inst.start.defenders[d]);
    std::optional<std::size_t> best;
    int best_dist = INT_MAX;
    for (std::size_t k = 0; k < targets.size(); ++k) {
      if (taken[k]) continue;
      const auto dk = dist.at(targets[k]);
      if (dk && *dk < best_dist) {
        best = k;
        best_dist = *dk;
      }
    }
    if (!best) continue;
    taken[*best] = true;
    alloc.assign(d, targets[*best]);
  }
}

inline Allocation allocate_greedy(const Instance& inst, std::uint64_t seed) {
  Allocation alloc(static_cast<std::size_t>(inst.defender_count()));
  allocate_greedy(inst, seed, detail::all_defenders(inst), alloc);
  return alloc;
}

// ---------------------------------------------------------------------------------------------
// Bottleneck simulation

/// Frequency of each cell over simulated attacker shortest paths.
class FrequencyTable {
 public:
  FrequencyTable() = default;
  explicit FrequencyTable(const GridMap& map) : width_(map.width()), count_(static_cast<std::size_t>(map.cell_count()), 0) {}

  int at(Cell c) const { return count_[static_cast<std::size_t>(c.y * width_ + c.x)]; }
  void add(Cell c, int n = 1) { count_[static_cast<std::size_t>(c.y * width_ + c.x)] += n; }
  void merge(const FrequencyTable& other) {
    for (std::size_t i = 0; i < count_.size(); ++i) count_[i] += other.count_[i];
  }

  /// First maximal cell in row-major order, with its count.
  std::pair<Cell, int> argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < count_.size(); ++i)
      if (count_[i] > count_[best]) best = i;
    return {{static_cast<int>(best) % width_, static_cast<int>(best) / width_}, count_[best]};
  }

 private:
  int width_ = 0;
  std::vector<int> count_;
};

/// A guess of the attackers' targets: a uniform random bijection onto the known target set.
inline std::vector<Cell> draw_target_guess(const Instance& inst, Rng& rng) {
  std::vector<Cell> guess = inst.attacker_targets;
  rng.shuffle(guess);
  return guess;
}

/// f(v) = number of shortest attacker paths (start -> guessed target, avoiding F) through v.
inline FrequencyTable simulate_frequencies(const Instance& inst, const CellMask& forbidden, const std::vector<Cell>& guess) {
  FrequencyTable f(inst.map);
  for (std::size_t a = 0; a < inst.start.attackers.size(); ++a) {
    const auto path = shortest_path(inst.map, inst.start.attackers[a], guess[a], forbidden);
    if (!path) continue;
    for (const Cell& c : *path) f.add(c);
  }
  return f;
}

inline FrequencyTable simulate_frequencies(const Instance& inst, const CellMask& forbidden, Rng& rng) {
  return simulate_frequencies(inst, forbidden, draw_target_guess(inst, rng));
}

/// Cells within grid distance `radius` of w, avoiding `removed`, with their distances.
struct Vicinity {
  std::vector<Cell> cells;  // row-major
  DistanceField dist;
};

inline Vicinity vicinity(const GridMap& map, Cell w, int radius, const CellMask& removed = {}) {
  Vicinity v;
  if (!map.is_free(w) || removed.contains(w)) return v;
  v.dist = bfs_distances(map, std::span<const Cell>(&w, 1), removed);
  for (int i = 0; i < map.cell_count(); ++i) {
    const Cell c = map.cell(i);
    if (auto d = v.dist.at(c); d && *d <= radius) v.cells.push_back(c);
  }
  return v;
}

/// Minimum vertex cut inside the vicinity of w separating attacker-side cells from target-side
/// cells. Side cells and `uncuttable` cells are never cut; `removed` cells are absent. Returns the
/// cut (row-major) when 1 <= size <= budget, otherwise an empty set.
inline std::vector<Cell> explore_vicinity(const GridMap& map, Cell w, int radius, const std::vector<Cell>& attacker_side,
                                          const std::vector<Cell>& target_side, int budget,
                                          const CellMask& removed = {}, const CellMask& uncuttable = {}) {
  if (budget < 1) return {};
  const Vicinity ball = vicinity(map, w, radius, removed);
  if (ball.cells.empty()) return {};
  const int n = static_cast<int>(ball.cells.size());
  std::vector<int> slot(static_cast<std::size_t>(map.cell_count()), -1);
  for (int k = 0; k < n; ++k) slot[map.index(ball.cells[k])] = k;

  const CellMask source_mask(map, attacker_side);
  const CellMask sink_mask(map, target_side);
  bool any_source = false, any_sink = false;
  for (const Cell& c : ball.cells) {
    if (source_mask.contains(c) && sink_mask.contains(c)) return {};
    any_source |= source_mask.contains(c);
    any_sink |= sink_mask.contains(c);
  }
  if (!any_source || !any_sink) return {};

  // Vertex k splits into in-node 2k and out-node 2k+1.
  FlowNetwork net(2 * n + 2);
  const int source = 2 * n, sink = 2 * n + 1;
  for (int k = 0; k < n; ++k) {
    const Cell c = ball.cells[k];
    const bool terminal = source_mask.contains(c) || sink_mask.contains(c) || uncuttable.contains(c);
    net.add_edge(2 * k, 2 * k + 1, terminal ? FlowNetwork::kInfinite : 1);
    for (const Cell& off : kNeighborOffsets) {
      const Cell m{c.x + off.x, c.y + off.y};
      if (!map.in_bounds(m)) continue;
      const int j = slot[map.index(m)];
      if (j >= 0) net.add_edge(2 * k + 1, 2 * j, FlowNetwork::kInfinite);
    }
    if (source_mask.contains(c)) net.add_edge(source, 2 * k, FlowNetwork::kInfinite);
    if (sink_mask.contains(c)) net.add_edge(2 * k + 1, sink, FlowNetwork::kInfinite);
  }
  const int flow = net.max_flow(source, sink, budget + 1);
  if (flow < 1 || flow > budget) return {};
  const auto reach = net.residual_reachable(source);
  std::vector<Cell> cut;
  for (int k = 0; k < n; ++k)
    if (reach[2 * k] && !reach[2 * k + 1]) cut.push_back(ball.cells[k]);
  return cut;
}

/// Terminal sets for a vicinity search around w. Boundary cells of the ball are split by the
/// potential dA - dT (distance from attacker starts minus distance from targets, both avoiding
/// `removed`) relative to its value at w; attacker starts and targets inside the ball join their
/// own side.
struct VicinitySides {
  std::vector<Cell> attacker_side;
  std::vector<Cell> target_side;
};

inline VicinitySides vicinity_sides(const GridMap& map, Cell w, int radius, const std::vector<Cell>& attacker_starts,
                                    const std::vector<Cell>& targets, const CellMask& removed = {}) {
  VicinitySides sides;
  const Vicinity ball = vicinity(map, w, radius, removed);
  if (ball.cells.empty()) return sides;
  const DistanceField from_attackers = bfs_distances(map, attacker_starts, removed);
  const DistanceField from_targets = bfs_distances(map, targets, removed);
  const auto wa = from_attackers.at(w);
  const auto wt = from_targets.at(w);
  const CellMask starts(map, attacker_starts);
  const CellMask goals(map, targets);
  for (const Cell& c : ball.cells) {
    if (starts.contains(c)) {
      sides.attacker_side.push_back(c);
      continue;
    }
    if (goals.contains(c)) {
      sides.target_side.push_back(c);
      continue;
    }
    if (ball.dist.get_or(c, -1) != radius || !wa || !wt) continue;
    const auto ca = from_attackers.at(c);
    const auto ct = from_targets.at(c);
    if (!ca || !ct) continue;
    const int potential = *ca - *ct;
    const int at_w = *wa - *wt;
    if (potential < at_w) sides.attacker_side.push_back(c);
    else if (potential > at_w) sides.target_side.push_back(c);
  }
  return sides;
}

/// Record of one accepted bottleneck.
struct BottleneckReport {
  Cell hot_cell;
  std::vector<Cell> cut;
  FrequencyTable frequencies;
};

namespace detail {

// Available defender closest (static BFS distance) to `cell`; ties by index.
inline std::size_t closest_defender(const std::vector<DistanceField>& dist, const std::vector<std::size_t>& available,
                                    Cell cell) {
  std::size_t best = 0;
  int best_dist = INT_MAX;
  for (std::size_t k = 0; k < available.size(); ++k) {
    const int d = dist[available[k]].get_or(cell, INT_MAX);
    if (d < best_dist) {
      best = k;
      best_dist = d;
    }
  }
  return best;
}

}  // namespace detail

/// Bottleneck simulation: repeatedly estimate attacker routes, find the most used cell, search
/// its vicinity for a small cut, and block it. Leftover defenders take random remaining targets.
inline std::vector<BottleneckReport> allocate_bottleneck_sim(const Instance& inst, std::uint64_t seed,
                                                             const std::vector<std::size_t>& defenders,
                                                             Allocation& alloc, const SimulationOptions& opt = {}) {
  const GridMap& map = inst.map;
  Rng rng(derive_seed(seed, "bottleneck"));
  std::vector<std::vector<Cell>> guesses;
  for (int k = 0; k < std::max(1, opt.draws); ++k) guesses.push_back(draw_target_guess(inst, rng));

  std::vector<DistanceField> dist(static_cast<std::size_t>(inst.defender_count()));
  for (std::size_t d : defenders) dist[d] = bfs_distances(map, inst.start.defenders[d]);

  const CellMask attacker_starts(map, inst.start.attackers);
  CellMask forbidden(map);
  std::vector<std::size_t> available = defenders;
  std::vector<BottleneckReport> reports;
  while (!available.empty()) {
    FrequencyTable f(map);
    for (const auto& guess : guesses) f.merge(simulate_frequencies(inst, forbidden, guess));
    const auto [hot, count] = f.argmax();
    if (count == 0) break;
    const VicinitySides sides =
        vicinity_sides(map, hot, opt.vicinity_radius, inst.start.attackers, inst.attacker_targets, forbidden);
    auto cut = explore_vicinity(map, hot, opt.vicinity_radius, sides.attacker_side, sides.target_side,
                                static_cast<int>(available.size()), forbidden, attacker_starts);
    if (cut.empty()) break;
    for (const Cell& b : cut) {
      const std::size_t k = detail::closest_defender(dist, available, b);
      alloc.assign(available[k], b);
      available.erase(available.begin() + static_cast<std::ptrdiff_t>(k));
      forbidden.insert(b);
    }
    reports.push_back({hot, std::move(cut), std::move(f)});
  }

  std::vector<Cell> remaining;
  for (const Cell& t : inst.attacker_targets)
    if (!forbidden.contains(t)) remaining.push_back(t);
  detail::assign_random(alloc, available, std::move(remaining), rng);
  return reports;
}

inline Allocation allocate_bottleneck_sim(const Instance& inst, std::uint64_t seed, const SimulationOptions& opt = {}) {
  Allocation alloc(static_cast<std::size_t>(inst.defender_count()));
  allocate_bottleneck_sim(inst, seed, detail::all_defenders(inst), alloc, opt);
  return alloc;
}

// ---------------------------------------------------------------------------------------------
// Communicators

/// Occupiers are the lowest indices; the top floor(ratio * |D|) defenders are communicators.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_defenders(const Instance& inst) {
  const auto n = static_cast<std::size_t>(inst.defender_count());
  // The epsilon absorbs representation error such as 0.29 * 100 = 28.999...
  const auto comm = static_cast<std::size_t>(std::floor(inst.communicator_ratio * static_cast<double>(n) + 1e-9));
  std::vector<std::size_t> occupiers, communicators;
  for (std::size_t i = 0; i < n; ++i) (i < n - comm ? occupiers : communicators).push_back(i);
  return {occupiers, communicators};
}

/// Best relay for one greedy step: the cell visible from at least two of `components` that
/// maximizes the total size of the components it sees. Cells in `taken` are not candidates.
struct RelayChoice {
  Cell cell;
  std::vector<std::size_t> covered;  // indices into the component list
  int score = 0;
};

inline std::optional<RelayChoice> best_relay(const VisibilityGraph& g, const std::vector<std::vector<Cell>>& components,
                                             const CellMask& taken) {
  const int cells = g.width() * g.height();
  std::vector<int> owner(static_cast<std::size_t>(cells), -1);
  for (std::size_t k = 0; k < components.size(); ++k)
    for (const Cell& c : components[k]) owner[g.index(c)] = static_cast<int>(k);

  std::optional<RelayChoice> best;
  std::vector<std::size_t> seen;
  for (int i = 0; i < cells; ++i) {
    const Cell l = g.cell(i);
    if (!g.contains(l) || taken.contains(l)) continue;
    seen.clear();
    for (int v : g.adjacent(i)) {
      const int k = owner[v];
      if (k >= 0 && std::find(seen.begin(), seen.end(), static_cast<std::size_t>(k)) == seen.end())
        seen.push_back(static_cast<std::size_t>(k));
    }
    if (seen.size() < 2) continue;
    int score = 0;
    for (std::size_t k : seen) score += static_cast<int>(components[k].size());
    if (!best || score > best->score) {
      std::sort(seen.begin(), seen.end());
      best = RelayChoice{l, seen, score};
    }
  }
  return best;
}

/// Greedy relay placement for communicators. Each pick is the cell covering the largest total
/// size of not-yet-covered components of G_r[T_o + T_c], given to the closest unallocated
/// communicator. Returns (defender, cell) pairs in assignment order.
inline std::vector<std::pair<std::size_t, Cell>> allocate_communicators(const GridMap& map, const VisibilityGraph& g,
                                                                        const std::vector<Cell>& occupier_targets,
                                                                        std::vector<std::size_t> communicators,
                                                                        const std::vector<Cell>& starts) {
  std::vector<std::pair<std::size_t, Cell>> out;
  std::vector<DistanceField> dist(starts.size());
  for (std::size_t d : communicators) dist[d] = bfs_distances(map, starts[d]);

  std::vector<Cell> allocated = occupier_targets;
  CellMask taken(map, allocated);
  while (!communicators.empty()) {
    auto components = connected_components(g, allocated);
    bool progressed = false;
    while (!components.empty() && !communicators.empty()) {
      const auto relay = best_relay(g, components, taken);
      if (!relay) break;
      const std::size_t k = detail::closest_defender(dist, communicators, relay->cell);
      out.emplace_back(communicators[k], relay->cell);
      communicators.erase(communicators.begin() + static_cast<std::ptrdiff_t>(k));
      allocated.push_back(relay->cell);
      taken.insert(relay->cell);
      for (auto it = relay->covered.rbegin(); it != relay->covered.rend(); ++it)
        components.erase(components.begin() + static_cast<std::ptrdiff_t>(*it));
      progressed = true;
    }
    if (!progressed) break;
  }
  return out;
}

// ---------------------------------------------------------------------------------------------

/// Single-stage allocation for any of the six strategies. The -C variants allocate occupiers
/// with the base strategy and add communicator relays only when G_r[T_o] is disconnected.
inline Allocation allocate(StrategyId id, const Instance& inst, const VisibilityGraph& g, std::uint64_t seed,
                           const SimulationOptions& opt = {}) {
  Allocation alloc(static_cast<std::size_t>(inst.defender_count()));
  std::vector<std::size_t> occupiers = detail::all_defenders(inst);
  std::vector<std::size_t> communicators;
  if (uses_communicators(id)) {
    std::tie(occupiers, communicators) = split_defenders(inst);
    for (std::size_t c : communicators) alloc.roles[c] = Role::Communicator;
  }
  switch (id) {
    case StrategyId::Rnd:
    case StrategyId::RndC: allocate_random(inst, seed, occupiers, alloc); break;
    case StrategyId::Grd:
    case StrategyId::GrdC: allocate_greedy(inst, seed, occupiers, alloc); break;
    case StrategyId::Sim:
    case StrategyId::SimC: allocate_bottleneck_sim(inst, seed, occupiers, alloc, opt); break;
  }
  if (!communicators.empty()) {
    const auto occupier_targets = alloc.cells(Role::Occupier);
    if (!is_connected(g, occupier_targets)) {
      for (const auto& [d, cell] : allocate_communicators(inst.map, g, occupier_targets, communicators, inst.start.defenders))
        alloc.assign(d, cell);
    }
  }
  return alloc;
}

}  // namespace appc
