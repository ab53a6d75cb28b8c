#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "appc/grid_world.hpp"

namespace appc {

namespace detail {

// Exact rational t = num / den with den > 0.
struct Ratio {
  std::int64_t num;
  std::int64_t den;
};
inline bool less(Ratio a, Ratio b) { return a.num * b.den < b.num * a.den; }

// Does the open segment p->q (doubled coordinates) meet the open box (lo, hi)?
// Liang-Barsky clipping with strict inequalities throughout.
inline bool segment_hits_open_box(std::int64_t px, std::int64_t py, std::int64_t qx, std::int64_t qy,
                                  std::int64_t lox, std::int64_t loy, std::int64_t hix, std::int64_t hiy) {
  Ratio enter{0, 1};
  Ratio leave{1, 1};
  auto clip = [&](std::int64_t p, std::int64_t d, std::int64_t lo, std::int64_t hi) {
    if (d == 0) return lo < p && p < hi;
    Ratio a{lo - p, d}, b{hi - p, d};
    if (d < 0) {
      a = {p - lo, -d};
      b = {p - hi, -d};
      std::swap(a, b);
    }
    if (less(enter, a)) enter = a;
    if (less(b, leave)) leave = b;
    return true;
  };
  if (!clip(px, qx - px, lox, hix)) return false;
  if (!clip(py, qy - py, loy, hiy)) return false;
  return less(enter, leave);
}

}  // namespace detail

/// True iff the segment between the centers of u and v crosses the interior of no obstacle
/// square. Touching a square's boundary does not block.
inline bool line_of_sight(const GridMap& map, Cell u, Cell v) {
  // Doubled coordinates: the center of (x, y) is (2x+1, 2y+1), square (x, y) is [2x, 2x+2].
  const std::int64_t px = 2 * u.x + 1, py = 2 * u.y + 1;
  const std::int64_t qx = 2 * v.x + 1, qy = 2 * v.y + 1;
  const int x0 = std::min(u.x, v.x), x1 = std::max(u.x, v.x);
  const int y0 = std::min(u.y, v.y), y1 = std::max(u.y, v.y);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (!map.is_obstacle({x, y})) continue;
      if (detail::segment_hits_open_box(px, py, qx, qy, 2 * x, 2 * y, 2 * x + 2, 2 * y + 2)) return false;
    }
  }
  return true;
}

/// The visibility graph G_r: free cells joined when they see each other and their grid
/// distance is at most r. Immutable after construction.
class VisibilityGraph {
 public:
  VisibilityGraph() = default;

  VisibilityGraph(const GridMap& map, int range) : width_(map.width()), height_(map.height()), range_(range) {
    if (range < 1) throw std::invalid_argument("visibility range must be >= 1");
    const int n = map.cell_count();
    offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    free_.assign(static_cast<std::size_t>(n), 0);
    std::vector<int> dist(static_cast<std::size_t>(n), -1);
    std::vector<int> queue;
    std::vector<int> row;
    for (int ui = 0; ui < n; ++ui) {
      offsets_[ui] = static_cast<int>(adjacency_.size());
      const Cell u = map.cell(ui);
      if (!map.is_free(u)) continue;
      free_[ui] = 1;
      // Depth-limited BFS: cells within grid distance `range`.
      queue.assign(1, ui);
      dist[ui] = 0;
      row.clear();
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const int vi = queue[head];
        if (vi != ui && line_of_sight(map, u, map.cell(vi))) row.push_back(vi);
        if (dist[vi] == range) continue;
        const Cell v = map.cell(vi);
        for (const Cell& d : kNeighborOffsets) {
          const Cell w{v.x + d.x, v.y + d.y};
          if (!map.is_free(w)) continue;
          const int wi = map.index(w);
          if (dist[wi] != -1) continue;
          dist[wi] = dist[vi] + 1;
          queue.push_back(wi);
        }
      }
      for (int vi : queue) dist[vi] = -1;
      std::sort(row.begin(), row.end());
      adjacency_.insert(adjacency_.end(), row.begin(), row.end());
    }
    offsets_[n] = static_cast<int>(adjacency_.size());
  }

  int range() const { return range_; }
  int width() const { return width_; }
  int height() const { return height_; }

  bool contains(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_ && free_[index(c)] != 0;
  }

  /// Sorted row-major indices of the cells visible from c.
  std::span<const int> adjacent(Cell c) const { return adjacent(index(c)); }
  std::span<const int> adjacent(int i) const {
    return {adjacency_.data() + offsets_[i], static_cast<std::size_t>(offsets_[i + 1] - offsets_[i])};
  }

  bool has_edge(Cell u, Cell v) const {
    if (!contains(u) || !contains(v)) return false;
    auto row = adjacent(u);
    return std::binary_search(row.begin(), row.end(), index(v));
  }

  /// Each unordered edge once, as (smaller, larger) in row-major order.
  std::vector<std::pair<Cell, Cell>> edges() const {
    std::vector<std::pair<Cell, Cell>> out;
    for (int ui = 0; ui + 1 < static_cast<int>(offsets_.size()); ++ui)
      for (int vi : adjacent(ui))
        if (ui < vi) out.emplace_back(cell(ui), cell(vi));
    return out;
  }

  std::size_t edge_count() const { return adjacency_.size() / 2; }

  int index(Cell c) const { return c.y * width_ + c.x; }
  Cell cell(int i) const { return {i % width_, i / width_}; }

 private:
  int width_ = 0;
  int height_ = 0;
  int range_ = 0;
  std::vector<std::uint8_t> free_;
  std::vector<int> offsets_;
  std::vector<int> adjacency_;
};

inline VisibilityGraph build_visibility_graph(const GridMap& map, int range) { return VisibilityGraph(map, range); }

namespace detail {

// Component label per member of `nodes` (sorted unique indices); returns the component count.
inline int label_components(const VisibilityGraph& g, const std::vector<int>& nodes, std::vector<int>& label) {
  label.assign(nodes.size(), -1);
  std::vector<int> stack;
  int count = 0;
  for (std::size_t s = 0; s < nodes.size(); ++s) {
    if (label[s] != -1) continue;
    label[s] = count;
    stack.assign(1, static_cast<int>(s));
    while (!stack.empty()) {
      const int at = stack.back();
      stack.pop_back();
      for (int w : g.adjacent(nodes[at])) {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), w);
        if (it == nodes.end() || *it != w) continue;
        const auto k = static_cast<std::size_t>(it - nodes.begin());
        if (label[k] != -1) continue;
        label[k] = count;
        stack.push_back(static_cast<int>(k));
      }
    }
    ++count;
  }
  return count;
}

inline std::vector<int> sorted_indices(const VisibilityGraph& g, std::span<const Cell> cells) {
  std::vector<int> nodes;
  nodes.reserve(cells.size());
  for (const Cell& c : cells) {
    if (!g.contains(c)) throw std::domain_error("cell is not a vertex of the visibility graph");
    nodes.push_back(g.index(c));
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

}  // namespace detail

/// Number of connected components of G_r[S].
inline int count_components(const VisibilityGraph& g, std::span<const Cell> cells) {
  std::vector<int> label;
  return detail::label_components(g, detail::sorted_indices(g, cells), label);
}

/// True iff G_r[S] has at most one component.
inline bool is_connected(const VisibilityGraph& g, std::span<const Cell> cells) {
  return count_components(g, cells) <= 1;
}

/// Maximal connected subsets of S, each sorted row-major, listed by their minimum cell.
inline std::vector<std::vector<Cell>> connected_components(const VisibilityGraph& g, std::span<const Cell> cells) {
  const auto nodes = detail::sorted_indices(g, cells);
  std::vector<int> label;
  const int count = detail::label_components(g, nodes, label);
  std::vector<std::vector<Cell>> out(static_cast<std::size_t>(count));
  // Nodes are sorted, so components appear in order of their minimum cell.
  for (std::size_t k = 0; k < nodes.size(); ++k) out[label[k]].push_back(g.cell(nodes[k]));
  return out;
}

}  // namespace appc
