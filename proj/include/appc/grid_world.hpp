#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace appc {

/// A grid cell. x is the column, y is the row (row 0 is the top line of a map file).
struct Cell {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(const Cell&, const Cell&) = default;
  // Row-major: every tie-break in the library uses this order.
  friend constexpr std::strong_ordering operator<=>(const Cell& a, const Cell& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

inline std::ostream& operator<<(std::ostream& os, const Cell& c) {
  return os << '(' << c.x << ',' << c.y << ')';
}

inline int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

using Path = std::vector<Cell>;

/// Number of moves along a path (a single-cell path has length 0).
inline int path_length(const Path& p) { return p.empty() ? 0 : static_cast<int>(p.size()) - 1; }

// up, right, down, left
inline constexpr std::array<Cell, 4> kNeighborOffsets{{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};

/// Bounded 4-connected grid with an obstacle set. Immutable after construction.
class GridMap {
 public:
  GridMap() = default;

  GridMap(int width, int height, std::span<const Cell> obstacles = {})
      : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("map dimensions must be positive");
    blocked_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
    for (const Cell& o : obstacles) {
      if (!in_bounds(o)) throw std::invalid_argument("obstacle outside map bounds");
      blocked_[index(o)] = 1;
    }
    if (free_count() == 0) throw std::invalid_argument("map has no free cell");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int cell_count() const { return width_ * height_; }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool is_obstacle(Cell c) const { return blocked_[index(c)] != 0; }
  bool is_free(Cell c) const { return in_bounds(c) && blocked_[index(c)] == 0; }

  /// Row-major linear index; ordering of indices equals the Cell ordering.
  int index(Cell c) const { return c.y * width_ + c.x; }
  Cell cell(int index) const { return {index % width_, index / width_}; }

  int free_count() const {
    return static_cast<int>(std::count(blocked_.begin(), blocked_.end(), std::uint8_t{0}));
  }

  std::vector<Cell> free_cells() const {
    std::vector<Cell> out;
    for (int i = 0; i < cell_count(); ++i)
      if (!blocked_[i]) out.push_back(cell(i));
    return out;
  }

  std::vector<Cell> obstacles() const {
    std::vector<Cell> out;
    for (int i = 0; i < cell_count(); ++i)
      if (blocked_[i]) out.push_back(cell(i));
    return out;
  }

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> blocked_;
};

/// Dense cell set over a map's bounding box.
class CellMask {
 public:
  CellMask() = default;
  explicit CellMask(const GridMap& map)
      : width_(map.width()), bits_(static_cast<std::size_t>(map.cell_count()), 0) {}
  CellMask(const GridMap& map, std::span<const Cell> cells) : CellMask(map) {
    for (const Cell& c : cells) insert(c);
  }
  CellMask(const GridMap& map, std::initializer_list<Cell> cells)
      : CellMask(map, std::span<const Cell>(cells.begin(), cells.size())) {}

  bool empty_domain() const { return bits_.empty(); }

  void insert(Cell c) {
    if (auto i = slot(c)) bits_[*i] = 1;
  }
  void erase(Cell c) {
    if (auto i = slot(c)) bits_[*i] = 0;
  }
  bool contains(Cell c) const {
    auto i = slot(c);
    return i && bits_[*i] != 0;
  }
  int size() const { return static_cast<int>(std::count(bits_.begin(), bits_.end(), 1)); }

 private:
  std::optional<std::size_t> slot(Cell c) const {
    if (width_ == 0 || c.x < 0 || c.y < 0 || c.x >= width_) return std::nullopt;
    auto i = static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x);
    if (i >= bits_.size()) return std::nullopt;
    return i;
  }

  int width_ = 0;
  std::vector<std::uint8_t> bits_;
};

namespace detail {

inline void require_free(const GridMap& map, Cell v, const char* what) {
  if (!map.in_bounds(v)) {
    std::ostringstream os;
    os << what << ' ' << v << " is out of bounds";
    throw std::domain_error(os.str());
  }
  if (map.is_obstacle(v)) {
    std::ostringstream os;
    os << what << ' ' << v << " is an obstacle";
    throw std::domain_error(os.str());
  }
}

}  // namespace detail

/// Free 4-neighbors of v in the order up, right, down, left.
inline std::vector<Cell> neighbors(const GridMap& map, Cell v) {
  detail::require_free(map, v, "cell");
  std::vector<Cell> out;
  out.reserve(4);
  for (const Cell& d : kNeighborOffsets) {
    Cell n{v.x + d.x, v.y + d.y};
    if (map.is_free(n)) out.push_back(n);
  }
  return out;
}

/// Graph distances from a set of sources; unreachable cells have no entry.
class DistanceField {
 public:
  static constexpr int kUnreachable = -1;

  DistanceField() = default;
  DistanceField(const GridMap& map, std::vector<int> dist) : width_(map.width()), dist_(std::move(dist)) {}

  std::optional<int> at(Cell c) const {
    if (c.x < 0 || c.y < 0 || c.x >= width_) return std::nullopt;
    auto i = static_cast<std::size_t>(c.y * width_ + c.x);
    if (i >= dist_.size() || dist_[i] == kUnreachable) return std::nullopt;
    return dist_[i];
  }
  bool contains(Cell c) const { return at(c).has_value(); }
  /// Distance or `fallback` when unreachable.
  int get_or(Cell c, int fallback) const { return at(c).value_or(fallback); }

  int reachable_count() const {
    return static_cast<int>(std::count_if(dist_.begin(), dist_.end(), [](int d) { return d != kUnreachable; }));
  }
  const std::vector<int>& raw() const { return dist_; }

 private:
  int width_ = 0;
  std::vector<int> dist_;
};

/// Multi-source BFS over free cells that avoids `forbidden` (sources are always expanded).
inline DistanceField bfs_distances(const GridMap& map, std::span<const Cell> sources,
                                   const CellMask& forbidden = {}) {
  std::vector<int> dist(static_cast<std::size_t>(map.cell_count()), DistanceField::kUnreachable);
  std::vector<int> queue;
  queue.reserve(static_cast<std::size_t>(map.cell_count()));
  for (const Cell& s : sources) {
    if (!map.is_free(s)) continue;
    int i = map.index(s);
    if (dist[i] != DistanceField::kUnreachable) continue;
    dist[i] = 0;
    queue.push_back(i);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Cell v = map.cell(queue[head]);
    int dv = dist[queue[head]];
    for (const Cell& d : kNeighborOffsets) {
      Cell n{v.x + d.x, v.y + d.y};
      if (!map.is_free(n) || forbidden.contains(n)) continue;
      int ni = map.index(n);
      if (dist[ni] != DistanceField::kUnreachable) continue;
      dist[ni] = dv + 1;
      queue.push_back(ni);
    }
  }
  return DistanceField(map, std::move(dist));
}

inline DistanceField bfs_distances(const GridMap& map, Cell source) {
  detail::require_free(map, source, "source");
  return bfs_distances(map, std::span<const Cell>(&source, 1));
}

/// Minimum-length path from `from` to `to` avoiding `forbidden`. `from` is never checked
/// against `forbidden`; a forbidden `to` makes the path absent. Ties between equal-length
/// paths resolve by BFS discovery under the fixed neighbor order.
inline std::optional<Path> shortest_path(const GridMap& map, Cell from, Cell to,
                                         const CellMask& forbidden = {}) {
  detail::require_free(map, from, "path start");
  detail::require_free(map, to, "path end");
  if (from == to) return Path{from};
  if (forbidden.contains(to)) return std::nullopt;

  const int goal = map.index(to);
  std::vector<int> parent(static_cast<std::size_t>(map.cell_count()), -1);
  std::vector<int> queue;
  queue.reserve(static_cast<std::size_t>(map.cell_count()));
  const int start = map.index(from);
  parent[start] = start;
  queue.push_back(start);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Cell v = map.cell(queue[head]);
    for (const Cell& d : kNeighborOffsets) {
      Cell n{v.x + d.x, v.y + d.y};
      if (!map.is_free(n) || forbidden.contains(n)) continue;
      int ni = map.index(n);
      if (parent[ni] != -1) continue;
      parent[ni] = queue[head];
      if (ni == goal) {
        Path path;
        for (int at = goal; at != start; at = parent[at]) path.push_back(map.cell(at));
        path.push_back(from);
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(ni);
    }
  }
  return std::nullopt;
}

// Map file format: "<width> <height>\n" then `height` rows of '.'/'#'.

inline GridMap parse_map(std::istream& in) {
  int width = 0, height = 0;
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("map: missing header line");
  {
    std::istringstream hs(header);
    if (!(hs >> width >> height) || width <= 0 || height <= 0)
      throw std::runtime_error("map: malformed header '" + header + "'");
  }
  std::vector<Cell> obstacles;
  std::string row;
  for (int y = 0; y < height; ++y) {
    if (!std::getline(in, row)) throw std::runtime_error("map: expected " + std::to_string(height) + " rows");
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (static_cast<int>(row.size()) != width)
      throw std::runtime_error("map: row " + std::to_string(y) + " has length " + std::to_string(row.size()));
    for (int x = 0; x < width; ++x) {
      if (row[x] == '#') obstacles.push_back({x, y});
      else if (row[x] != '.') throw std::runtime_error("map: unexpected character in row " + std::to_string(y));
    }
  }
  return GridMap(width, height, obstacles);
}

inline GridMap parse_map(const std::string& text) {
  std::istringstream in(text);
  return parse_map(in);
}

inline std::string format_map(const GridMap& map) {
  std::string out = std::to_string(map.width()) + ' ' + std::to_string(map.height()) + '\n';
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) out.push_back(map.is_obstacle({x, y}) ? '#' : '.');
    out.push_back('\n');
  }
  return out;
}

}  // namespace appc
