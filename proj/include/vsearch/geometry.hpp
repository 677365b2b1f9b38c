#pragma once

// Planar points, grid indexing and supercover segment traversal.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace vsearch {

struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }
inline bool is_finite(const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); }

/// Integer cell coordinate: `col` along x, `row` along y.
struct Cell {
  int col{0};
  int row{0};
  friend constexpr bool operator==(const Cell&, const Cell&) = default;
};

/// Geometry of a row-major grid covering [0, cols*cell_size] x [0, rows*cell_size].
struct GridShape {
  int cols{1};
  int rows{1};
  double cell_size{1.0};

  std::size_t cell_count() const { return static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows); }
  double width_m() const { return cols * cell_size; }
  double height_m() const { return rows * cell_size; }

  bool contains(const Cell& c) const { return c.col >= 0 && c.row >= 0 && c.col < cols && c.row < rows; }
  bool contains(const Vec2& p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= width_m() && p.y <= height_m();
  }

  std::size_t index(const Cell& c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c.col);
  }
  Cell cell_at(std::size_t idx) const {
    return Cell{static_cast<int>(idx % static_cast<std::size_t>(cols)),
                static_cast<int>(idx / static_cast<std::size_t>(cols))};
  }

  /// Cell containing `p`; points on the far border belong to the last row/column.
  Cell cell_of(const Vec2& p) const {
    int c = static_cast<int>(std::floor(p.x / cell_size));
    int r = static_cast<int>(std::floor(p.y / cell_size));
    return Cell{std::clamp(c, 0, cols - 1), std::clamp(r, 0, rows - 1)};
  }

  Vec2 center(const Cell& c) const { return Vec2{(c.col + 0.5) * cell_size, (c.row + 0.5) * cell_size}; }
  Vec2 center(std::size_t idx) const { return center(cell_at(idx)); }

  Vec2 clamp(const Vec2& p) const {
    return Vec2{std::clamp(p.x, 0.0, width_m()), std::clamp(p.y, 0.0, height_m())};
  }

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

namespace detail {
inline constexpr double kCornerEps = 1e-12;
}

/// Walks every grid cell the segment `from -> from + dir * t_end` passes through, in order of
/// entry. When the segment crosses a grid corner exactly, both side cells are reported before the
/// diagonal one (classic supercover). Cells outside the grid end the walk.
///
/// `visit(Cell)` returns false to stop early. Segment parameters are in meters.
template <typename Visit>
void walk_supercover(const GridShape& grid, Vec2 from, Vec2 dir, double t_end, Visit&& visit) {
  const double ox = from.x / grid.cell_size;
  const double oy = from.y / grid.cell_size;
  const double dx = dir.x / grid.cell_size;
  const double dy = dir.y / grid.cell_size;

  Cell cur = grid.cell_of(from);
  const int step_x = dx > 0.0 ? 1 : (dx < 0.0 ? -1 : 0);
  const int step_y = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);
  constexpr double inf = std::numeric_limits<double>::infinity();

  double t_max_x = inf, t_delta_x = inf;
  if (step_x != 0) {
    const double boundary = step_x > 0 ? cur.col + 1.0 : static_cast<double>(cur.col);
    t_max_x = (boundary - ox) / dx;
    t_delta_x = 1.0 / std::abs(dx);
  }
  double t_max_y = inf, t_delta_y = inf;
  if (step_y != 0) {
    const double boundary = step_y > 0 ? cur.row + 1.0 : static_cast<double>(cur.row);
    t_max_y = (boundary - oy) / dy;
    t_delta_y = 1.0 / std::abs(dy);
  }

  if (!visit(cur)) return;
  for (;;) {
    const double t_next = std::min(t_max_x, t_max_y);
    if (!(t_next < t_end)) return;
    const double tol = detail::kCornerEps * std::max(1.0, t_next);
    if (std::abs(t_max_x - t_max_y) <= tol) {
      const Cell side_x{cur.col + step_x, cur.row};
      const Cell side_y{cur.col, cur.row + step_y};
      if (grid.contains(side_x) && !visit(side_x)) return;
      if (grid.contains(side_y) && !visit(side_y)) return;
      cur = Cell{cur.col + step_x, cur.row + step_y};
      t_max_x += t_delta_x;
      t_max_y += t_delta_y;
    } else if (t_max_x < t_max_y) {
      cur.col += step_x;
      t_max_x += t_delta_x;
    } else {
      cur.row += step_y;
      t_max_y += t_delta_y;
    }
    if (!grid.contains(cur)) return;
    if (!visit(cur)) return;
  }
}

/// Cells crossed by the closed segment a -> b.
inline std::vector<Cell> segment_cells(const GridShape& grid, const Vec2& a, const Vec2& b) {
  std::vector<Cell> out;
  walk_supercover(grid, a, b - a, 1.0, [&](const Cell& c) {
    out.push_back(c);
    return true;
  });
  return out;
}

/// Parameter at which the ray from `origin` along `dir` leaves the grid rectangle.
inline double exit_parameter(const GridShape& grid, const Vec2& origin, const Vec2& dir) {
  double t = std::numeric_limits<double>::infinity();
  if (dir.x > 0.0) t = std::min(t, (grid.width_m() - origin.x) / dir.x);
  if (dir.x < 0.0) t = std::min(t, -origin.x / dir.x);
  if (dir.y > 0.0) t = std::min(t, (grid.height_m() - origin.y) / dir.y);
  if (dir.y < 0.0) t = std::min(t, -origin.y / dir.y);
  return std::max(t, 0.0);
}

}  // namespace vsearch
