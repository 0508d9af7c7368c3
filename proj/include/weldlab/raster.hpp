#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "weldlab/jordan_curve.hpp"

namespace weldlab {

enum class Side { interior, exterior };

std::string_view to_string(Side side);
Side side_from_string(std::string_view name);

/// Cell-centred uniform grid over a box; `mask` marks cells whose centre
/// lies on the chosen side of a curve.
struct Raster {
  double x0 = 0.0, y0 = 0.0, h = 1.0;
  int nx = 0, ny = 0;
  std::vector<std::uint8_t> mask;

  int index(int i, int j) const { return j * nx + i; }
  int col(int idx) const { return idx % nx; }
  int row(int idx) const { return idx / nx; }
  Point center(int idx) const { return {x0 + (col(idx) + 0.5) * h, y0 + (row(idx) + 0.5) * h}; }
  bool in(int idx) const { return mask[idx] != 0; }
  /// Cell containing p, if inside the box.
  std::optional<int> cell_of(const Point& p) const;
  int size() const { return nx * ny; }
};

/// Even-odd scanline mask of cell centres (x0 + (i + 1/2) h, y0 + (j + 1/2) h)
/// strictly inside the curve.
std::vector<std::uint8_t> inside_mask(const JordanCurve& curve, double x0, double y0, double h, int nx, int ny);

/// Scanline even-odd fill. `res` cells across the longer side of the curve's
/// bounding box enlarged by `margin` times its size on every side.
Raster rasterize(const JordanCurve& curve, Side side, int res, double margin = 0.25);

/// 8-connected breadth-first search from `from` to `to` through cells that
/// are in the mask and satisfy `allowed`.
bool grid_connected(const Raster& grid, int from, int to, const std::function<bool(int)>& allowed);

/// Cells of the mask within the open ball B(z, r).
std::vector<int> cells_in_ball(const Raster& grid, const Point& z, double r);

/// Smallest rho such that all mask cells in B(z, r) lie in one 8-component
/// of mask ∩ B(z, rho). Returns r when at most one cell is present and
/// +inf when they are never joined.
double lc1_inflation(const Raster& grid, const Point& z, double r);

/// Largest rho such that all mask cells outside B(z, r) lie in one
/// 8-component of mask minus B(z, rho). Returns r when at most one cell is
/// present and 0 when they are never joined.
double lc2_deflation(const Raster& grid, const Point& z, double r);

}  // namespace weldlab
