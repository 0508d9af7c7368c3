#include "weldlab/raster.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

namespace weldlab {

namespace {

constexpr int kDi[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDj[8] = {0, 0, 1, -1, 1, -1, 1, -1};

template <class Visit>
void for_neighbours(const Raster& g, int idx, Visit visit) {
  const int i = g.col(idx), j = g.row(idx);
  for (int k = 0; k < 8; ++k) {
    const int a = i + kDi[k], b = j + kDj[k];
    if (a < 0 || b < 0 || a >= g.nx || b >= g.ny) continue;
    visit(g.index(a, b));
  }
}

}  // namespace

std::string_view to_string(Side side) { return side == Side::interior ? "interior" : "exterior"; }

Side side_from_string(std::string_view name) {
  if (name == "interior") return Side::interior;
  if (name == "exterior") return Side::exterior;
  throw std::invalid_argument("unknown side: " + std::string(name));
}

std::optional<int> Raster::cell_of(const Point& p) const {
  const int i = static_cast<int>(std::floor((p.x() - x0) / h));
  const int j = static_cast<int>(std::floor((p.y() - y0) / h));
  if (i < 0 || j < 0 || i >= nx || j >= ny) return std::nullopt;
  return index(i, j);
}

std::vector<std::uint8_t> inside_mask(const JordanCurve& curve, double x0, double y0, double h, int nx, int ny) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(nx) * ny, 0);
  const auto& v = curve.vertices();
  const int n = curve.size();
  std::vector<double> xs;
  for (int j = 0; j < ny; ++j) {
    const double y = y0 + (j + 0.5) * h;
    xs.clear();
    for (int a = 0, b = n - 1; a < n; b = a++) {
      const double ya = v(1, a), yb = v(1, b);
      if ((ya > y) != (yb > y)) xs.push_back(v(0, b) + (y - yb) / (ya - yb) * (v(0, a) - v(0, b)));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int i0 = std::max(0, static_cast<int>(std::ceil((xs[k] - x0) / h - 0.5)));
      const int i1 = std::min(nx - 1, static_cast<int>(std::floor((xs[k + 1] - x0) / h - 0.5)));
      for (int i = i0; i <= i1; ++i) {
        const double cx = x0 + (i + 0.5) * h;
        if (cx > xs[k] && cx < xs[k + 1]) mask[static_cast<std::size_t>(j) * nx + i] = 1;
      }
    }
  }
  return mask;
}

Raster rasterize(const JordanCurve& curve, Side side, int res, double margin) {
  if (res < 16) throw std::invalid_argument("rasterize: resolution must be >= 16");
  const auto box = curve.bounding_box();
  const Eigen::Vector2d size = box.sizes();
  const double extent = std::max(size.x(), size.y());
  const Eigen::Vector2d lo = box.min() - Eigen::Vector2d::Constant(margin * extent);
  const Eigen::Vector2d span = size + Eigen::Vector2d::Constant(2.0 * margin * extent);

  Raster g;
  g.h = std::max(span.x(), span.y()) / res;
  g.nx = static_cast<int>(std::ceil(span.x() / g.h));
  g.ny = static_cast<int>(std::ceil(span.y() / g.h));
  g.x0 = lo.x();
  g.y0 = lo.y();
  g.mask = inside_mask(curve, g.x0, g.y0, g.h, g.nx, g.ny);
  if (side == Side::exterior) {
    for (auto& c : g.mask) c = c ? 0 : 1;
  }
  return g;
}

bool grid_connected(const Raster& grid, int from, int to, const std::function<bool(int)>& allowed) {
  if (!grid.in(from) || !grid.in(to) || !allowed(from) || !allowed(to)) return false;
  if (from == to) return true;
  std::vector<std::uint8_t> seen(grid.size(), 0);
  std::deque<int> queue{from};
  seen[from] = 1;
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    bool found = false;
    for_neighbours(grid, c, [&](int nb) {
      if (found || seen[nb] || !grid.in(nb) || !allowed(nb)) return;
      seen[nb] = 1;
      if (nb == to) found = true;
      queue.push_back(nb);
    });
    if (found) return true;
  }
  return false;
}

std::vector<int> cells_in_ball(const Raster& grid, const Point& z, double r) {
  std::vector<int> out;
  const int i0 = std::max(0, static_cast<int>(std::floor((z.x() - r - grid.x0) / grid.h)));
  const int i1 = std::min(grid.nx - 1, static_cast<int>(std::ceil((z.x() + r - grid.x0) / grid.h)));
  const int j0 = std::max(0, static_cast<int>(std::floor((z.y() - r - grid.y0) / grid.h)));
  const int j1 = std::min(grid.ny - 1, static_cast<int>(std::ceil((z.y() + r - grid.y0) / grid.h)));
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const int idx = grid.index(i, j);
      if (grid.in(idx) && (grid.center(idx) - z).norm() < r) out.push_back(idx);
    }
  }
  return out;
}

double lc1_inflation(const Raster& grid, const Point& z, double r) {
  const std::vector<int> targets = cells_in_ball(grid, z, r);
  if (targets.size() < 2) return r;
  // Minimax Dijkstra: level(c) = min over paths of the largest |cell - z|.
  std::vector<double> level(grid.size(), std::numeric_limits<double>::infinity());
  std::vector<std::uint8_t> is_target(grid.size(), 0);
  for (int t : targets) is_target[t] = 1;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  const int seed = targets.front();
  level[seed] = (grid.center(seed) - z).norm();
  heap.emplace(level[seed], seed);
  std::size_t remaining = targets.size();
  double worst = 0.0;
  while (!heap.empty() && remaining > 0) {
    const auto [lv, c] = heap.top();
    heap.pop();
    if (lv > level[c]) continue;
    if (is_target[c]) {
      is_target[c] = 0;
      --remaining;
      worst = std::max(worst, lv);
    }
    for_neighbours(grid, c, [&](int nb) {
      if (!grid.in(nb)) return;
      const double cand = std::max(lv, (grid.center(nb) - z).norm());
      if (cand < level[nb]) {
        level[nb] = cand;
        heap.emplace(cand, nb);
      }
    });
  }
  if (remaining > 0) return std::numeric_limits<double>::infinity();
  // Cells are joined inside any open ball strictly larger than the worst level.
  return std::max(r, worst);
}

double lc2_deflation(const Raster& grid, const Point& z, double r) {
  std::vector<int> targets;
  for (int c = 0; c < grid.size(); ++c) {
    if (grid.in(c) && (grid.center(c) - z).norm() >= r) targets.push_back(c);
  }
  if (targets.size() < 2) return r;
  // Maximin Dijkstra: level(c) = max over paths of the smallest |cell - z|.
  std::vector<double> level(grid.size(), -1.0);
  std::vector<std::uint8_t> is_target(grid.size(), 0);
  for (int t : targets) is_target[t] = 1;
  using Item = std::pair<double, int>;
  std::priority_queue<Item> heap;
  int seed = targets.front();
  for (int t : targets) {
    if ((grid.center(t) - z).norm() > (grid.center(seed) - z).norm()) seed = t;
  }
  level[seed] = (grid.center(seed) - z).norm();
  heap.emplace(level[seed], seed);
  std::size_t remaining = targets.size();
  double worst = std::numeric_limits<double>::infinity();
  while (!heap.empty() && remaining > 0) {
    const auto [lv, c] = heap.top();
    heap.pop();
    if (lv < level[c]) continue;
    if (is_target[c]) {
      is_target[c] = 0;
      --remaining;
      worst = std::min(worst, lv);
    }
    for_neighbours(grid, c, [&](int nb) {
      if (!grid.in(nb)) return;
      const double cand = std::min(lv, (grid.center(nb) - z).norm());
      if (cand > level[nb]) {
        level[nb] = cand;
        heap.emplace(cand, nb);
      }
    });
  }
  if (remaining > 0) return 0.0;
  return std::min(r, worst);
}

}  // namespace weldlab
