#include "weldlab/jordan_curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace weldlab {

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool on_segment(const Point& a, const Point& b, const Point& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

// Root of f on [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.
template <class F>
double bisect(F f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
  const int d1 = sign(cross(c, d, a));
  const int d2 = sign(cross(c, d, b));
  const int d3 = sign(cross(a, b, c));
  const int d4 = sign(cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(c, d, a)) return true;
  if (d2 == 0 && on_segment(c, d, b)) return true;
  if (d3 == 0 && on_segment(a, b, c)) return true;
  if (d4 == 0 && on_segment(a, b, d)) return true;
  return false;
}

double signed_area(const Eigen::Matrix2Xd& polygon) {
  const Eigen::Index n = polygon.cols();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = (i + 1) % n;
    acc += polygon(0, i) * polygon(1, j) - polygon(0, j) * polygon(1, i);
  }
  return 0.5 * acc;
}

bool is_simple(const Eigen::Matrix2Xd& polygon) {
  const int n = static_cast<int>(polygon.cols());
  if (n < 3) return false;
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  auto min_x = [&](int i) { return std::min(polygon(0, i), polygon(0, (i + 1) % n)); };
  auto max_x = [&](int i) { return std::max(polygon(0, i), polygon(0, (i + 1) % n)); };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return min_x(a) < min_x(b); });

  std::vector<int> active;
  for (int s : order) {
    const double x = min_x(s);
    active.erase(std::remove_if(active.begin(), active.end(), [&](int t) { return max_x(t) < x; }),
                 active.end());
    const Point a = polygon.col(s), b = polygon.col((s + 1) % n);
    for (int t : active) {
      const bool adjacent = (t + 1) % n == s || (s + 1) % n == t;
      const Point c = polygon.col(t), d = polygon.col((t + 1) % n);
      if (adjacent) {
        // Shared endpoint only; reject folding back along the same line.
        const Point shared = (t + 1) % n == s ? a : b;
        const Point p = (t + 1) % n == s ? b : a;
        const Point q = (t + 1) % n == s ? c : d;
        if (std::abs(cross(shared, p, q)) == 0.0 && (p - shared).dot(q - shared) > 0.0) return false;
        if (n == 3) continue;
        continue;
      }
      if (segments_intersect(a, b, c, d)) return false;
    }
    active.push_back(s);
  }
  return true;
}

double point_set_diameter(const Eigen::Ref<const Eigen::Matrix2Xd>& points) {
  const Eigen::Index n = points.cols();
  if (n < 2) return 0.0;
  std::vector<Point> pts(n);
  for (Eigen::Index i = 0; i < n; ++i) pts[i] = points.col(i);
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() == 1) return 0.0;
  if (pts.size() == 2) return (pts[0] - pts[1]).norm();

  // Andrew's monotone chain.
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  const std::size_t m = hull.size();
  if (m == 2) return (hull[0] - hull[1]).norm();

  double best = 0.0;
  std::size_t j = 1;
  for (std::size_t i = 0; i < m; ++i) {
    const Point& a = hull[i];
    const Point& b = hull[(i + 1) % m];
    while (std::abs(cross(a, b, hull[(j + 1) % m])) > std::abs(cross(a, b, hull[j]))) j = (j + 1) % m;
    best = std::max({best, (a - hull[j]).norm(), (b - hull[j]).norm()});
  }
  return best;
}

JordanCurve::JordanCurve(Eigen::Matrix2Xd vertices, std::vector<int> features)
    : vertices_(std::move(vertices)), features_(std::move(features)) {
  const int n = size();
  if (n < 3) throw std::invalid_argument("Jordan curve needs at least 3 vertices");
  if (!vertices_.allFinite()) throw std::invalid_argument("Jordan curve has non-finite vertices");
  for (int f : features_) {
    if (f < 0 || f >= n) throw std::invalid_argument("feature index out of range");
  }
  if (!is_simple(vertices_)) throw std::invalid_argument("polyline self-intersects; increase n");
  if (weldlab::signed_area(vertices_) < 0.0) {
    vertices_ = vertices_.rowwise().reverse().eval();
    for (int& f : features_) f = n - 1 - f;
  }
  if (!(weldlab::signed_area(vertices_) > 0.0)) throw std::invalid_argument("Jordan curve has zero area");
  arclength_.assign(n + 1, 0.0);
  for (int i = 0; i < n; ++i) arclength_[i + 1] = arclength_[i] + (vertex(i + 1) - vertex(i)).norm();
}

double JordanCurve::signed_area() const { return weldlab::signed_area(vertices_); }

Point JordanCurve::at_arclength(double s) const {
  const double len = perimeter();
  s = std::fmod(s, len);
  if (s < 0.0) s += len;
  auto it = std::upper_bound(arclength_.begin(), arclength_.end(), s);
  int i = static_cast<int>(it - arclength_.begin()) - 1;
  i = std::clamp(i, 0, size() - 1);
  const double seg = arclength_[i + 1] - arclength_[i];
  const double u = seg > 0.0 ? (s - arclength_[i]) / seg : 0.0;
  return vertex(i) + u * (vertex(i + 1) - vertex(i));
}

double JordanCurve::diameter() const { return point_set_diameter(vertices_); }

double JordanCurve::arc_diameter(int i, int j) const {
  const int n = size();
  i = wrap(i);
  j = wrap(j);
  const int count = ((j - i) % n + n) % n + 1;
  Eigen::Matrix2Xd pts(2, count);
  for (int k = 0; k < count; ++k) pts.col(k) = vertices_.col((i + k) % n);
  return point_set_diameter(pts);
}

bool JordanCurve::contains(const Point& p) const {
  const int n = size();
  bool inside = false;
  for (int i = 0, j = n - 1; i < n; j = i++) {
    const double yi = vertices_(1, i), yj = vertices_(1, j);
    if ((yi > p.y()) != (yj > p.y())) {
      const double x = vertices_(0, j) + (p.y() - yj) / (yi - yj) * (vertices_(0, i) - vertices_(0, j));
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double JordanCurve::distance(const Point& p, int* segment) const {
  double best = std::numeric_limits<double>::infinity();
  int arg = 0;
  for (int i = 0; i < size(); ++i) {
    const double d = segment_distance(p, vertex(i), vertex(i + 1));
    if (d < best) {
      best = d;
      arg = i;
    }
  }
  if (segment) *segment = arg;
  return best;
}

Eigen::AlignedBox2d JordanCurve::bounding_box() const {
  return Eigen::AlignedBox2d(vertices_.rowwise().minCoeff(), vertices_.rowwise().maxCoeff());
}

std::string_view to_string(DomainFamily family) {
  switch (family) {
    case DomainFamily::disk: return "disk";
    case DomainFamily::ellipse: return "ellipse";
    case DomainFamily::square: return "square";
    case DomainFamily::interior_cusp: return "interior_cusp";
    case DomainFamily::exterior_cusp: return "exterior_cusp";
  }
  return "unknown";
}

DomainFamily domain_family_from_string(std::string_view name) {
  for (auto f : {DomainFamily::disk, DomainFamily::ellipse, DomainFamily::square, DomainFamily::interior_cusp,
                 DomainFamily::exterior_cusp}) {
    if (to_string(f) == name) return f;
  }
  throw std::invalid_argument("unknown domain family: " + std::string(name));
}

JordanCurve make_domain(const DomainSpec& spec, int n) {
  if (n < 64) throw std::invalid_argument("make_domain: n_vertices must be >= 64");
  using std::numbers::pi;
  Eigen::Matrix2Xd v(2, n);
  std::vector<int> features;

  switch (spec.family) {
    case DomainFamily::disk:
    case DomainFamily::ellipse: {
      const double a = spec.family == DomainFamily::disk ? 1.0 : spec.a;
      const double b = spec.family == DomainFamily::disk ? 1.0 : spec.b;
      if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("ellipse semi-axes must be positive");
      for (int k = 0; k < n; ++k) {
        const double t = 2.0 * pi * k / n;
        v.col(k) << a * std::cos(t), b * std::sin(t);
      }
      break;
    }
    case DomainFamily::square: {
      const Point corners[4] = {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
      for (int k = 0; k < n; ++k) {
        const double s = 4.0 * k / n;
        const int side = std::min(3, static_cast<int>(s));
        const double u = s - side;
        v.col(k) = corners[side] + u * (corners[(side + 1) % 4] - corners[side]);
      }
      for (int c = 0; c < 4; ++c) {
        if ((c * n) % 4 == 0) features.push_back(c * n / 4);
      }
      break;
    }
    case DomainFamily::interior_cusp:
    case DomainFamily::exterior_cusp: {
      const double s = spec.s, kappa = spec.kappa;
      if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("cusp exponent s must lie in (0, 1)");
      if (!(kappa > 0.0)) throw std::invalid_argument("cusp kappa must be positive");
      auto flank = [&](double x) { return kappa * std::pow(x, 1.0 / s); };
      const bool interior = spec.family == DomainFamily::interior_cusp;
      const Point centre = interior ? Point(0.0, 0.0) : Point(1.5, 0.0);
      auto g = [&](double x) {
        const double y = flank(x);
        return (x - centre.x()) * (x - centre.x()) + y * y - 1.0;
      };
      // interior: g(0) < 0, grows past the circle; exterior: g(0) > 0 until the disk is reached.
      double hi = 0.0;
      const double step = 1e-3;
      while ((g(hi + step) > 0.0) != interior) {
        hi += step;
        if (hi > 3.0) throw std::invalid_argument("cusp flank does not meet the disk");
      }
      const double x_end = bisect(g, hi, hi + step);
      const double y_end = flank(x_end);

      const int m = n / 4;
      const int arc_inner = n - 1 - 2 * m;
      const double a0 = std::atan2(y_end, x_end - centre.x());
      int idx = 0;
      v.col(idx++) << 0.0, 0.0;
      features.push_back(0);
      std::vector<Point> upper(m);
      for (int k = 1; k <= m; ++k) {
        const double u = static_cast<double>(k) / m;
        const double x = k == m ? x_end : x_end * u * u;
        upper[k - 1] = Point(x, flank(x));
      }
      if (interior) {
        // Upper flank outward, CCW arc over the top, lower flank inward.
        for (int k = 0; k < m; ++k) v.col(idx++) = upper[k];
        for (int j = 1; j <= arc_inner; ++j) {
          const double t = a0 + (2.0 * pi - 2.0 * a0) * j / (arc_inner + 1);
          v.col(idx++) = centre + Point(std::cos(t), std::sin(t));
        }
        for (int k = m - 1; k >= 0; --k) v.col(idx++) = Point(upper[k].x(), -upper[k].y());
      } else {
        // Lower flank outward, CCW arc round the far side, upper flank inward.
        for (int k = 0; k < m; ++k) v.col(idx++) = Point(upper[k].x(), -upper[k].y());
        // (x_end, -y_end) sits at angle -a0 about the centre; sweep up through angle 0.
        for (int j = 1; j <= arc_inner; ++j) {
          const double t = -a0 + 2.0 * a0 * j / (arc_inner + 1);
          v.col(idx++) = centre + Point(std::cos(t), std::sin(t));
        }
        for (int k = m - 1; k >= 0; --k) v.col(idx++) = upper[k];
      }
      break;
    }
  }
  try {
    return JordanCurve(std::move(v), std::move(features));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("make_domain: ") + e.what());
  }
}

JordanCurve read_curve_csv(std::istream& in) {
  std::vector<double> xs, ys;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x, y;
    if (!(row >> x >> y)) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw std::invalid_argument("malformed curve CSV row: " + line);
    }
    first = false;
    xs.push_back(x);
    ys.push_back(y);
  }
  Eigen::Matrix2Xd v(2, xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) v.col(i) << xs[i], ys[i];
  return JordanCurve(std::move(v));
}

JordanCurve read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open curve file: " + path);
  return read_curve_csv(in);
}

void write_curve_csv(std::ostream& out, const JordanCurve& curve) {
  out << "x,y\n" << std::setprecision(17);
  for (int i = 0; i < curve.size(); ++i) out << curve.vertex(i).x() << ',' << curve.vertex(i).y() << '\n';
}

}  // namespace weldlab
