#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace weldlab {

using Point = Eigen::Vector2d;

/// Closed, simple, positively oriented polyline. The closing segment from
/// the last vertex back to the first is implicit.
class JordanCurve {
 public:
  JordanCurve() = default;

  /// Validates simplicity and area. Clockwise input is reversed (feature
  /// indices are remapped).
  explicit JordanCurve(Eigen::Matrix2Xd vertices, std::vector<int> features = {});

  int size() const { return static_cast<int>(vertices_.cols()); }
  const Eigen::Matrix2Xd& vertices() const { return vertices_; }
  Point vertex(int i) const { return vertices_.col(wrap(i)); }
  int wrap(int i) const {
    const int n = size();
    return ((i % n) + n) % n;
  }

  /// Marked vertices (cusp tips, corners).
  const std::vector<int>& features() const { return features_; }

  double signed_area() const;
  double perimeter() const { return arclength_.back(); }
  /// Arc length from vertex 0 to vertex i; entry n is the perimeter.
  const std::vector<double>& arclength() const { return arclength_; }
  /// Point at arc-length parameter s (taken modulo the perimeter).
  Point at_arclength(double s) const;

  double diameter() const;
  /// Diameter of the closed sub-polyline from vertex i to vertex j walking
  /// forward (both endpoints included).
  double arc_diameter(int i, int j) const;

  bool contains(const Point& p) const;  // even-odd rule
  /// Distance from p to the polyline, with the nearest segment index.
  double distance(const Point& p, int* segment = nullptr) const;

  Eigen::AlignedBox2d bounding_box() const;

 private:
  Eigen::Matrix2Xd vertices_;
  std::vector<int> features_;
  std::vector<double> arclength_;
};

double signed_area(const Eigen::Matrix2Xd& polygon);

/// True when no two non-adjacent segments of the closed polyline meet.
/// Sweep over segments sorted by min x, testing against the active set.
bool is_simple(const Eigen::Matrix2Xd& polygon);

/// Diameter of a point set: convex hull plus rotating calipers.
double point_set_diameter(const Eigen::Ref<const Eigen::Matrix2Xd>& points);

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d);

enum class DomainFamily { disk, ellipse, square, interior_cusp, exterior_cusp };

std::string_view to_string(DomainFamily family);
DomainFamily domain_family_from_string(std::string_view name);

struct DomainSpec {
  DomainFamily family = DomainFamily::disk;
  double a = 1.0;  // ellipse semi-axis / unused
  double b = 1.0;
  double s = 0.5;  // cusp exponent
  double kappa = 0.5;  // cusp width factor in y = kappa x^{1/s}
};

/// Test zoo of Jordan domains.
///
///   disk            regular n-gon inscribed in the unit circle
///   ellipse         n-gon on x^2/a^2 + y^2/b^2 = 1
///   square          [-1/2, 1/2]^2, vertices equally spaced in arc length
///   interior_cusp   unit disk minus the horn |y| <= kappa x^{1/s}, x >= 0;
///                   the tip at the origin points into the domain
///   exterior_cusp   disk of radius 1 centred at (3/2, 0) plus the horn
///                   |y| <= kappa x^{1/s}, 0 <= x <= 1/2 + ...; the tip at
///                   the origin points into the complement
///
/// Cusp flanks place vertices at x = X (k/m)^2 so the tip is resolved; the
/// tip is recorded as a feature vertex.
JordanCurve make_domain(const DomainSpec& spec, int n_vertices);

/// Vertex CSV "x,y" with optional header row; the curve is closed implicitly.
JordanCurve read_curve_csv(std::istream& in);
JordanCurve read_curve_csv(const std::string& path);
void write_curve_csv(std::ostream& out, const JordanCurve& curve);

}  // namespace weldlab
