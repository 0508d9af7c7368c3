#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "weldlab/control_function.hpp"
#include "weldlab/jordan_curve.hpp"

namespace weldlab {

/// Boundary data per polyline segment: a Dirichlet value or nullopt for an
/// insulating (Neumann) segment.
using SegmentValues = std::vector<std::optional<double>>;

/// Domain = inside `outer` and outside every hole.
struct MixedProblem {
  JordanCurve outer;
  SegmentValues outer_values;
  std::vector<JordanCurve> holes;
  std::vector<SegmentValues> hole_values;
  int grid = 256;  // nodes across the longer side of the outer bounding box
};

SegmentValues uniform_values(const JordanCurve& curve, std::optional<double> value);

struct SolverOptions {
  double tolerance = 1e-10;  // relative residual |Au - b| / |b|
  int max_iterations = 20000;
};

/// Node graph of the 5-point stencil. Interior edges carry unit weight and an
/// optional jump; edges leaving the domain through a Dirichlet segment at
/// fraction theta of their length become cut edges of weight 1/theta.
struct StencilGraph {
  struct Edge {
    int a, b;
    double jump;  // energy term (u_b - u_a - jump)^2
  };
  struct CutEdge {
    int a;
    double weight;
    double value;
  };
  int nx = 0, ny = 0;
  double x0 = 0.0, y0 = 0.0, h = 1.0;
  std::vector<int> node_of_cell;  // -1 outside the domain
  std::vector<int> cell_of_node;
  std::vector<Edge> edges;
  std::vector<CutEdge> cuts;
  int nodes() const { return static_cast<int>(cell_of_node.size()); }
  Point position(int node) const;
};

struct PotentialSolution {
  StencilGraph graph;
  Eigen::VectorXd u;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  /// Discrete Dirichlet energy of any nodal field on the same graph.
  double energy_of(const Eigen::VectorXd& field) const;
};

StencilGraph build_graph(const MixedProblem& problem);

/// Minimises the discrete Dirichlet energy with conjugate gradients
/// (incomplete Cholesky preconditioner). When `cut_origin` is set every
/// edge crossing the ray {origin + (t, 0), t > 0} upward carries a unit
/// jump, and one node is pinned to 0 if no Dirichlet data is present.
/// Throws std::runtime_error("solver did not converge ...") past the cap.
PotentialSolution solve_potential(const MixedProblem& problem, std::optional<Point> cut_origin = std::nullopt,
                                  const SolverOptions& opts = {});

/// Minimum over grid paths from the value-0 boundary to the value-1 boundary
/// of the sum of |du| along the path (Dijkstra). The metric |grad u| is
/// admissible for the connecting family iff this is >= 1.
double metric_min_length(const PotentialSolution& sol);

struct RingProblem {
  JordanCurve inner;
  JordanCurve outer;
  int grid = 256;
};

struct RingModulus {
  double connecting = 0.0;             // D(u), u = 0 on inner, 1 on outer
  double separating = 0.0;             // D(v), v the multivalued conjugate with unit period
  double separating_reciprocal = 0.0;  // 1 / D(u)
  double residual = 0.0;
  int grid = 0;
  double cell = 0.0;
};

/// Requires the gap between the curves to span >= 8 cells.
RingModulus ring_modulus(const RingProblem& p, const SolverOptions& opts = {});

/// Two-sided log bounds for the family joining E to F inside B(centre, radius).
struct ContinuaBounds {
  double t = 0.0;       // dist(E, F) / min(diam E, diam F)
  double kernel = 0.0;  // 1 / log(1 + t), carried with C0 and C0^{-1}
  double numeric = 0.0;
  double empirical_c0 = 0.0;  // max(numeric / kernel, kernel / numeric)
};

double curve_distance(const JordanCurve& a, const JordanCurve& b);

ContinuaBounds continua_modulus_bounds(const JordanCurve& e, const JordanCurve& f, const Point& centre,
                                       double radius, int grid = 256, const SolverOptions& opts = {});

/// Boundary arc as a forward vertex range [first, last].
struct Arc {
  int first = 0;
  int last = 0;
};

struct Lemma36Report {
  double modulus = 0.0;   // numeric modulus of curves joining the arcs in the domain
  double distance = 0.0;  // d(alpha_1, alpha_2)
  double min_diam = 0.0;
  double diam_bound = 0.0;  // psi(psi(d))
  double slack = 0.0;       // min_diam / diam_bound
  bool holds = false;       // slack <= 2
  double exterior_kernel = 0.0;  // log^{-1}(1 + psi^{-1}psi^{-1}(m) / m), times C0^{-1}
};

Lemma36Report lemma36_check(const JordanCurve& curve, const Arc& a1, const Arc& a2, const ControlFunction& psi,
                            int grid = 256, const SolverOptions& opts = {});

void to_json(nlohmann::json& j, const RingModulus& m);
void to_json(nlohmann::json& j, const ContinuaBounds& b);
void to_json(nlohmann::json& j, const Lemma36Report& r);

}  // namespace weldlab
