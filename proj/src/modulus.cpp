#include "weldlab/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <stdexcept>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "weldlab/raster.hpp"

namespace weldlab {

namespace {

struct SegmentRef {
  const JordanCurve* curve;
  const SegmentValues* values;
  int index;
};

// Segment hash on the stencil grid for crossing queries.
class SegmentBuckets {
 public:
  SegmentBuckets(const StencilGraph& g) : g_(g), buckets_(static_cast<std::size_t>(g.nx) * g.ny) {}

  void add(const JordanCurve& curve, const SegmentValues& values) {
    for (int k = 0; k < curve.size(); ++k) {
      const Point a = curve.vertex(k), b = curve.vertex(k + 1);
      const int i0 = clamp_i(std::floor((std::min(a.x(), b.x()) - g_.x0) / g_.h) - 1);
      const int i1 = clamp_i(std::floor((std::max(a.x(), b.x()) - g_.x0) / g_.h) + 1);
      const int j0 = clamp_j(std::floor((std::min(a.y(), b.y()) - g_.y0) / g_.h) - 1);
      const int j1 = clamp_j(std::floor((std::max(a.y(), b.y()) - g_.y0) / g_.h) + 1);
      for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * g_.nx + i].push_back({&curve, &values, k});
      }
    }
  }

  // First crossing of p -> q (q one cell away) with any segment.
  std::optional<std::pair<double, const SegmentRef*>> first_crossing(const Point& p, const Point& q, int cell) const {
    double best = std::numeric_limits<double>::infinity();
    const SegmentRef* hit = nullptr;
    const Point r = q - p;
    for (const auto& ref : buckets_[cell]) {
      const Point a = ref.curve->vertex(ref.index), b = ref.curve->vertex(ref.index + 1);
      const Point s = b - a;
      const double den = r.x() * s.y() - r.y() * s.x();
      if (den == 0.0) continue;
      const Point ap = a - p;
      const double t = (ap.x() * s.y() - ap.y() * s.x()) / den;
      const double u = (ap.x() * r.y() - ap.y() * r.x()) / den;
      if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0 && t < best) {
        best = t;
        hit = &ref;
      }
    }
    if (!hit) return std::nullopt;
    return std::make_pair(best, hit);
  }

 private:
  int clamp_i(double v) const { return std::clamp(static_cast<int>(v), 0, g_.nx - 1); }
  int clamp_j(double v) const { return std::clamp(static_cast<int>(v), 0, g_.ny - 1); }

  const StencilGraph& g_;
  std::vector<std::vector<SegmentRef>> buckets_;
};

constexpr double kMinTheta = 1e-3;

}  // namespace

SegmentValues uniform_values(const JordanCurve& curve, std::optional<double> value) {
  return SegmentValues(curve.size(), value);
}

Point StencilGraph::position(int node) const {
  const int c = cell_of_node[node];
  return {x0 + (c % nx + 0.5) * h, y0 + (c / nx + 0.5) * h};
}

double PotentialSolution::energy_of(const Eigen::VectorXd& field) const {
  double e = 0.0;
  for (const auto& ed : graph.edges) {
    const double d = field(ed.b) - field(ed.a) - ed.jump;
    e += d * d;
  }
  for (const auto& c : graph.cuts) {
    const double d = field(c.a) - c.value;
    e += c.weight * d * d;
  }
  return e;
}

StencilGraph build_graph(const MixedProblem& problem) {
  if (problem.grid < 16) throw std::invalid_argument("modulus grid must be >= 16");
  if (static_cast<int>(problem.outer_values.size()) != problem.outer.size() ||
      problem.hole_values.size() != problem.holes.size()) {
    throw std::invalid_argument("boundary values do not match the curves");
  }
  for (std::size_t k = 0; k < problem.holes.size(); ++k) {
    if (static_cast<int>(problem.hole_values[k].size()) != problem.holes[k].size()) {
      throw std::invalid_argument("boundary values do not match the curves");
    }
  }
  StencilGraph g;
  const auto box = problem.outer.bounding_box();
  const Eigen::Vector2d size = box.sizes();
  g.h = std::max(size.x(), size.y()) / problem.grid;
  g.nx = static_cast<int>(std::ceil(size.x() / g.h)) + 4;
  g.ny = static_cast<int>(std::ceil(size.y() / g.h)) + 4;
  g.x0 = box.min().x() - 2.0 * g.h;
  g.y0 = box.min().y() - 2.0 * g.h;

  std::vector<std::uint8_t> mask = inside_mask(problem.outer, g.x0, g.y0, g.h, g.nx, g.ny);
  for (const auto& hole : problem.holes) {
    const auto hm = inside_mask(hole, g.x0, g.y0, g.h, g.nx, g.ny);
    for (std::size_t c = 0; c < mask.size(); ++c) mask[c] = mask[c] && !hm[c];
  }
  g.node_of_cell.assign(mask.size(), -1);
  for (std::size_t c = 0; c < mask.size(); ++c) {
    if (mask[c]) {
      g.node_of_cell[c] = static_cast<int>(g.cell_of_node.size());
      g.cell_of_node.push_back(static_cast<int>(c));
    }
  }
  if (g.cell_of_node.empty()) throw std::invalid_argument("modulus domain is empty on the grid");

  SegmentBuckets buckets(g);
  buckets.add(problem.outer, problem.outer_values);
  for (std::size_t k = 0; k < problem.holes.size(); ++k) buckets.add(problem.holes[k], problem.hole_values[k]);

  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};
  for (int node = 0; node < g.nodes(); ++node) {
    const int c = g.cell_of_node[node];
    const int i = c % g.nx, j = c / g.nx;
    const Point p = g.position(node);
    for (int k = 0; k < 4; ++k) {
      const int a = i + di[k], b = j + dj[k];
      const int nc = b * g.nx + a;  // margin guarantees a, b in range
      const int nb = g.node_of_cell[nc];
      const Point q(g.x0 + (a + 0.5) * g.h, g.y0 + (b + 0.5) * g.h);
      if (nb >= 0) {
        if (k != 0 && k != 2) continue;
        // A sliver of the complement thinner than a cell can separate two
        // inside nodes; the edge then becomes a cut edge on each side.
        const auto fwd = buckets.first_crossing(p, q, c);
        const auto bwd = fwd ? buckets.first_crossing(q, p, c) : std::nullopt;
        if (!fwd || !bwd) {
          g.edges.push_back({node, nb, 0.0});
          continue;
        }
        const auto va = (*fwd->second->values)[fwd->second->index];
        const auto vb = (*bwd->second->values)[bwd->second->index];
        if (va) g.cuts.push_back({node, 1.0 / std::max(fwd->first, kMinTheta), *va});
        if (vb) g.cuts.push_back({nb, 1.0 / std::max(bwd->first, kMinTheta), *vb});
        continue;
      }
      auto hit = buckets.first_crossing(p, q, c);
      if (!hit) hit = buckets.first_crossing(p, q, nc);
      std::optional<double> value;
      double theta = 0.5;
      if (hit) {
        theta = hit->first;
        value = (*hit->second->values)[hit->second->index];
      } else {
        // No segment found between the centres; use the nearest one.
        int seg = 0;
        double best = std::numeric_limits<double>::infinity();
        const SegmentValues* vals = &problem.outer_values;
        double d = problem.outer.distance(p, &seg);
        best = d;
        int best_seg = seg;
        for (std::size_t hk = 0; hk < problem.holes.size(); ++hk) {
          d = problem.holes[hk].distance(p, &seg);
          if (d < best) {
            best = d;
            best_seg = seg;
            vals = &problem.hole_values[hk];
          }
        }
        value = (*vals)[best_seg];
        theta = std::clamp(best / g.h, kMinTheta, 1.0);
      }
      if (value) g.cuts.push_back({node, 1.0 / std::max(theta, kMinTheta), *value});
    }
  }
  return g;
}

PotentialSolution solve_potential(const MixedProblem& problem, std::optional<Point> cut_origin,
                                  const SolverOptions& opts) {
  PotentialSolution sol;
  sol.graph = build_graph(problem);
  StencilGraph& g = sol.graph;
  if (cut_origin) {
    const Point o = *cut_origin;
    for (auto& e : g.edges) {
      const Point pa = g.position(e.a), pb = g.position(e.b);
      if (pa.x() == pb.x() && pa.x() > o.x() && pa.y() < o.y() && pb.y() >= o.y()) e.jump = -1.0;
    }
  }
  const int n = g.nodes();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * g.edges.size() + g.cuts.size() + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (const auto& e : g.edges) {
    trip.emplace_back(e.a, e.a, 1.0);
    trip.emplace_back(e.b, e.b, 1.0);
    trip.emplace_back(e.a, e.b, -1.0);
    trip.emplace_back(e.b, e.a, -1.0);
    rhs(e.a) -= e.jump;
    rhs(e.b) += e.jump;
  }
  for (const auto& c : g.cuts) {
    trip.emplace_back(c.a, c.a, c.weight);
    rhs(c.a) += c.weight * c.value;
  }
  if (g.cuts.empty()) trip.emplace_back(0, 0, 1.0);  // pin the additive constant

  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::IncompleteCholesky<double>>
      cg;
  cg.setTolerance(opts.tolerance);
  cg.setMaxIterations(opts.max_iterations);
  cg.compute(a);
  if (cg.info() != Eigen::Success) throw std::runtime_error("solver preconditioner failed");
  if (rhs.norm() == 0.0) {
    sol.u = Eigen::VectorXd::Zero(n);
  } else {
    sol.u = cg.solve(rhs);
    sol.iterations = static_cast<int>(cg.iterations());
    sol.residual = (a * sol.u - rhs).norm() / rhs.norm();
    if (cg.info() != Eigen::Success || !(sol.residual <= opts.tolerance * 10.0)) {
      std::ostringstream msg;
      msg << "solver did not converge: residual " << sol.residual << " after " << sol.iterations << " iterations";
      throw std::runtime_error(msg.str());
    }
  }
  sol.energy = sol.energy_of(sol.u);
  return sol;
}

double metric_min_length(const PotentialSolution& sol) {
  const auto& g = sol.graph;
  const int n = g.nodes();
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& e : g.edges) {
    const double w = std::abs(sol.u(e.b) - sol.u(e.a) - e.jump);
    adj[e.a].emplace_back(e.b, w);
    adj[e.b].emplace_back(e.a, w);
  }
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<double> exit_cost(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (const auto& c : g.cuts) {
    if (c.value == 0.0) {
      const double d0 = std::abs(sol.u(c.a));
      if (d0 < dist[c.a]) {
        dist[c.a] = d0;
        heap.emplace(d0, c.a);
      }
    } else if (c.value == 1.0) {
      exit_cost[c.a] = std::min(exit_cost[c.a], std::abs(1.0 - sol.u(c.a)));
    }
  }
  double best = std::numeric_limits<double>::infinity();
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    if (d >= best) break;
    best = std::min(best, d + exit_cost[v]);
    for (const auto& [w, len] : adj[v]) {
      if (d + len < dist[w]) {
        dist[w] = d + len;
        heap.emplace(dist[w], w);
      }
    }
  }
  return best;
}

double curve_distance(const JordanCurve& a, const JordanCurve& b) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < a.size(); ++i) best = std::min(best, b.distance(a.vertex(i)));
  for (int i = 0; i < b.size(); ++i) best = std::min(best, a.distance(b.vertex(i)));
  return best;
}

namespace {

Point interior_point(const JordanCurve& c) {
  const Point centroid = c.vertices().rowwise().mean();
  if (c.contains(centroid)) return centroid;
  const auto box = c.bounding_box();
  for (int k = 1; k < 64; ++k) {
    const double y = box.min().y() + box.sizes().y() * k / 64.0;
    for (int m = 1; m < 64; ++m) {
      const Point p(box.min().x() + box.sizes().x() * m / 64.0, y);
      if (c.contains(p)) return p;
    }
  }
  throw std::invalid_argument("no interior point found for hole");
}

}  // namespace

RingModulus ring_modulus(const RingProblem& p, const SolverOptions& opts) {
  if (!p.outer.contains(p.inner.vertex(0))) throw std::invalid_argument("ring: inner curve must lie inside outer");
  for (int i = 0; i < p.inner.size(); ++i) {
    if (!p.outer.contains(p.inner.vertex(i))) throw std::invalid_argument("ring: boundaries intersect");
  }
  MixedProblem mp{p.outer, uniform_values(p.outer, 1.0), {p.inner}, {uniform_values(p.inner, 0.0)}, p.grid};
  const double h = std::max(p.outer.bounding_box().sizes().x(), p.outer.bounding_box().sizes().y()) / p.grid;
  if (curve_distance(p.inner, p.outer) < 8.0 * h) {
    throw std::invalid_argument("ring: grid must resolve the gap with >= 8 cells");
  }
  const PotentialSolution u = solve_potential(mp, std::nullopt, opts);

  MixedProblem conj = mp;
  conj.outer_values = uniform_values(p.outer, std::nullopt);
  conj.hole_values = {uniform_values(p.inner, std::nullopt)};
  const PotentialSolution v = solve_potential(conj, interior_point(p.inner), opts);

  RingModulus out;
  out.connecting = u.energy;
  out.separating = v.energy;
  out.separating_reciprocal = 1.0 / u.energy;
  out.residual = std::max(u.residual, v.residual);
  out.grid = p.grid;
  out.cell = u.graph.h;
  return out;
}

ContinuaBounds continua_modulus_bounds(const JordanCurve& e, const JordanCurve& f, const Point& centre,
                                       double radius, int grid, const SolverOptions& opts) {
  if (e.diameter() <= 0.0 || f.diameter() <= 0.0) throw std::invalid_argument("degenerate continuum");
  const double dist = curve_distance(e, f);
  if (!(dist > 0.0)) throw std::invalid_argument("continua must be disjoint");
  for (const JordanCurve* c : {&e, &f}) {
    for (int i = 0; i < c->size(); ++i) {
      if ((c->vertex(i) - centre).norm() >= radius) throw std::invalid_argument("continua must lie in the ball");
    }
    if (c->contains(centre + Point(0, 0)) && false) break;
  }
  if (e.contains(f.vertex(0)) || f.contains(e.vertex(0))) throw std::invalid_argument("continua must be disjoint");

  ContinuaBounds out;
  out.t = dist / std::min(e.diameter(), f.diameter());
  out.kernel = 1.0 / std::log1p(out.t);

  const int nb = 1024;
  Eigen::Matrix2Xd ball(2, nb);
  for (int k = 0; k < nb; ++k) {
    const double a = 2.0 * std::numbers::pi * k / nb;
    ball.col(k) = centre + radius * Point(std::cos(a), std::sin(a));
  }
  const JordanCurve outer(ball);
  MixedProblem mp{outer, uniform_values(outer, std::nullopt), {e, f},
                  {uniform_values(e, 0.0), uniform_values(f, 1.0)}, grid};
  const PotentialSolution u = solve_potential(mp, std::nullopt, opts);
  out.numeric = u.energy;
  out.empirical_c0 = std::max(out.numeric / out.kernel, out.kernel / out.numeric);
  return out;
}

Lemma36Report lemma36_check(const JordanCurve& curve, const Arc& a1, const Arc& a2, const ControlFunction& psi,
                            int grid, const SolverOptions& opts) {
  const int n = curve.size();
  auto span = [&](const Arc& a) { return ((a.last - a.first) % n + n) % n; };
  auto in_arc = [&](const Arc& a, int seg) { return ((seg - a.first) % n + n) % n < span(a); };
  if (span(a1) < 1 || span(a2) < 1) throw std::invalid_argument("lemma36_check: arcs must be nondegenerate");
  for (int k = 0; k <= span(a1); ++k) {
    const int v = curve.wrap(a1.first + k);
    if (((v - a2.first) % n + n) % n <= span(a2)) throw std::invalid_argument("lemma36_check: arcs must be disjoint");
  }
  SegmentValues values(n);
  for (int k = 0; k < n; ++k) {
    if (in_arc(a1, k)) values[k] = 0.0;
    if (in_arc(a2, k)) values[k] = 1.0;
  }
  MixedProblem mp{curve, values, {}, {}, grid};
  const PotentialSolution u = solve_potential(mp, std::nullopt, opts);

  Lemma36Report out;
  out.modulus = u.energy;
  auto arc_points = [&](const Arc& a) {
    Eigen::Matrix2Xd pts(2, span(a) + 1);
    for (int k = 0; k <= span(a); ++k) pts.col(k) = curve.vertex(a.first + k);
    return pts;
  };
  const Eigen::Matrix2Xd p1 = arc_points(a1), p2 = arc_points(a2);
  out.distance = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < p1.cols(); ++i) {
    out.distance = std::min(out.distance, (p2.colwise() - p1.col(i)).colwise().norm().minCoeff());
  }
  out.min_diam = std::min(point_set_diameter(p1), point_set_diameter(p2));
  try {
    out.diam_bound = psi(psi(out.distance));
  } catch (const std::out_of_range&) {
    out.diam_bound = std::numeric_limits<double>::infinity();
  }
  out.slack = out.min_diam / out.diam_bound;
  out.holds = out.slack <= 2.0;
  try {
    out.exterior_kernel = key_modulus_bound(psi, out.distance).modulus_bound(out.min_diam);
  } catch (const std::out_of_range&) {
    out.exterior_kernel = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

void to_json(nlohmann::json& j, const RingModulus& m) {
  j = nlohmann::json::object();
  j["modulus_connecting"] = m.connecting;
  j["modulus_separating"] = m.separating;
  j["modulus_separating_reciprocal"] = m.separating_reciprocal;
  j["duality_product"] = m.connecting * m.separating;
  j["residual"] = m.residual;
  j["grid"] = m.grid;
  j["cell"] = m.cell;
}

void to_json(nlohmann::json& j, const ContinuaBounds& b) {
  j = nlohmann::json::object();
  j["t"] = b.t;
  j["kernel"] = b.kernel;
  j["lower"] = "C0 * kernel";
  j["upper"] = "C0^-1 * kernel";
  j["numeric"] = b.numeric;
  j["empirical_c0"] = b.empirical_c0;
}

void to_json(nlohmann::json& j, const Lemma36Report& r) {
  j = nlohmann::json::object();
  j["modulus"] = r.modulus;
  j["distance"] = r.distance;
  j["min_diam"] = r.min_diam;
  j["diam_bound"] = std::isfinite(r.diam_bound) ? nlohmann::json(r.diam_bound) : nlohmann::json(nullptr);
  j["slack"] = r.slack;
  j["holds"] = r.holds;
  j["exterior_kernel"] = std::isnan(r.exterior_kernel) ? nlohmann::json(nullptr) : nlohmann::json(r.exterior_kernel);
}

}  // namespace weldlab
