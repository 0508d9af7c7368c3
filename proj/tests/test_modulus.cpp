#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "weldlab/modulus.hpp"

using namespace weldlab;

namespace {
constexpr double kPi = std::numbers::pi;

JordanCurve circle(double r, const Point& c = Point::Zero(), int n = 1024, double turn = 0.0) {
  Eigen::Matrix2Xd v(2, n);
  for (int k = 0; k < n; ++k) {
    const double th = turn + 2.0 * kPi * k / n;
    v.col(k) = c + r * Point(std::cos(th), std::sin(th));
  }
  return JordanCurve(v);
}

JordanCurve square(double side) {
  Eigen::Matrix2Xd v(2, 4);
  v << -0.5, 0.5, 0.5, -0.5, -0.5, -0.5, 0.5, 0.5;
  return JordanCurve(side * v);
}

// Connecting modulus 2 pi / log(R/r), the separating one its reciprocal.
double annulus_separating(double r, double R) { return std::log(R / r) / (2.0 * kPi); }

// Regression value from a single 1024^2 run of the unit square inside the
// concentric square of side 3.
constexpr double kSquareRingConnecting1024 = 6.2157005;
}  // namespace

TEST_CASE("annulus closed form") {
  const RingModulus e = ring_modulus({circle(1.0), circle(std::numbers::e), 256});
  CHECK(e.connecting == doctest::Approx(1.0 / annulus_separating(1.0, std::numbers::e)).epsilon(0.01));
  CHECK(e.separating == doctest::Approx(annulus_separating(1.0, std::numbers::e)).epsilon(0.01));
  CHECK(e.separating_reciprocal == doctest::Approx(1.0 / e.connecting));
  CHECK(e.residual <= 1e-10);
  const RingModulus two = ring_modulus({circle(1.0), circle(2.0), 256});
  CHECK(two.separating == doctest::Approx(annulus_separating(1.0, 2.0)).epsilon(0.015));
  CHECK(two.connecting == doctest::Approx(1.0 / annulus_separating(1.0, 2.0)).epsilon(0.01));
}

TEST_CASE("rotation and scaling invariance") {
  const RingModulus base = ring_modulus({circle(1.0), circle(2.0), 256});
  const RingModulus moved = ring_modulus({circle(2.5, {0.7, -0.3}, 1024, 0.3), circle(5.0, {0.7, -0.3}, 1024, 0.3), 256});
  CHECK(moved.connecting == doctest::Approx(base.connecting).epsilon(0.005));
  CHECK(moved.separating == doctest::Approx(base.separating).epsilon(0.005));
}

TEST_CASE("grid refinement differences shrink") {
  double m[3];
  int k = 0;
  for (int grid : {128, 256, 512}) m[k++] = ring_modulus({circle(1.0), circle(std::numbers::e), grid}).separating;
  CHECK(std::abs(m[2] - m[1]) < std::abs(m[1] - m[0]));
  CHECK(m[2] == doctest::Approx(annulus_separating(1.0, std::numbers::e)).epsilon(0.01));
}

TEST_CASE("square ring: duality and frozen value") {
  const RingModulus sq = ring_modulus({square(1.0), square(3.0), 512});
  CHECK(sq.connecting == doctest::Approx(kSquareRingConnecting1024).epsilon(0.002));
  CHECK(sq.connecting * sq.separating == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("connecting times separating is one") {
  for (const RingProblem& p : {RingProblem{circle(1.0), circle(std::numbers::e), 256},
                               RingProblem{circle(1.0), circle(2.0), 256},
                               RingProblem{circle(0.5, {0.3, 0.0}), circle(2.0), 256}}) {
    const RingModulus m = ring_modulus(p);
    CHECK(m.connecting * m.separating == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("ring preconditions") {
  CHECK_THROWS(ring_modulus({circle(1.0), circle(1.01), 64}));
  CHECK_THROWS(ring_modulus({circle(1.0, {1.5, 0.0}), circle(2.0), 128}));
  CHECK_THROWS(ring_modulus({circle(2.0), circle(1.0), 128}));
}

TEST_CASE("potential gradient is admissible and minimal") {
  MixedProblem p{circle(2.0), uniform_values(circle(2.0), 1.0), {circle(1.0)}, {uniform_values(circle(1.0), 0.0)}, 128};
  const PotentialSolution sol = solve_potential(p);
  CHECK(metric_min_length(sol) >= 1.0 - 1e-9);
  CHECK(sol.energy_of(sol.u) == doctest::Approx(sol.energy).epsilon(1e-12));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd v(sol.u.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = nd(rng);
    for (double eps : {1e-2, 1e-4}) CHECK(sol.energy_of(sol.u + eps * v) >= sol.energy * (1.0 - 1e-9));
  }
}

TEST_CASE("continua bounds") {
  const JordanCurve f = circle(0.1, {0.5, 0.0}, 256);
  const ContinuaBounds b = continua_modulus_bounds(circle(0.1, {-0.5, 0.0}, 256), f, Point::Zero(), 2.0, 256);
  CHECK(b.t == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(b.kernel == doctest::Approx(1.0 / std::log(5.0)).epsilon(1e-12));
  CHECK(b.numeric >= b.kernel / b.empirical_c0 * (1.0 - 1e-12));
  CHECK(b.numeric <= b.kernel * b.empirical_c0 * (1.0 + 1e-12));

  // shrinking E drives t up and both quantities down at a comparable rate
  double prev_numeric = b.numeric, prev_kernel = b.kernel;
  double lo = b.numeric / b.kernel, hi = lo;
  for (double r : {0.05, 0.025}) {
    const ContinuaBounds s = continua_modulus_bounds(circle(r, {-0.5, 0.0}, 256), f, Point::Zero(), 2.0, 256);
    CHECK(s.numeric < prev_numeric);
    CHECK(s.kernel < prev_kernel);
    prev_numeric = s.numeric;
    prev_kernel = s.kernel;
    lo = std::min(lo, s.numeric / s.kernel);
    hi = std::max(hi, s.numeric / s.kernel);
  }
  CHECK(hi / lo < 2.0);
}

TEST_CASE("arc modulus versus diameter bound") {
  const JordanCurve disk = make_domain({DomainFamily::disk}, 256);
  // opposite quarter arcs: a conformal square, modulus 1
  const Lemma36Report quarter = lemma36_check(disk, {0, 64}, {128, 192}, ControlFunction::linear(1.0), 256);
  CHECK(quarter.modulus == doctest::Approx(1.0).epsilon(0.02));
  CHECK(quarter.holds);
  CHECK(quarter.diam_bound == doctest::Approx(quarter.distance));

  const Lemma36Report far = lemma36_check(disk, {0, 16}, {128, 144}, ControlFunction::linear(1.0), 256);
  CHECK(far.modulus < quarter.modulus);
  CHECK(far.holds);

  const JordanCurve cusp = make_domain({DomainFamily::interior_cusp}, 1024);
  const ControlFunction fitted = ControlFunction::power(0.5005, 1.0076);
  const Lemma36Report flank = lemma36_check(cusp, {8, 64}, {1024 - 64, 1024 - 8}, fitted, 256);
  CHECK(flank.modulus > 0.1);
  CHECK(flank.slack <= 2.0);
  CHECK(flank.holds);

  CHECK_THROWS(lemma36_check(disk, {0, 64}, {32, 96}, ControlFunction::linear(1.0), 128));
}
