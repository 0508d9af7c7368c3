#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "weldlab/control_function.hpp"
#include "weldlab/jordan_curve.hpp"
#include "weldlab/raster.hpp"

namespace weldlab {

/// Chord length d = |P1 - P2| and m = min(diam gamma_1, diam gamma_2) for the
/// two boundary arcs cut at vertices i and j.
struct PairMeasure {
  int i = 0, j = 0;
  double d = 0.0;
  double m = 0.0;
};

PairMeasure pair_measure(const JordanCurve& curve, int i, int j);

/// Least-squares fit of m ~ psi(d) in log-log space.
struct EnvelopeFit {
  ControlFunction psi = ControlFunction::linear(1.0);
  double residual = 0.0;
  // RMS residuals of the linear, power and log_power fits (NaN if not fitted).
  std::array<double, 3> residuals{};
};

struct EnvelopeOptions {
  int bins = 32;
  double fit_fraction = 0.1;     // fit only d <= fit_fraction * diam
  double tie_tolerance = 0.05;   // prefer the simpler family within this RMS gap
  std::uint64_t seed = 42;
};

struct Envelope {
  std::vector<PairMeasure> pairs;
  std::vector<double> bin_d;  // upper envelope: max m in each log-spaced d bin
  std::vector<double> bin_m;
  double max_ratio = 0.0;     // max m / d over all pairs
  EnvelopeFit fit;
};

/// Fits the three families to (d, m) samples; ties go to the simpler family.
EnvelopeFit fit_envelope(const std::vector<double>& d, const std::vector<double>& m, double tie_tolerance = 0.05);

/// Half of the pairs straddle feature vertices symmetrically when the curve
/// has features; the rest are stratified in log arc-gap with uniform start.
Envelope three_point_envelope(const JordanCurve& curve, int pair_samples, const EnvelopeOptions& opts = {});

enum class LcKind { lc1, lc2 };

struct LcProbe {
  Point center = Point::Zero();
  double r = 0.0;
  double measured = 0.0;  // inflation (LC-1) or deflation (LC-2) radius
  double allowed = 0.0;   // phi(r)
  bool pass = true;
  bool feature = false;
};

struct LcReport {
  Side side = Side::interior;
  LcKind kind = LcKind::lc1;
  double cell = 0.0;
  double pass_fraction = 1.0;
  LcProbe worst;
  std::vector<LcProbe> probes;
};

/// Random probes centred near the boundary with log-uniform radii in
/// [4h, diam/2], plus a quarter of the budget across feature vertices
/// (ball through opposite flank points). A probe passes when the grid
/// inflation is at most phi(r) + h (LC-1) or the deflation at least
/// phi(r) - h (LC-2).
LcReport lc_check(const JordanCurve& curve, Side side, const ControlFunction& phi, int grid_res, int probe_count,
                  std::uint64_t seed = 42, LcKind kind = LcKind::lc1);

struct DualityOptions {
  int pair_samples = 4000;
  int grid_res = 256;
  int probe_count = 160;
  double slack_ceiling = 8.0;
  std::uint64_t seed = 42;
};

struct DualityReport {
  // three point side: C(pair) = psi^{-1}(m) / d
  double c3_fine = 0.0;    // over all pairs
  double c3_coarse = 0.0;  // over pairs with d >= diam / 100
  bool three_point = false;
  // three point => LC: inflation <= kappa_a * psi(2 C r)
  double kappa_a = 0.0;
  bool direction_a = false;
  // LC => three point: m <= kappa_b * psi(C_lc d), C_lc = max psi^{-1}(rho)/r
  double c_lc = 0.0;
  double kappa_b = 0.0;
  bool direction_b = false;
  double slack_ceiling = 8.0;
};

DualityReport duality_check(const JordanCurve& curve, const ControlFunction& psi, const DualityOptions& opts = {});

/// Smallest D (up to bisection tolerance) such that a and b are joined by an
/// 8-connected path of side cells whose bounding box has diagonal <= D.
/// Boxes are enumerated over aspect angles and offsets. Never less than |a - b|.
double internal_distance(const JordanCurve& curve, Side side, const Point& a, const Point& b, int grid_res);

void to_json(nlohmann::json& j, const EnvelopeFit& fit);
void to_json(nlohmann::json& j, const Envelope& env);
void to_json(nlohmann::json& j, const LcReport& rep);
void to_json(nlohmann::json& j, const DualityReport& rep);

}  // namespace weldlab
