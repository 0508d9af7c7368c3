#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "weldlab/ba_extension.hpp"

namespace weldlab {

/// Global extension of a welding G to the plane: with w = arg z / 2pi +
/// i log|z| / 2pi (arg in [0, 2pi)), the exterior branch is
/// e^{2pi Im H(w)} e^{2pi i Re H(w)}; the disk branch is its conjugate by
/// the inversion z -> 1/conj(z). The map is the identity for
/// |z| <= e^{-4pi} and |z| >= e^{4pi}, and fixes 0.
class PlaneMapField {
 public:
  /// e^{-4 pi}
  static double delta();

  explicit PlaneMapField(StripMap strip);

  std::complex<double> operator()(std::complex<double> z) const;

  /// Pointwise distortion K(z); 1 in the identity regions.
  double distortion(std::complex<double> z) const;

  /// Strip point w with Im w = |log|z|| / 2pi feeding H at z.
  static std::complex<double> strip_point(std::complex<double> z);

  const StripMap& strip() const { return strip_; }
  const CircleHomeo& welding() const { return strip_.lift(); }

 private:
  StripMap strip_;
};

/// Builds the extension and probes branch-cut continuity at |z| in
/// {1.1, 2, 10}; a mismatch above 1e-8 raises
/// std::domain_error("translation-commutation violated").
PlaneMapField extend_welding(const CircleHomeo& g, int quad_order = 64);

double welding_distortion(const PlaneMapField& field, std::complex<double> z);

/// max over theta of K(r e^{i theta}): equispaced grid plus golden-section
/// refinement of the best grid angle.
struct ShellMax {
  double value = 1.0;
  double theta = 0.0;
};
ShellMax shell_max_distortion(const PlaneMapField& field, double r, int theta_samples);

struct ScalewiseBoundReport {
  std::vector<double> radii;
  std::vector<double> k_max;
  std::vector<double> rho;      // rho_G(log r)
  std::vector<double> ratio;    // k_max / rho
  double ratio_sup = 0.0;
  double ratio_inf = 0.0;
};

/// Requires every r in (1, e^{pi/2}) so that log r is an admissible scale
/// for rho_G.
ScalewiseBoundReport verify_scalewise_bound(const PlaneMapField& field,
                                            std::span<const double> radii,
                                            int theta_samples = 1024);

struct HomeomorphismProbe {
  double min_image_separation = 0.0;
  double min_jacobian = 0.0;
  bool injective = false;
  bool orientation_preserving = false;
};

/// Samples an n x n polar grid on r_min <= |z| <= r_max (r_min > 1 or
/// r_max < 1, away from the unit circle).
HomeomorphismProbe probe_homeomorphism(const PlaneMapField& field, int n, double r_min,
                                       double r_max);

}  // namespace weldlab
