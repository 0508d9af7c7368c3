#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace weldlab {

enum class HomeoFamily { identity, rotation, power, log_power, table };

std::string_view to_string(HomeoFamily family);
HomeoFamily homeo_family_from_string(std::string_view name);

/// Sense-preserving circle homeomorphism G(e^{2 pi i x}) = e^{2 pi i h(x)},
/// stored through its lift h with h(x + 1) = h(x) + 1.
///
/// Closed-form families are evaluated exactly. A table holds the values of
/// h at the uniform nodes k/N, k = 0..N-1, and interpolates linearly; the
/// node N is closed by h(1) = h(0) + 1.
///
/// Families other than `rotation` satisfy h(0) = 0.
class CircleHomeo {
 public:
  CircleHomeo() = default;

  static CircleHomeo identity();
  static CircleHomeo rotation(double offset);
  /// h(x) = 2^{a-1} x^a on [0, 1/2], h(x) = x on [1/2, 1].
  static CircleHomeo power(double exponent);
  /// h(x) = x / (1 + log(1/(2x)))^beta on (0, 1/2], h(x) = x on [1/2, 1].
  static CircleHomeo log_power(double beta);
  static CircleHomeo table(std::vector<double> node_values);

  HomeoFamily family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<double>& table_values() const { return table_; }

  /// The lift h at any real x.
  double lift(double x) const;
  double operator()(double x) const { return lift(x); }

  /// G(e^{i theta}).
  std::complex<double> on_circle(double theta) const;

  /// Points in (lo, hi) where h fails to be smooth, sorted ascending.
  std::vector<double> breakpoints(double lo, double hi) const;

  /// True when h is piecewise linear between consecutive breakpoints.
  bool piecewise_linear() const;

 private:
  double lift_unit(double u) const;  // h on [0, 1)

  HomeoFamily family_ = HomeoFamily::identity;
  std::vector<double> params_;
  std::vector<double> table_;
};

/// Validating factory over the family zoo.
CircleHomeo build_model_homeo(HomeoFamily family, std::span<const double> params);

/// Largest of the two chordal ratios of G at e^{i(theta - t)}, e^{i theta},
/// e^{i(theta + t)}. Requires t in (0, pi/2).
double delta(const CircleHomeo& f, double theta, double t);

/// The same ratio computed for the lift h on the real line.
double delta_lift(const CircleHomeo& h, double x, double t);

struct RhoResult {
  double value = 1.0;
  double argmax = 0.0;
};

/// sup over theta of delta(f, theta, t): grid maximum over `theta_samples`
/// equispaced angles, then a golden-section refinement around the best
/// grid angle when `refine` is set.
RhoResult rho(const CircleHomeo& f, double t, int theta_samples = 1024,
              bool refine = true);

/// sup over x in [0, 1) of delta_lift(h, x, t).
RhoResult rho_lift(const CircleHomeo& h, double t, int samples = 1024,
                   bool refine = true);

struct ScalewiseProfile {
  std::vector<double> t_grid;
  std::vector<double> rho_values;
  std::vector<double> theta_argmax;
};

ScalewiseProfile scalewise_profile(const CircleHomeo& f,
                                   std::span<const double> t_grid,
                                   int theta_samples = 1024);

void to_json(nlohmann::json& j, const CircleHomeo& f);
void from_json(const nlohmann::json& j, CircleHomeo& f);

}  // namespace weldlab
