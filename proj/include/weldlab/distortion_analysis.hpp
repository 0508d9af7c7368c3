#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "weldlab/welding_extension.hpp"

namespace weldlab {

/// Any pointwise distortion field z -> K(z) >= 1.
using DistortionField = std::function<double(std::complex<double>)>;

DistortionField distortion_field(const PlaneMapField& field);

/// Per-shell maxima of K on circles |z| = r, r decreasing toward 1.
struct DistortionProfile {
  std::vector<double> r_grid;
  std::vector<double> k_max;
};

DistortionProfile radial_profile(const PlaneMapField& field, std::span<const double> r_grid,
                                 int theta_samples = 1024);

/// Radii 1 + 2^{-k}, k = first..last.
std::vector<double> dyadic_radii(int first, int last);

struct ExponentFit {
  double alpha = 0.0;
  double residual = 0.0;
  /// Set when K_max is constant over the shells (bounded distortion).
  bool constant_profile = false;
};

/// Least-squares slope of log K_max against log(1 / (r - 1)). Needs at
/// least five shells spanning two decades of r - 1.
ExponentFit fit_radial_exponent(const DistortionProfile& profile);

/// Nested annuli 1 + eps_{k+1} <= |z| <= 1 + eps_k with eps_k = eps0 ratio^k.
struct AnnulusFamily {
  double eps0 = 0.125;
  double ratio = 0.5;
  int count = 8;

  double inner(int k) const;
  double outer(int k) const;
};

enum class TailVerdict { converging, diverging };
std::string_view to_string(TailVerdict verdict);

/// Trend of the annulus increments I_k of one integrand. `decay_exponent`
/// is the least-squares slope of log I_k against log eps_k: increments
/// shrink geometrically (a convergent tail) when it is positive.
struct TailTrend {
  double parameter = 0.0;  // p or lambda
  std::vector<double> increments;
  double total = 0.0;
  double decay_exponent = 0.0;
  std::optional<double> model_exponent;  // 1 - p alpha for K^p
  TailVerdict verdict = TailVerdict::converging;
};

struct IntegrabilityReport {
  double alpha = 0.0;
  double residual = 0.0;
  /// Trends of int K^p and int exp(lambda K) over the annuli.
  std::vector<TailTrend> p_trends;
  std::vector<TailTrend> lambda_trends;
  /// Same trends for the radial majorant K_max(|z|) that bounds K on each
  /// circle.
  std::vector<TailTrend> p_trends_majorant;
  std::vector<TailTrend> lambda_trends_majorant;
};

struct IntegrationOptions {
  int radial_order = 16;         // Gauss-Legendre nodes in log(r - 1)
  double theta_tolerance = 1e-6; // adaptive Simpson, relative
  int theta_initial_panels = 64;
  int theta_samples_max = 1024;  // grid for K_max on each radius
};

/// Integrates K^p and exp(lambda K) in polar coordinates over each annulus
/// and classifies the tail. `alpha` feeds the model exponent 1 - p alpha.
IntegrabilityReport integrability_report(const DistortionField& field,
                                         std::span<const double> p_list,
                                         std::span<const double> lambda_list,
                                         const AnnulusFamily& annuli, double alpha,
                                         const IntegrationOptions& options = {});

/// Same, with alpha fitted from the field's own radial profile.
IntegrabilityReport integrability_report(const PlaneMapField& field,
                                         std::span<const double> p_list,
                                         std::span<const double> lambda_list,
                                         const AnnulusFamily& annuli,
                                         const IntegrationOptions& options = {});

enum class RhoModelKind { log_law, power_law };

struct Classification {
  std::string label;  // "exp-integrable", "p-integrable", "bounded distortion"
  bool exp_integrable = false;
  double p_upper = 0.0;  // p-range is (0, p_upper); infinity if unbounded
};

/// log law -> exp-integrable; power law alpha -> p < 1/alpha; alpha <= 0 is
/// reclassified as bounded distortion.
Classification classify_from_rho(RhoModelKind model, double alpha = 0.0);

/// Welding scalewise exponent 2(1/s^2 - 1) implied by a t^s three point
/// control.
double welding_exponent_from_three_point(double s);

/// Upper end s^2 / (2(1 - s^2)) of the p-range for a t^s three point control.
double p_upper_from_three_point(double s);

void to_json(nlohmann::json& j, const TailTrend& t);
void to_json(nlohmann::json& j, const IntegrabilityReport& r);
void to_json(nlohmann::json& j, const Classification& c);

}  // namespace weldlab
