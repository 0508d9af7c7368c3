#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace weldlab {

enum class ControlFamily { linear, power, log_power, table };

std::string_view to_string(ControlFamily family);

/// Increasing control function psi on (0, t_max] with psi(0+) = 0.
///
///   linear     C t
///   power      C t^s
///   log_power  C t log^beta(1/t), t_max = e^{-beta} (where it stops increasing)
///   table      log-log linear interpolation of strictly increasing samples,
///              extended below the first sample by the first segment's slope
class ControlFunction {
 public:
  static ControlFunction linear(double c);
  static ControlFunction power(double s, double c = 1.0);
  static ControlFunction log_power(double c, double beta);
  static ControlFunction table(std::vector<double> t, std::vector<double> psi);

  ControlFamily family() const { return family_; }
  double c() const { return c_; }
  double exponent() const { return exponent_; }  // s or beta
  double t_max() const { return t_max_; }
  const std::vector<double>& table_t() const { return table_t_; }
  const std::vector<double>& table_psi() const { return table_psi_; }

  double operator()(double t) const;

  /// psi^{-1}(r): closed form for linear and power, bisection in log t
  /// (at most 200 steps) otherwise. Throws std::out_of_range when r is not
  /// in (0, psi(t_max)].
  double inverse(double r) const;

  /// psi scaled by a constant factor: t -> k psi(t).
  ControlFunction scaled(double k) const;

 private:
  ControlFamily family_ = ControlFamily::linear;
  double c_ = 1.0;
  double exponent_ = 1.0;
  double t_max_ = 0.0;
  std::vector<double> table_t_;
  std::vector<double> table_psi_;
};

double inverse_eval(const ControlFunction& psi, double r);

/// Doubling constants C1 psi(t) <= psi(2t) <= C2 psi(t) and the technical
/// monotonicity of t / phi^{-1}(t)^2 on a sample grid.
struct ControlConditions {
  double doubling_lower = 0.0;  // best C1
  double doubling_upper = 0.0;  // best C2
  bool strictly_increasing = false;
  bool technical_decreasing = false;
};

ControlConditions check_conditions(const ControlFunction& psi, std::span<const double> t_grid);

enum class LimsupVerdict { bounded, unbounded };
std::string_view to_string(LimsupVerdict verdict);

/// q(r) = r / (psi^{-1}(psi^{-1}(r)) log(1/r)) on a grid decreasing to 0.
///
/// The members of the log-power family all have q ~ log^{2 beta - 1}(1/r)
/// up to slowly varying factors, so the verdict uses the growth exponent:
/// the least-squares slope of log q against log log(1/r) over the last
/// three decades of the grid. "bounded" iff that slope is <= 0.1.
struct Thm51Result {
  std::vector<double> r_grid;
  std::vector<double> q;
  double limsup_estimate = 0.0;  // max q over the last three decades
  double growth_exponent = 0.0;
  LimsupVerdict verdict = LimsupVerdict::bounded;
};

/// Grid r = 10^{-k/per_decade}, spanning 10^{-first_decade}..10^{-last_decade}.
std::vector<double> decade_grid(int first_decade, int last_decade, int per_decade = 8);

Thm51Result thm51_condition(const ControlFunction& psi, std::span<const double> r_grid);
Thm51Result thm51_condition(const ControlFunction& psi);

inline constexpr double kThm51GrowthThreshold = 0.1;

/// t^2 / psi^{-1}(psi^{-1}(t^2)), the scalewise distortion bound with the
/// multiplicative constant set to 1. Valid for t < t0.
double scalewise_bound_from_psi(const ControlFunction& psi, double t, double t0 = 0.1);

/// Both bounds of the key modulus estimate for arcs at distance d. The
/// modulus bound carries an unnamed factor C0^{-1}; `modulus_bound` returns
/// the kernel log^{-1}(1 + psi^{-1}(psi^{-1}(m)) / m) without it.
struct KeyModulusBound {
  double diam_bound = 0.0;  // psi(psi(d))
  std::function<double(double)> modulus_bound;
  std::string prefactor = "C0^-1";
};

KeyModulusBound key_modulus_bound(const ControlFunction& psi, double d);

/// Smallest C in {2^k : k = 0..40} with C1 phi(C2 t) + C3 t <= phi(C t) on
/// every grid t. Requires phi(t) >= t on the grid.
double lemma35_constant(double c1, double c2, double c3, const ControlFunction& phi,
                        std::span<const double> t_grid);

/// t -> phi(t)^{1/(2K)} (the constant prefactor is not included).
std::function<double(double)> hoelder_bound(const ControlFunction& phi, double k);

void to_json(nlohmann::json& j, const ControlFunction& psi);
void from_json(const nlohmann::json& j, ControlFunction& psi);
void to_json(nlohmann::json& j, const Thm51Result& r);

}  // namespace weldlab
