#include "weldlab/distortion_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "weldlab/quadrature.hpp"

namespace weldlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rms = 0.0;
};

LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = x[static_cast<std::size_t>(i)];
    b[i] = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
  const double rms = std::sqrt((a * c - b).squaredNorm() / static_cast<double>(n));
  return {c[0], c[1], rms};
}

using Vec = Eigen::VectorXd;

// Adaptive Simpson for a vector-valued integrand; the error test uses the
// largest component relative to the running scale.
template <typename F>
Vec simpson_panel(F& f, double a, double b, const Vec& fa, const Vec& fm, const Vec& fb,
                  const Vec& whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const Vec flm = f(lm);
  const Vec frm = f(rm);
  const Vec left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const Vec right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const Vec err = (left + right - whole).cwiseAbs();
  const Vec scale = (left + right).cwiseAbs();
  bool ok = true;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    if (!std::isfinite(err[i])) continue;
    if (err[i] > 15.0 * tol * std::max(scale[i], 1e-300)) ok = false;
  }
  if (ok || depth <= 0) return left + right + (left + right - whole) / 15.0;
  return simpson_panel(f, a, m, fa, flm, fm, left, tol, depth - 1) +
         simpson_panel(f, m, b, fm, frm, fb, right, tol, depth - 1);
}

template <typename F>
Vec adaptive_simpson(F&& f, double a, double b, int panels, double tol) {
  const double h = (b - a) / panels;
  Vec sum;
  Vec fa = f(a);
  for (int k = 0; k < panels; ++k) {
    const double lo = a + h * k;
    const double hi = lo + h;
    const Vec fm = f(0.5 * (lo + hi));
    const Vec fb = f(hi);
    const Vec whole = h / 6.0 * (fa + 4.0 * fm + fb);
    const Vec part = simpson_panel(f, lo, hi, fa, fm, fb, whole, tol, 40);
    sum = k == 0 ? part : Vec(sum + part);
    fa = fb;
  }
  return sum;
}

Vec integrands(double k, std::span<const double> p_list, std::span<const double> lambda_list) {
  Vec v(static_cast<Eigen::Index>(p_list.size() + lambda_list.size()));
  Eigen::Index i = 0;
  for (const double p : p_list) v[i++] = std::pow(k, p);
  for (const double lambda : lambda_list) v[i++] = std::exp(lambda * k);
  return v;
}

double periodic_max(const DistortionField& field, double r, int samples) {
  auto k_at = [&](double theta) { return field(std::polar(r, theta)); };
  const double step = kTwoPi / samples;
  double best = -1.0;
  double best_theta = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double v = k_at(step * k);
    if (v > best) {
      best = v;
      best_theta = step * k;
    }
  }
  return std::max(best, golden_section_max(k_at, best_theta - step, best_theta + step).second);
}

TailTrend classify_tail(double parameter, std::vector<double> increments,
                        const AnnulusFamily& annuli, std::optional<double> model) {
  TailTrend t;
  t.parameter = parameter;
  t.model_exponent = model;
  t.total = 0.0;
  bool finite = true;
  std::vector<double> lx, ly;
  for (int k = 0; k < annuli.count; ++k) {
    const double inc = increments[static_cast<std::size_t>(k)];
    t.total += inc;
    if (!std::isfinite(inc) || !(inc > 0.0)) {
      finite = false;
      continue;
    }
    lx.push_back(std::log(annuli.outer(k) - 1.0));
    ly.push_back(std::log(inc));
  }
  t.increments = std::move(increments);
  if (!finite) {
    t.decay_exponent = -std::numeric_limits<double>::infinity();
    t.verdict = TailVerdict::diverging;
    return t;
  }
  t.decay_exponent = least_squares_line(lx, ly).slope;
  t.verdict = t.decay_exponent > 0.0 ? TailVerdict::converging : TailVerdict::diverging;
  return t;
}

}  // namespace

DistortionField distortion_field(const PlaneMapField& field) {
  return [&field](std::complex<double> z) { return field.distortion(z); };
}

DistortionProfile radial_profile(const PlaneMapField& field, std::span<const double> r_grid,
                                 int theta_samples) {
  DistortionProfile out;
  for (const double r : r_grid) {
    out.r_grid.push_back(r);
    out.k_max.push_back(shell_max_distortion(field, r, theta_samples).value);
  }
  return out;
}

std::vector<double> dyadic_radii(int first, int last) {
  std::vector<double> out;
  for (int k = first; k <= last; ++k) out.push_back(1.0 + std::ldexp(1.0, -k));
  return out;
}

ExponentFit fit_radial_exponent(const DistortionProfile& profile) {
  const auto& r = profile.r_grid;
  const auto& k = profile.k_max;
  if (r.size() != k.size() || r.size() < 5) {
    throw std::invalid_argument("fit_radial_exponent: need at least five shells");
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 1.0) || !(k[i] >= 1.0 - 1e-9)) {
      throw std::invalid_argument("fit_radial_exponent: need r > 1 and K_max >= 1");
    }
    if (i > 0 && !(r[i] < r[i - 1])) {
      throw std::invalid_argument("fit_radial_exponent: r_grid must decrease toward 1");
    }
  }
  if ((r.front() - 1.0) / (r.back() - 1.0) < 100.0 * (1.0 - 1e-12)) {
    throw std::invalid_argument("fit_radial_exponent: shells must span two decades of r - 1");
  }
  const auto [kmin, kmax] = std::minmax_element(k.begin(), k.end());
  if (*kmax - *kmin <= 1e-9 * *kmax) return {0.0, 0.0, true};

  std::vector<double> x, y;
  for (std::size_t i = 0; i < r.size(); ++i) {
    x.push_back(std::log(1.0 / (r[i] - 1.0)));
    y.push_back(std::log(k[i]));
  }
  const LineFit fit = least_squares_line(x, y);
  return {fit.slope, fit.rms, false};
}

double AnnulusFamily::outer(int k) const { return 1.0 + eps0 * std::pow(ratio, k); }
double AnnulusFamily::inner(int k) const { return 1.0 + eps0 * std::pow(ratio, k + 1); }

std::string_view to_string(TailVerdict verdict) {
  return verdict == TailVerdict::converging ? "converging" : "diverging";
}

IntegrabilityReport integrability_report(const DistortionField& field,
                                         std::span<const double> p_list,
                                         std::span<const double> lambda_list,
                                         const AnnulusFamily& annuli, double alpha,
                                         const IntegrationOptions& options) {
  if (annuli.count < 2 || !(annuli.eps0 > 0.0) || !(annuli.ratio > 0.0 && annuli.ratio < 1.0)) {
    throw std::invalid_argument("integrability_report: bad annulus family");
  }
  const double delta = PlaneMapField::delta();
  if (annuli.outer(0) >= 1.0 / delta || annuli.inner(annuli.count - 1) <= delta) {
    throw std::invalid_argument("integrability_report: annuli must lie in delta < |z| < 1/delta");
  }
  const GaussLegendreRule rule = gauss_legendre(options.radial_order);
  const std::size_t n_int = p_list.size() + lambda_list.size();
  std::vector<std::vector<double>> field_inc(n_int), major_inc(n_int);

  for (int k = 0; k < annuli.count; ++k) {
    const double u_lo = std::log(annuli.inner(k) - 1.0);
    const double u_hi = std::log(annuli.outer(k) - 1.0);
    Vec field_sum = Vec::Zero(static_cast<Eigen::Index>(n_int));
    Vec major_sum = Vec::Zero(static_cast<Eigen::Index>(n_int));
    for (int q = 0; q < rule.order(); ++q) {
      const double u = u_lo + (u_hi - u_lo) * rule.nodes[q];
      const double r = 1.0 + std::exp(u);
      // dA = r dr dtheta, dr = (r - 1) du
      const double jac = (u_hi - u_lo) * rule.weights[q] * r * (r - 1.0);
      auto g = [&](double theta) {
        return integrands(field(std::polar(r, theta)), p_list, lambda_list);
      };
      field_sum += jac * adaptive_simpson(g, 0.0, kTwoPi, options.theta_initial_panels,
                                          options.theta_tolerance);
      const double kmax = periodic_max(field, r, options.theta_samples_max);
      major_sum += jac * kTwoPi * integrands(kmax, p_list, lambda_list);
    }
    for (std::size_t i = 0; i < n_int; ++i) {
      field_inc[i].push_back(field_sum[static_cast<Eigen::Index>(i)]);
      major_inc[i].push_back(major_sum[static_cast<Eigen::Index>(i)]);
    }
  }

  IntegrabilityReport out;
  out.alpha = alpha;
  for (std::size_t i = 0; i < n_int; ++i) {
    if (i < p_list.size()) {
      const double p = p_list[i];
      out.p_trends.push_back(classify_tail(p, field_inc[i], annuli, 1.0 - p * alpha));
      out.p_trends_majorant.push_back(classify_tail(p, major_inc[i], annuli, 1.0 - p * alpha));
    } else {
      const double lambda = lambda_list[i - p_list.size()];
      out.lambda_trends.push_back(classify_tail(lambda, field_inc[i], annuli, std::nullopt));
      out.lambda_trends_majorant.push_back(
          classify_tail(lambda, major_inc[i], annuli, std::nullopt));
    }
  }
  return out;
}

IntegrabilityReport integrability_report(const PlaneMapField& field,
                                         std::span<const double> p_list,
                                         std::span<const double> lambda_list,
                                         const AnnulusFamily& annuli,
                                         const IntegrationOptions& options) {
  // Fit over the same scales the annuli cover.
  std::vector<double> radii;
  for (int k = 0; k < annuli.count; ++k) radii.push_back(annuli.outer(k));
  radii.push_back(annuli.inner(annuli.count - 1));
  const ExponentFit fit =
      fit_radial_exponent(radial_profile(field, radii, options.theta_samples_max));
  IntegrabilityReport out = integrability_report(distortion_field(field), p_list, lambda_list,
                                                 annuli, fit.alpha, options);
  out.residual = fit.residual;
  return out;
}

Classification classify_from_rho(RhoModelKind model, double alpha) {
  if (model == RhoModelKind::log_law) {
    return {"exp-integrable", true, std::numeric_limits<double>::infinity()};
  }
  if (!(alpha > 0.0)) {
    return {"bounded distortion", true, std::numeric_limits<double>::infinity()};
  }
  return {"p-integrable", false, 1.0 / alpha};
}

double welding_exponent_from_three_point(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("three point exponent must lie in (0, 1)");
  return 2.0 * (1.0 / (s * s) - 1.0);
}

double p_upper_from_three_point(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("three point exponent must lie in (0, 1)");
  return s * s / (2.0 * (1.0 - s * s));
}

void to_json(nlohmann::json& j, const TailTrend& t) {
  j = nlohmann::json{{"parameter", t.parameter},
                     {"increments", t.increments},
                     {"total", t.total},
                     {"decay_exponent", t.decay_exponent},
                     {"verdict", std::string(to_string(t.verdict))}};
  j["model_exponent"] = t.model_exponent ? nlohmann::json(*t.model_exponent) : nlohmann::json();
}

void to_json(nlohmann::json& j, const IntegrabilityReport& r) {
  auto brief = [](const std::vector<TailTrend>& trends, const char* key) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : trends) {
      arr.push_back({{key, t.parameter}, {"verdict", std::string(to_string(t.verdict))}});
    }
    return arr;
  };
  j = nlohmann::json{{"alpha", r.alpha},
                     {"residual", r.residual},
                     {"p_trends", brief(r.p_trends, "p")},
                     {"lambda_trends", brief(r.lambda_trends, "lambda")},
                     {"p_trends_majorant", brief(r.p_trends_majorant, "p")},
                     {"lambda_trends_majorant", brief(r.lambda_trends_majorant, "lambda")}};
  nlohmann::json detail = nlohmann::json::object();
  detail["p"] = r.p_trends;
  detail["lambda"] = r.lambda_trends;
  detail["p_majorant"] = r.p_trends_majorant;
  detail["lambda_majorant"] = r.lambda_trends_majorant;
  j["detail"] = std::move(detail);
}

void to_json(nlohmann::json& j, const Classification& c) {
  j = nlohmann::json{{"label", c.label}, {"exp_integrable", c.exp_integrable}};
  j["p_upper"] = std::isfinite(c.p_upper) ? nlohmann::json(c.p_upper) : nlohmann::json("inf");
}

}  // namespace weldlab
