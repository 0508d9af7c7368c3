#include "weldlab/circle_homeo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "weldlab/quadrature.hpp"

namespace weldlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Sorted points b = k + offset, k integer, with lo < b < hi.
void lattice_points(double lo, double hi, double offset, double spacing,
                    std::vector<double>& out) {
  const double first = std::floor((lo - offset) / spacing);
  for (double k = first;; k += 1.0) {
    const double b = offset + k * spacing;
    if (b >= hi) break;
    if (b > lo) out.push_back(b);
  }
}

}  // namespace

std::string_view to_string(HomeoFamily family) {
  switch (family) {
    case HomeoFamily::identity: return "identity";
    case HomeoFamily::rotation: return "rotation";
    case HomeoFamily::power: return "power";
    case HomeoFamily::log_power: return "log_power";
    case HomeoFamily::table: return "table";
  }
  return "identity";
}

HomeoFamily homeo_family_from_string(std::string_view name) {
  if (name == "identity") return HomeoFamily::identity;
  if (name == "rotation") return HomeoFamily::rotation;
  if (name == "power") return HomeoFamily::power;
  if (name == "log_power") return HomeoFamily::log_power;
  if (name == "table") return HomeoFamily::table;
  throw std::invalid_argument("unknown circle homeomorphism family: " + std::string(name));
}

CircleHomeo CircleHomeo::identity() { return {}; }

CircleHomeo CircleHomeo::rotation(double offset) {
  require(std::isfinite(offset), "rotation offset must be finite");
  CircleHomeo f;
  f.family_ = HomeoFamily::rotation;
  f.params_ = {offset};
  return f;
}

CircleHomeo CircleHomeo::power(double exponent) {
  require(std::isfinite(exponent) && exponent > 0.0, "power exponent must be > 0");
  CircleHomeo f;
  f.family_ = HomeoFamily::power;
  f.params_ = {exponent};
  return f;
}

CircleHomeo CircleHomeo::log_power(double beta) {
  require(std::isfinite(beta) && beta > 0.0, "log_power beta must be > 0");
  CircleHomeo f;
  f.family_ = HomeoFamily::log_power;
  f.params_ = {beta};
  return f;
}

CircleHomeo CircleHomeo::table(std::vector<double> node_values) {
  require(node_values.size() >= 256, "table needs at least 256 nodes");
  require(node_values.front() == 0.0, "table must satisfy h(0) = 0");
  for (std::size_t k = 0; k < node_values.size(); ++k) {
    require(std::isfinite(node_values[k]), "table values must be finite");
    const double next = k + 1 < node_values.size() ? node_values[k + 1] : 1.0;
    require(node_values[k] < next, "table is not strictly increasing");
  }
  CircleHomeo f;
  f.family_ = HomeoFamily::table;
  f.table_ = std::move(node_values);
  return f;
}

double CircleHomeo::lift_unit(double u) const {
  switch (family_) {
    case HomeoFamily::identity:
    case HomeoFamily::rotation:
      return u;
    case HomeoFamily::power: {
      if (u >= 0.5) return u;
      const double a = params_[0];
      return std::pow(2.0, a - 1.0) * std::pow(u, a);
    }
    case HomeoFamily::log_power: {
      if (u >= 0.5) return u;
      if (u <= 0.0) return 0.0;
      const double beta = params_[0];
      return u / std::pow(1.0 + std::log(0.5 / u), beta);
    }
    case HomeoFamily::table: {
      const auto n = static_cast<double>(table_.size());
      const double pos = u * n;
      auto k = static_cast<std::size_t>(pos);
      if (k >= table_.size()) k = table_.size() - 1;
      const double frac = pos - static_cast<double>(k);
      const double lo = table_[k];
      const double hi = k + 1 < table_.size() ? table_[k + 1] : 1.0;
      return lo + frac * (hi - lo);
    }
  }
  return u;
}

double CircleHomeo::lift(double x) const {
  if (family_ == HomeoFamily::identity) return x;
  if (family_ == HomeoFamily::rotation) return x + params_[0];
  const double n = std::floor(x);
  double u = x - n;
  if (u >= 1.0) u = std::nextafter(1.0, 0.0);
  return n + lift_unit(u);
}

std::complex<double> CircleHomeo::on_circle(double theta) const {
  return std::polar(1.0, kTwoPi * lift(theta / kTwoPi));
}

std::vector<double> CircleHomeo::breakpoints(double lo, double hi) const {
  std::vector<double> out;
  switch (family_) {
    case HomeoFamily::identity:
    case HomeoFamily::rotation:
      break;
    case HomeoFamily::power:
    case HomeoFamily::log_power:
      lattice_points(lo, hi, 0.0, 0.5, out);
      break;
    case HomeoFamily::table:
      lattice_points(lo, hi, 0.0, 1.0 / static_cast<double>(table_.size()), out);
      break;
  }
  return out;
}

bool CircleHomeo::piecewise_linear() const {
  return family_ != HomeoFamily::power && family_ != HomeoFamily::log_power;
}

CircleHomeo build_model_homeo(HomeoFamily family, std::span<const double> params) {
  switch (family) {
    case HomeoFamily::identity:
      require(params.empty(), "identity takes no parameters");
      return CircleHomeo::identity();
    case HomeoFamily::rotation:
      require(params.size() == 1, "rotation takes one offset");
      return CircleHomeo::rotation(params[0]);
    case HomeoFamily::power:
      require(params.size() == 1, "power takes one exponent");
      return CircleHomeo::power(params[0]);
    case HomeoFamily::log_power:
      require(params.size() == 1, "log_power takes one exponent beta");
      return CircleHomeo::log_power(params[0]);
    case HomeoFamily::table:
      return CircleHomeo::table({params.begin(), params.end()});
  }
  throw std::invalid_argument("unknown family");
}

double delta(const CircleHomeo& f, double theta, double t) {
  if (!(t > 0.0 && t < std::numbers::pi / 2)) {
    throw std::invalid_argument("delta: t must lie in (0, pi/2)");
  }
  const double x = theta / kTwoPi;
  const double s = t / kTwoPi;
  const double h0 = f.lift(x);
  const double forward = f.lift(x + s) - h0;
  const double backward = h0 - f.lift(x - s);
  // |e^{2 pi i a} - e^{2 pi i b}| = 2 |sin(pi (a - b))|
  const double chord_fwd = 2.0 * std::abs(std::sin(std::numbers::pi * forward));
  const double chord_bwd = 2.0 * std::abs(std::sin(std::numbers::pi * backward));
  if (!(chord_fwd > 0.0 && chord_bwd > 0.0)) {
    throw std::domain_error("homeomorphism not injective at sample");
  }
  return std::max(chord_fwd / chord_bwd, chord_bwd / chord_fwd);
}

double delta_lift(const CircleHomeo& h, double x, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("delta_lift: t must be > 0");
  const double h0 = h.lift(x);
  const double forward = h.lift(x + t) - h0;
  const double backward = h0 - h.lift(x - t);
  if (!(forward > 0.0 && backward > 0.0)) {
    throw std::domain_error("homeomorphism not injective at sample");
  }
  return std::max(forward / backward, backward / forward);
}

namespace {

template <typename F>
RhoResult periodic_max(F&& f, double period, int samples, bool refine) {
  if (samples < 64) throw std::invalid_argument("rho: need at least 64 samples");
  const double step = period / samples;
  RhoResult best{-1.0, 0.0};
  for (int k = 0; k < samples; ++k) {
    const double at = step * k;
    const double v = f(at);
    if (v > best.value) best = {v, at};
  }
  if (refine) {
    auto [arg, val] = golden_section_max(f, best.argmax - step, best.argmax + step);
    if (val > best.value) {
      arg = std::fmod(arg, period);
      if (arg < 0.0) arg += period;
      best = {val, arg};
    }
  }
  return best;
}

}  // namespace

RhoResult rho(const CircleHomeo& f, double t, int theta_samples, bool refine) {
  return periodic_max([&](double theta) { return delta(f, theta, t); }, kTwoPi,
                      theta_samples, refine);
}

RhoResult rho_lift(const CircleHomeo& h, double t, int samples, bool refine) {
  return periodic_max([&](double x) { return delta_lift(h, x, t); }, 1.0, samples,
                      refine);
}

ScalewiseProfile scalewise_profile(const CircleHomeo& f, std::span<const double> t_grid,
                                   int theta_samples) {
  ScalewiseProfile out;
  for (const double t : t_grid) {
    const RhoResult r = rho(f, t, theta_samples);
    out.t_grid.push_back(t);
    out.rho_values.push_back(r.value);
    out.theta_argmax.push_back(r.argmax);
  }
  return out;
}

void to_json(nlohmann::json& j, const CircleHomeo& f) {
  j = nlohmann::json::object();
  j["family"] = std::string(to_string(f.family()));
  if (f.family() == HomeoFamily::table) {
    j["params"] = nlohmann::json::array();
    nlohmann::json rows = nlohmann::json::array();
    const auto n = static_cast<double>(f.table_values().size());
    for (std::size_t k = 0; k < f.table_values().size(); ++k) {
      rows.push_back({static_cast<double>(k) / n, f.table_values()[k]});
    }
    j["table"] = std::move(rows);
  } else {
    j["params"] = f.params();
  }
}

void from_json(const nlohmann::json& j, CircleHomeo& f) {
  for (const auto& [key, value] : j.items()) {
    if (key != "family" && key != "params" && key != "table") {
      throw std::invalid_argument("unknown key in circle homeomorphism: " + key);
    }
  }
  const HomeoFamily family = homeo_family_from_string(j.at("family").get<std::string>());
  std::vector<double> params;
  if (j.contains("params")) params = j.at("params").get<std::vector<double>>();
  if (family == HomeoFamily::table && j.contains("table")) {
    const auto& rows = j.at("table");
    const auto n = static_cast<double>(rows.size());
    params.clear();
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const double x = rows[k].at(0).get<double>();
      if (std::abs(x - static_cast<double>(k) / n) > 1e-12) {
        throw std::invalid_argument("table abscissae must be the uniform grid k/N");
      }
      params.push_back(rows[k].at(1).get<double>());
    }
  }
  f = build_model_homeo(family, params);
}

}  // namespace weldlab
