#include "weldlab/control_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace weldlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTinyT = 1e-300;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

std::string_view to_string(ControlFamily family) {
  switch (family) {
    case ControlFamily::linear: return "linear";
    case ControlFamily::power: return "power";
    case ControlFamily::log_power: return "log_power";
    case ControlFamily::table: return "table";
  }
  return "unknown";
}

std::string_view to_string(LimsupVerdict verdict) {
  return verdict == LimsupVerdict::bounded ? "bounded" : "unbounded";
}

ControlFunction ControlFunction::linear(double c) {
  require_positive(c, "linear constant");
  ControlFunction f;
  f.family_ = ControlFamily::linear;
  f.c_ = c;
  f.exponent_ = 1.0;
  f.t_max_ = kInf;
  return f;
}

ControlFunction ControlFunction::power(double s, double c) {
  require_positive(s, "power exponent");
  require_positive(c, "power constant");
  ControlFunction f;
  f.family_ = ControlFamily::power;
  f.c_ = c;
  f.exponent_ = s;
  f.t_max_ = kInf;
  return f;
}

ControlFunction ControlFunction::log_power(double c, double beta) {
  require_positive(c, "log_power constant");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("log_power beta must be >= 0");
  ControlFunction f;
  f.family_ = ControlFamily::log_power;
  f.c_ = c;
  f.exponent_ = beta;
  // t log^beta(1/t) increases up to t = e^{-beta}; beta = 0 is linear on (0, 1).
  f.t_max_ = beta > 0.0 ? std::exp(-beta) : 1.0;
  return f;
}

ControlFunction ControlFunction::table(std::vector<double> t, std::vector<double> psi) {
  if (t.size() != psi.size() || t.size() < 2) {
    throw std::invalid_argument("control table needs matching t and psi columns with >= 2 rows");
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    require_positive(t[i], "table t");
    require_positive(psi[i], "table psi");
    if (i > 0 && (t[i] <= t[i - 1] || psi[i] <= psi[i - 1])) {
      throw std::invalid_argument("control table must be strictly increasing");
    }
  }
  ControlFunction f;
  f.family_ = ControlFamily::table;
  f.t_max_ = t.back();
  f.table_t_ = std::move(t);
  f.table_psi_ = std::move(psi);
  return f;
}

double ControlFunction::operator()(double t) const {
  if (!(t > 0.0)) {
    if (t == 0.0) return 0.0;
    throw std::domain_error("control function evaluated at negative t");
  }
  if (t > t_max_ * (1.0 + 1e-12)) throw std::out_of_range("control function evaluated beyond t_max");
  switch (family_) {
    case ControlFamily::linear: return c_ * t;
    case ControlFamily::power: return c_ * std::pow(t, exponent_);
    case ControlFamily::log_power: {
      const double l = std::log(1.0 / t);
      return c_ * t * std::pow(std::max(l, 0.0), exponent_);
    }
    case ControlFamily::table: {
      const auto& ts = table_t_;
      const auto& ps = table_psi_;
      std::size_t i;
      if (t <= ts.front()) {
        i = 0;
      } else {
        i = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin()) - 1;
        i = std::min(i, ts.size() - 2);
      }
      const double lt0 = std::log(ts[i]), lt1 = std::log(ts[i + 1]);
      const double lp0 = std::log(ps[i]), lp1 = std::log(ps[i + 1]);
      const double u = (std::log(t) - lt0) / (lt1 - lt0);
      return std::exp(lp0 + u * (lp1 - lp0));
    }
  }
  return 0.0;
}

double ControlFunction::inverse(double r) const {
  const double top = std::isfinite(t_max_) ? (*this)(t_max_) : kInf;
  if (!(r > 0.0) || r > top * (1.0 + 1e-12)) {
    throw std::out_of_range("inverse_eval: value outside control function range");
  }
  switch (family_) {
    case ControlFamily::linear: return r / c_;
    case ControlFamily::power: return std::pow(r / c_, 1.0 / exponent_);
    default: break;
  }
  // Bisection in log t.
  double lo = std::log(kTinyT);
  double hi = std::log(t_max_);
  if ((*this)(std::exp(lo)) > r) throw std::out_of_range("inverse_eval: value below representable range");
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((*this)(std::exp(mid)) < r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double tlo = std::exp(lo), thi = std::exp(hi);
  return std::abs((*this)(tlo) - r) <= std::abs((*this)(thi) - r) ? tlo : thi;
}

ControlFunction ControlFunction::scaled(double k) const {
  require_positive(k, "scale");
  ControlFunction f = *this;
  if (family_ == ControlFamily::table) {
    for (double& p : f.table_psi_) p *= k;
  } else {
    f.c_ *= k;
  }
  return f;
}

double inverse_eval(const ControlFunction& psi, double r) { return psi.inverse(r); }

ControlConditions check_conditions(const ControlFunction& psi, std::span<const double> t_grid) {
  ControlConditions out;
  out.doubling_lower = kInf;
  out.doubling_upper = 0.0;
  out.strictly_increasing = true;
  out.technical_decreasing = true;

  std::vector<double> ts(t_grid.begin(), t_grid.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::remove_if(ts.begin(), ts.end(), [&](double t) { return !(t > 0.0) || t > psi.t_max(); }),
           ts.end());
  double prev_val = 0.0;
  double prev_tech = kInf;
  const double top = std::isfinite(psi.t_max()) ? psi(psi.t_max()) : kInf;
  for (double t : ts) {
    const double v = psi(t);
    if (v <= prev_val) out.strictly_increasing = false;
    prev_val = v;
    if (2.0 * t <= psi.t_max()) {
      const double ratio = psi(2.0 * t) / v;
      out.doubling_lower = std::min(out.doubling_lower, ratio);
      out.doubling_upper = std::max(out.doubling_upper, ratio);
    }
    if (t <= top) {
      const double inv = psi.inverse(t);
      const double tech = t / (inv * inv);
      if (tech > prev_tech * (1.0 + 1e-12)) out.technical_decreasing = false;
      prev_tech = tech;
    }
  }
  if (!std::isfinite(out.doubling_lower)) out.doubling_lower = 0.0;
  return out;
}

std::vector<double> decade_grid(int first_decade, int last_decade, int per_decade) {
  if (last_decade <= first_decade || per_decade < 1) throw std::invalid_argument("decade_grid: empty range");
  std::vector<double> r;
  for (int k = first_decade * per_decade; k <= last_decade * per_decade; ++k) {
    r.push_back(std::pow(10.0, -static_cast<double>(k) / per_decade));
  }
  return r;
}

Thm51Result thm51_condition(const ControlFunction& psi, std::span<const double> r_grid) {
  if (r_grid.size() < 2) throw std::invalid_argument("thm51_condition: grid too short");
  for (std::size_t i = 1; i < r_grid.size(); ++i) {
    if (!(r_grid[i] < r_grid[i - 1])) throw std::invalid_argument("thm51_condition: r_grid must decrease");
  }
  const double r_hi = r_grid.front(), r_lo = r_grid.back();
  if (!(r_lo > 0.0) || r_hi >= 1.0) throw std::invalid_argument("thm51_condition: r_grid must lie in (0, 1)");
  if (std::log10(r_hi / r_lo) < 6.0 - 1e-9 || r_lo > 1e-12 * (1.0 + 1e-9)) {
    throw std::invalid_argument("thm51_condition: r_grid must span >= 6 decades down to <= 1e-12");
  }

  Thm51Result out;
  out.r_grid.assign(r_grid.begin(), r_grid.end());
  out.q.reserve(r_grid.size());
  for (double r : r_grid) {
    const double inner = psi.inverse(psi.inverse(r));
    out.q.push_back(r / (inner * std::log(1.0 / r)));
  }

  // Growth exponent over the last three decades.
  const double cutoff = r_lo * 1e3 * (1.0 + 1e-9);
  std::vector<double> xs, ys;
  out.limsup_estimate = 0.0;
  for (std::size_t i = 0; i < out.r_grid.size(); ++i) {
    if (out.r_grid[i] > cutoff) continue;
    xs.push_back(std::log(std::log(1.0 / out.r_grid[i])));
    ys.push_back(std::log(out.q[i]));
    out.limsup_estimate = std::max(out.limsup_estimate, out.q[i]);
  }
  if (xs.size() < 3) throw std::invalid_argument("thm51_condition: too few samples in the last three decades");
  Eigen::MatrixXd a(xs.size(), 2);
  Eigen::VectorXd b(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = xs[i];
    b(i) = ys[i];
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  out.growth_exponent = coef(1);
  out.verdict = out.growth_exponent <= kThm51GrowthThreshold ? LimsupVerdict::bounded : LimsupVerdict::unbounded;
  return out;
}

Thm51Result thm51_condition(const ControlFunction& psi) {
  const auto grid = decade_grid(2, 14, 8);
  return thm51_condition(psi, grid);
}

double scalewise_bound_from_psi(const ControlFunction& psi, double t, double t0) {
  if (!(t > 0.0) || !(t < t0)) throw std::out_of_range("scalewise_bound_from_psi: t must lie in (0, t0)");
  const double t2 = t * t;
  return t2 / psi.inverse(psi.inverse(t2));
}

KeyModulusBound key_modulus_bound(const ControlFunction& psi, double d) {
  if (!(d > 0.0)) throw std::out_of_range("key_modulus_bound: d must be positive");
  KeyModulusBound out;
  out.diam_bound = psi(psi(d));
  out.modulus_bound = [psi](double m) {
    if (!(m > 0.0)) throw std::out_of_range("key_modulus_bound: m must be positive");
    return 1.0 / std::log1p(psi.inverse(psi.inverse(m)) / m);
  };
  return out;
}

double lemma35_constant(double c1, double c2, double c3, const ControlFunction& phi,
                        std::span<const double> t_grid) {
  if (c1 < 1.0 || c2 < 1.0 || c3 < 1.0) throw std::invalid_argument("lemma35_constant: constants must be >= 1");
  if (t_grid.empty()) throw std::invalid_argument("lemma35_constant: empty grid");
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("lemma35_constant: grid must be positive");
    if (phi(t) < t) throw std::invalid_argument("lemma35_constant: requires phi(t) >= t on the grid");
  }
  for (int k = 0; k <= 40; ++k) {
    const double c = std::ldexp(1.0, k);
    bool ok = true;
    for (double t : t_grid) {
      if (c * t > phi.t_max() || c2 * t > phi.t_max()) {
        ok = false;
        break;
      }
      if (c1 * phi(c2 * t) + c3 * t > phi(c * t)) {
        ok = false;
        break;
      }
    }
    if (ok) return c;
  }
  throw std::runtime_error("inequality not satisfiable on grid");
}

std::function<double(double)> hoelder_bound(const ControlFunction& phi, double k) {
  if (!(k >= 1.0)) throw std::invalid_argument("hoelder_bound: K must be >= 1");
  return [phi, k](double t) { return std::pow(phi(t), 1.0 / (2.0 * k)); };
}

void to_json(nlohmann::json& j, const ControlFunction& psi) {
  j = nlohmann::json::object();
  j["family"] = std::string(to_string(psi.family()));
  nlohmann::json p = nlohmann::json::object();
  switch (psi.family()) {
    case ControlFamily::linear: p["c"] = psi.c(); break;
    case ControlFamily::power:
      p["c"] = psi.c();
      p["s"] = psi.exponent();
      break;
    case ControlFamily::log_power:
      p["c"] = psi.c();
      p["beta"] = psi.exponent();
      break;
    case ControlFamily::table:
      p["t"] = psi.table_t();
      p["psi"] = psi.table_psi();
      break;
  }
  j["params"] = p;
}

void from_json(const nlohmann::json& j, ControlFunction& psi) {
  if (!j.is_object()) throw std::invalid_argument("control function JSON must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "family" && key != "params") throw std::invalid_argument("unknown control function key: " + key);
  }
  const std::string fam = j.at("family").get<std::string>();
  const nlohmann::json p = j.value("params", nlohmann::json::object());
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, _] : p.items()) {
      bool known = false;
      for (const char* k : keys) known = known || key == k;
      if (!known) throw std::invalid_argument("unknown control function param: " + key);
    }
  };
  if (fam == "linear") {
    allow({"c"});
    psi = ControlFunction::linear(p.value("c", 1.0));
  } else if (fam == "power") {
    allow({"c", "s"});
    psi = ControlFunction::power(p.at("s").get<double>(), p.value("c", 1.0));
  } else if (fam == "log_power") {
    allow({"c", "beta"});
    psi = ControlFunction::log_power(p.value("c", 1.0), p.at("beta").get<double>());
  } else if (fam == "table") {
    allow({"t", "psi"});
    psi = ControlFunction::table(p.at("t").get<std::vector<double>>(), p.at("psi").get<std::vector<double>>());
  } else {
    throw std::invalid_argument("unknown control function family: " + fam);
  }
}

void to_json(nlohmann::json& j, const Thm51Result& r) {
  j = nlohmann::json::object();
  j["growth_exponent"] = r.growth_exponent;
  j["limsup_estimate"] = r.limsup_estimate;
  j["verdict"] = std::string(to_string(r.verdict));
  j["r_grid"] = r.r_grid;
  j["q"] = r.q;
}

}  // namespace weldlab
