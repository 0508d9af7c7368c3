#include "weldlab/boundary_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace weldlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LineFit {
  double intercept = 0.0, slope = 0.0, rms = 0.0;
};

LineFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Eigen::MatrixXd a(x.size(), 2);
  a.col(0).setOnes();
  a.col(1) = x;
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(y);
  LineFit f{c(0), c(1), 0.0};
  f.rms = std::sqrt((a * c - y).squaredNorm() / static_cast<double>(x.size()));
  return f;
}

double rms(const Eigen::VectorXd& r) { return std::sqrt(r.squaredNorm() / static_cast<double>(r.size())); }

// Inverse that tolerates values past the control function's range.
std::optional<double> safe_inverse(const ControlFunction& psi, double v) {
  try {
    return psi.inverse(v);
  } catch (const std::out_of_range&) {
    return std::nullopt;
  }
}

std::optional<double> safe_eval(const ControlFunction& psi, double t) {
  try {
    return psi(t);
  } catch (const std::out_of_range&) {
    return std::nullopt;
  }
}

}  // namespace

PairMeasure pair_measure(const JordanCurve& curve, int i, int j) {
  i = curve.wrap(i);
  j = curve.wrap(j);
  if (i == j) throw std::invalid_argument("pair_measure: coincident vertices");
  PairMeasure p;
  p.i = std::min(i, j);
  p.j = std::max(i, j);
  p.d = (curve.vertex(i) - curve.vertex(j)).norm();
  p.m = std::min(curve.arc_diameter(p.i, p.j), curve.arc_diameter(p.j, p.i));
  return p;
}

EnvelopeFit fit_envelope(const std::vector<double>& d, const std::vector<double>& m, double tie_tolerance) {
  if (d.size() != m.size() || d.size() < 3) throw std::invalid_argument("fit_envelope: need >= 3 samples");
  const Eigen::Index n = static_cast<Eigen::Index>(d.size());
  Eigen::VectorXd ld(n), lm(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(d[k] > 0.0 && m[k] > 0.0)) throw std::invalid_argument("fit_envelope: samples must be positive");
    ld(k) = std::log(d[k]);
    lm(k) = std::log(m[k]);
  }
  EnvelopeFit out;
  out.residuals = {kNaN, kNaN, kNaN};

  const Eigen::VectorXd gap = lm - ld;
  const double log_c_lin = gap.mean();
  out.residuals[0] = rms(gap.array() - log_c_lin);
  const ControlFunction lin = ControlFunction::linear(std::exp(log_c_lin));

  const LineFit pw = fit_line(ld, lm);
  out.residuals[1] = pw.rms;
  const bool power_ok = pw.slope > 0.0;
  if (!power_ok) out.residuals[1] = kNaN;

  std::optional<ControlFunction> logp;
  if (ld.maxCoeff() < std::log(0.5)) {
    Eigen::VectorXd llog(n);
    for (Eigen::Index k = 0; k < n; ++k) llog(k) = std::log(-ld(k));
    const LineFit lf = fit_line(llog, gap);
    if (lf.slope > 0.0) {
      logp = ControlFunction::log_power(std::exp(lf.intercept), lf.slope);
      out.residuals[2] = lf.rms;
    }
  }

  double best = out.residuals[0];
  for (double r : out.residuals) {
    if (!std::isnan(r)) best = std::min(best, r);
  }
  if (out.residuals[0] <= best + tie_tolerance) {
    out.psi = lin;
    out.residual = out.residuals[0];
  } else if (power_ok && out.residuals[1] <= best + tie_tolerance) {
    out.psi = ControlFunction::power(pw.slope, std::exp(pw.intercept));
    out.residual = out.residuals[1];
  } else {
    out.psi = *logp;
    out.residual = out.residuals[2];
  }
  return out;
}

Envelope three_point_envelope(const JordanCurve& curve, int pair_samples, const EnvelopeOptions& opts) {
  if (pair_samples < 1000) throw std::invalid_argument("three_point_envelope: pair_samples must be >= 1000");
  const int n = curve.size();
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Envelope env;
  env.pairs.reserve(pair_samples);

  const auto& features = curve.features();
  int adversarial = features.empty() ? 0 : pair_samples / 2;
  if (adversarial > 0) {
    // Pairs (f - k, f + k') with k, k' near each other, k log-spaced.
    const int per_feature = adversarial / static_cast<int>(features.size());
    for (int f : features) {
      for (int q = 0; q < per_feature; ++q) {
        const double u = (q + 0.5) / per_feature;
        const int k = std::max(1, static_cast<int>(std::lround(std::exp(u * std::log(n / 2.0 - 1.0)))));
        const int shift = q % 3 - 1;
        const int a = f - k, b = f + std::max(1, k + shift);
        if (curve.wrap(a) == curve.wrap(b)) continue;
        env.pairs.push_back(pair_measure(curve, a, b));
      }
    }
  }
  while (static_cast<int>(env.pairs.size()) < pair_samples) {
    const int i = static_cast<int>(unit(rng) * n) % n;
    const int gap = std::clamp(static_cast<int>(std::lround(std::exp(unit(rng) * std::log(n / 2.0)))), 1, n / 2);
    env.pairs.push_back(pair_measure(curve, i, i + gap));
  }

  double d_min = std::numeric_limits<double>::infinity(), d_max = 0.0;
  for (const auto& p : env.pairs) {
    d_min = std::min(d_min, p.d);
    d_max = std::max(d_max, p.d);
    env.max_ratio = std::max(env.max_ratio, p.m / p.d);
  }
  const int bins = std::max(4, opts.bins);
  env.bin_d.assign(bins, 0.0);
  env.bin_m.assign(bins, 0.0);
  const double l0 = std::log(d_min), l1 = std::log(d_max) + 1e-12;
  for (const auto& p : env.pairs) {
    const int b = std::min(bins - 1, static_cast<int>((std::log(p.d) - l0) / (l1 - l0) * bins));
    if (p.m > env.bin_m[b]) {
      env.bin_m[b] = p.m;
      env.bin_d[b] = p.d;
    }
  }
  std::vector<double> fd, fm;
  const double d_cut = opts.fit_fraction * curve.diameter();
  for (int b = 0; b < bins; ++b) {
    if (env.bin_m[b] > 0.0 && env.bin_d[b] <= d_cut) {
      fd.push_back(env.bin_d[b]);
      fm.push_back(env.bin_m[b]);
    }
  }
  // Drop empty bins from the reported envelope.
  std::vector<double> bd, bm;
  for (int b = 0; b < bins; ++b) {
    if (env.bin_m[b] > 0.0) {
      bd.push_back(env.bin_d[b]);
      bm.push_back(env.bin_m[b]);
    }
  }
  env.bin_d = std::move(bd);
  env.bin_m = std::move(bm);
  if (fd.size() < 3) {
    fd = env.bin_d;
    fm = env.bin_m;
  }
  env.fit = fit_envelope(fd, fm, opts.tie_tolerance);
  return env;
}

LcReport lc_check(const JordanCurve& curve, Side side, const ControlFunction& phi, int grid_res, int probe_count,
                  std::uint64_t seed, LcKind kind) {
  if (grid_res < 64) throw std::invalid_argument("lc_check: grid resolution must be >= 64 to resolve features");
  if (probe_count < 1) throw std::invalid_argument("lc_check: probe_count must be positive");
  const Raster grid = rasterize(curve, side, grid_res);
  const double h = grid.h;
  const double diam = curve.diameter();
  if (diam / h < 16.0) throw std::invalid_argument("lc_check: grid does not resolve the curve");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LcReport rep;
  rep.side = side;
  rep.kind = kind;
  rep.cell = h;

  std::vector<LcProbe> probes;
  const auto& features = curve.features();
  const int feature_budget = features.empty() ? 0 : probe_count / 4;
  if (feature_budget > 0) {
    const int per = std::max(1, feature_budget / static_cast<int>(features.size()));
    const int n = curve.size();
    for (int f : features) {
      for (int q = 0; q < per; ++q) {
        const double u = (q + 0.5) / per;
        const int k = std::max(1, static_cast<int>(std::lround(std::exp(u * std::log(n / 4.0)))));
        const Point a = curve.vertex(f + k), b = curve.vertex(f - k);
        const double w = (a - b).norm();
        if (w < 4.0 * h) continue;
        LcProbe p;
        p.center = 0.5 * (a + b);
        p.r = std::max(0.75 * w, 0.5 * w + 2.0 * h);
        p.feature = true;
        probes.push_back(p);
      }
    }
  }
  const double r_lo = 4.0 * h, r_hi = 0.5 * diam;
  while (static_cast<int>(probes.size()) < probe_count + (feature_budget > 0 ? 0 : 0) &&
         static_cast<int>(probes.size()) < probe_count) {
    LcProbe p;
    p.r = std::exp(std::log(r_lo) + unit(rng) * (std::log(r_hi) - std::log(r_lo)));
    const Point on = curve.at_arclength(unit(rng) * curve.perimeter());
    const double ang = 2.0 * std::numbers::pi * unit(rng);
    const double rad = p.r * std::sqrt(unit(rng));
    p.center = on + rad * Point(std::cos(ang), std::sin(ang));
    probes.push_back(p);
  }

  int passed = 0;
  double worst_score = kind == LcKind::lc1 ? -1.0 : std::numeric_limits<double>::infinity();
  for (auto& p : probes) {
    const auto allowed = safe_eval(phi, p.r);
    p.allowed = allowed.value_or(std::numeric_limits<double>::infinity());
    double score;
    if (kind == LcKind::lc1) {
      p.measured = lc1_inflation(grid, p.center, p.r);
      p.pass = p.measured <= p.allowed + h;
      score = p.measured / p.allowed;
      if (score > worst_score) {
        worst_score = score;
        rep.worst = p;
      }
    } else {
      p.measured = lc2_deflation(grid, p.center, p.r);
      p.pass = p.measured >= p.allowed - h;
      score = p.measured / p.allowed;
      if (score < worst_score) {
        worst_score = score;
        rep.worst = p;
      }
    }
    passed += p.pass ? 1 : 0;
  }
  rep.pass_fraction = probes.empty() ? 1.0 : static_cast<double>(passed) / static_cast<double>(probes.size());
  rep.probes = std::move(probes);
  return rep;
}

DualityReport duality_check(const JordanCurve& curve, const ControlFunction& psi, const DualityOptions& opts) {
  DualityReport rep;
  rep.slack_ceiling = opts.slack_ceiling;
  EnvelopeOptions eo;
  eo.seed = opts.seed;
  const Envelope env = three_point_envelope(curve, opts.pair_samples, eo);
  const double diam = curve.diameter();

  // Three point side.
  for (const auto& p : env.pairs) {
    const auto t = safe_inverse(psi, p.m);
    if (!t) continue;
    const double c = *t / p.d;
    rep.c3_fine = std::max(rep.c3_fine, c);
    if (p.d >= diam / 100.0) rep.c3_coarse = std::max(rep.c3_coarse, c);
  }
  rep.three_point = rep.c3_fine <= opts.slack_ceiling * rep.c3_coarse;

  // Both-sided LC-1 probes with the inflation the three point property predicts.
  const double c3 = std::max(rep.c3_coarse, 1e-300);
  std::vector<LcProbe> all;
  double cell = 0.0;
  for (Side side : {Side::interior, Side::exterior}) {
    const LcReport lc = lc_check(curve, side, psi, opts.grid_res, opts.probe_count, opts.seed);
    cell = lc.cell;
    all.insert(all.end(), lc.probes.begin(), lc.probes.end());
  }
  rep.kappa_a = 0.0;
  rep.c_lc = 0.0;
  for (const auto& p : all) {
    const auto bound = safe_eval(psi, 2.0 * c3 * p.r);
    if (bound && std::isfinite(p.measured)) rep.kappa_a = std::max(rep.kappa_a, (p.measured - cell) / *bound);
    if (!std::isfinite(p.measured)) rep.kappa_a = std::numeric_limits<double>::infinity();
    const auto t = safe_inverse(psi, std::max(p.measured - cell, p.r));
    if (t) rep.c_lc = std::max(rep.c_lc, *t / p.r);
  }
  rep.direction_a = rep.kappa_a <= opts.slack_ceiling;

  for (const auto& p : env.pairs) {
    const auto bound = safe_eval(psi, rep.c_lc * p.d);
    if (!bound) continue;
    rep.kappa_b = std::max(rep.kappa_b, p.m / *bound);
  }
  rep.direction_b = rep.kappa_b <= opts.slack_ceiling;
  return rep;
}

double internal_distance(const JordanCurve& curve, Side side, const Point& a, const Point& b, int grid_res) {
  const Raster grid = rasterize(curve, side, grid_res);
  const auto ca = grid.cell_of(a), cb = grid.cell_of(b);
  if (!ca || !cb || !grid.in(*ca) || !grid.in(*cb)) {
    throw std::invalid_argument("internal_distance: points must lie strictly inside the chosen side");
  }
  const double euclid = (a - b).norm();
  if (!grid_connected(grid, *ca, *cb, [](int) { return true; })) {
    throw std::invalid_argument("internal_distance: points are disconnected on the grid");
  }
  const Point pa = grid.center(*ca), pb = grid.center(*cb);
  const double lo_x = std::min(pa.x(), pb.x()), hi_x = std::max(pa.x(), pb.x());
  const double lo_y = std::min(pa.y(), pb.y()), hi_y = std::max(pa.y(), pb.y());
  const double dx = hi_x - lo_x, dy = hi_y - lo_y;
  const double pad = 1e-9 * grid.h;

  auto feasible = [&](double dd) {
    if (dd * dd < dx * dx + dy * dy) return false;
    constexpr int kAspects = 9;
    constexpr int kOffsets = 5;
    const double th_lo = dd > 0.0 ? std::asin(std::min(1.0, dy / dd)) : 0.0;
    const double th_hi = dd > 0.0 ? std::acos(std::min(1.0, dx / dd)) : 0.0;
    for (int k = 0; k < kAspects; ++k) {
      const double th = th_lo + (th_hi - th_lo) * k / (kAspects - 1);
      const double w = dd * std::cos(th), hgt = dd * std::sin(th);
      for (int ox = 0; ox < kOffsets; ++ox) {
        const double left = hi_x - w + (w - dx) * ox / (kOffsets - 1);
        for (int oy = 0; oy < kOffsets; ++oy) {
          const double bottom = hi_y - hgt + (hgt - dy) * oy / (kOffsets - 1);
          auto inside = [&](int c) {
            const Point p = grid.center(c);
            return p.x() >= left - pad && p.x() <= left + w + pad && p.y() >= bottom - pad &&
                   p.y() <= bottom + hgt + pad;
          };
          if (grid_connected(grid, *ca, *cb, inside)) return true;
        }
      }
    }
    return false;
  };

  const Point span = Point(grid.nx * grid.h, grid.ny * grid.h);
  double lo = std::sqrt(dx * dx + dy * dy), hi = span.norm();
  if (feasible(lo)) return std::max(lo, euclid);
  for (int it = 0; it < 40 && hi - lo > 0.25 * grid.h; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::max(hi, euclid);
}

void to_json(nlohmann::json& j, const EnvelopeFit& fit) {
  j = nlohmann::json::object();
  j["psi"] = fit.psi;
  j["residual"] = fit.residual;
  auto num = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
  j["residuals"] = {{"linear", num(fit.residuals[0])},
                    {"log_power", num(fit.residuals[2])},
                    {"power", num(fit.residuals[1])}};
}

void to_json(nlohmann::json& j, const Envelope& env) {
  j = nlohmann::json::object();
  j["pairs"] = env.pairs.size();
  j["max_ratio"] = env.max_ratio;
  j["fit"] = env.fit;
  j["envelope_d"] = env.bin_d;
  j["envelope_m"] = env.bin_m;
}

void to_json(nlohmann::json& j, const LcReport& rep) {
  j = nlohmann::json::object();
  j["side"] = std::string(to_string(rep.side));
  j["kind"] = rep.kind == LcKind::lc1 ? "lc1" : "lc2";
  j["cell"] = rep.cell;
  j["probes"] = rep.probes.size();
  j["pass_fraction"] = rep.pass_fraction;
  j["worst"] = {{"center", {rep.worst.center.x(), rep.worst.center.y()}},
                {"r", rep.worst.r},
                {"measured", rep.worst.measured},
                {"allowed", rep.worst.allowed},
                {"feature", rep.worst.feature},
                {"pass", rep.worst.pass}};
}

void to_json(nlohmann::json& j, const DualityReport& rep) {
  j = nlohmann::json::object();
  j["three_point"] = {{"c_fine", rep.c3_fine}, {"c_coarse", rep.c3_coarse}, {"holds", rep.three_point}};
  j["three_point_implies_lc"] = {{"slack", rep.kappa_a}, {"holds", rep.direction_a}};
  j["lc_implies_three_point"] = {{"c_lc", rep.c_lc}, {"slack", rep.kappa_b}, {"holds", rep.direction_b}};
  j["slack_ceiling"] = rep.slack_ceiling;
}

}  // namespace weldlab
