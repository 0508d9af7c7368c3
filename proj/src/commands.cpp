#include "weldlab/commands.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "weldlab/boundary_geometry.hpp"
#include "weldlab/circle_homeo.hpp"
#include "weldlab/control_function.hpp"
#include "weldlab/distortion_analysis.hpp"
#include "weldlab/jordan_curve.hpp"
#include "weldlab/modulus.hpp"
#include "weldlab/welding_extension.hpp"

namespace weldlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, std::initializer_list<const char*> header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    bool first = true;
    for (const char* h : header) {
      out_ << (first ? "" : ",") << h;
      first = false;
    }
    out_ << "\r\n";
  }
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      out_ << (first ? "" : ",") << num(v);
      first = false;
    }
    out_ << "\r\n";
  }
  void row(const std::string& label, std::initializer_list<double> values) {
    out_ << label;
    for (double v : values) out_ << ',' << num(v);
    out_ << "\r\n";
  }

 private:
  std::ofstream out_;
};

bool replaced_whole(const std::string& key) { return key == "welding" || key == "psi" || key == "phi"; }

CircleHomeo homeo_from(const json& spec) {
  CircleHomeo g;
  from_json(spec, g);
  return g;
}

ControlFunction control_from(const json& spec) {
  ControlFunction f = ControlFunction::linear(1.0);
  from_json(spec, f);
  return f;
}

JordanCurve domain_from(const json& cfg) {
  if (!cfg.at("curve_csv").is_null()) return read_curve_csv(cfg.at("curve_csv").get<std::string>());
  const json& d = cfg.at("domain");
  DomainSpec spec;
  spec.family = domain_family_from_string(d.at("family").get<std::string>());
  spec.a = d.at("a").get<double>();
  spec.b = d.at("b").get<double>();
  spec.s = d.at("s").get<double>();
  spec.kappa = d.at("kappa").get<double>();
  return make_domain(spec, d.at("n_vertices").get<int>());
}

JordanCurve circle_curve(double r, int n, const Point& c = Point::Zero()) {
  Eigen::Matrix2Xd v(2, n);
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n;
    v.col(k) = c + r * Point(std::cos(a), std::sin(a));
  }
  return JordanCurve(std::move(v));
}

JordanCurve square_curve(double side, int n) {
  DomainSpec spec;
  spec.family = DomainFamily::square;
  const JordanCurve unit = make_domain(spec, n);
  return JordanCurve(side * unit.vertices());
}

}  // namespace

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json default_config(std::string_view command) {
  if (command == "extend") {
    return json::parse(R"({
      "welding": {"family": "power", "params": [2.0]},
      "quad_order": 64,
      "theta_samples": 1024,
      "shells": {"k_first": 1, "k_last": 10},
      "fit": {"k_first": 3, "k_last": 11},
      "field": {"extent": 2.0, "grid": 64}
    })");
  }
  if (command == "classify") {
    return json::parse(R"({
      "psi": {"family": "log_power", "params": {"c": 1.0, "beta": 0.5}},
      "r_grid": {"first_decade": 2, "last_decade": 14, "per_decade": 8}
    })");
  }
  if (command == "boundary") {
    return json::parse(R"({
      "domain": {"family": "disk", "n_vertices": 1024, "a": 1.0, "b": 0.5, "s": 0.5, "kappa": 0.5},
      "curve_csv": null,
      "pair_samples": 10000,
      "grid": 256,
      "lc": {"side": "interior", "kind": "lc1", "probes": 200, "phi": {"family": "linear", "params": {"c": 2.0}}},
      "duality": {"enabled": true, "psi": {"family": "linear", "params": {"c": 1.0}}, "pair_samples": 4000, "probes": 160}
    })");
  }
  if (command == "modulus") {
    return json::parse(R"({
      "problem": {"kind": "annulus", "r_inner": 1.0, "r_outer": 2.718281828459045, "side_inner": 1.0,
                  "side_outer": 3.0, "continuum_radius": 0.1, "center_distance": 1.0, "ball_radius": 2.0,
                  "vertices": 1024},
      "grid": 256,
      "tolerance": 1e-10
    })");
  }
  if (command == "report") {
    return json::parse(R"({
      "lifts": [1.5, 2.0, 3.0],
      "betas": [0.25, 0.5, 0.75, 1.1],
      "three_point_s": [0.5, 0.7071067811865476, 0.9],
      "domains": ["disk", "square", "interior_cusp", "exterior_cusp"],
      "rings": [[1.0, 2.718281828459045], [1.0, 2.0]],
      "modulus_grid": 256,
      "pair_samples": 10000
    })");
  }
  throw std::invalid_argument("unknown command: " + std::string(command));
}

json merge_config(const json& defaults, const json& user, const std::string& path) {
  if (user.is_null()) return defaults;
  if (!user.is_object()) throw std::invalid_argument("config" + (path.empty() ? "" : " at " + path) + " must be an object");
  json out = defaults;
  for (const auto& [key, value] : user.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!defaults.contains(key)) throw std::invalid_argument("unknown config key: " + where);
    const json& def = defaults.at(key);
    if (def.is_object() && !replaced_whole(key)) {
      out[key] = merge_config(def, value, where);
    } else {
      out[key] = value;
    }
  }
  return out;
}

json cmd_extend(const json& config, const CommandContext& ctx) {
  const CircleHomeo g = homeo_from(config.at("welding"));
  const PlaneMapField field = extend_welding(g, config.at("quad_order").get<int>());
  const int theta_samples = config.at("theta_samples").get<int>();
  const int grid = ctx.grid.value_or(config.at("field").at("grid").get<int>());
  const double extent = config.at("field").at("extent").get<double>();
  if (grid < 2) throw std::invalid_argument("field grid must be >= 2");

  fs::create_directories(ctx.out_dir);
  {
    CsvWriter csv(ctx.out_dir / "field.csv", {"re", "im", "G_re", "G_im", "K"});
    for (int j = 0; j < grid; ++j) {
      for (int i = 0; i < grid; ++i) {
        const std::complex<double> z(-extent + (i + 0.5) * 2.0 * extent / grid,
                                     -extent + (j + 0.5) * 2.0 * extent / grid);
        const auto w = field(z);
        double k = std::numeric_limits<double>::quiet_NaN();
        if (std::abs(std::abs(z) - 1.0) > 1e-6) k = welding_distortion(field, z);
        csv.row({z.real(), z.imag(), w.real(), w.imag(), k});
      }
    }
  }

  const auto radii = dyadic_radii(config.at("shells").at("k_first").get<int>(), config.at("shells").at("k_last").get<int>());
  const ScalewiseBoundReport sb = verify_scalewise_bound(field, radii, theta_samples);
  {
    CsvWriter csv(ctx.out_dir / "shells.csv", {"r", "K_max", "rho", "ratio"});
    for (std::size_t k = 0; k < sb.radii.size(); ++k) csv.row({sb.radii[k], sb.k_max[k], sb.rho[k], sb.ratio[k]});
  }

  const auto fit_radii =
      dyadic_radii(config.at("fit").at("k_first").get<int>(), config.at("fit").at("k_last").get<int>());
  const DistortionProfile profile = radial_profile(field, fit_radii, theta_samples);
  const ExponentFit fit = fit_radial_exponent(profile);
  const Classification cls =
      fit.constant_profile ? classify_from_rho(RhoModelKind::power_law, 0.0) : classify_from_rho(RhoModelKind::power_law, fit.alpha);

  json report;
  report["command"] = "extend";
  report["config"] = config;
  report["seed"] = ctx.seed;
  report["scalewise_bound"] = {{"radii", sb.radii},     {"k_max", sb.k_max},         {"rho", sb.rho},
                               {"ratio", sb.ratio},     {"ratio_sup", sb.ratio_sup}, {"ratio_inf", sb.ratio_inf},
                               {"ratio_spread", sb.ratio_sup / sb.ratio_inf}};
  report["alpha_fit"] = {{"alpha", fit.alpha},
                         {"residual", fit.residual},
                         {"constant_profile", fit.constant_profile},
                         {"radii", profile.r_grid},
                         {"k_max", profile.k_max}};
  report["classification"] = cls;
  report["field"] = {{"file", "field.csv"}, {"grid", grid}, {"extent", extent}};
  write_json(ctx.out_dir / "extend_report.json", report);
  return report;
}

json cmd_classify(const json& config, const CommandContext& ctx) {
  const ControlFunction psi = control_from(config.at("psi"));
  const json& rg = config.at("r_grid");
  const auto grid = decade_grid(rg.at("first_decade").get<int>(), rg.at("last_decade").get<int>(),
                                rg.at("per_decade").get<int>());
  const Thm51Result thm = thm51_condition(psi, grid);

  json report;
  report["command"] = "classify";
  report["config"] = config;
  report["seed"] = ctx.seed;
  report["thm51"] = {{"verdict", std::string(to_string(thm.verdict))},
                     {"growth_exponent", thm.growth_exponent},
                     {"growth_threshold", kThm51GrowthThreshold},
                     {"limsup_estimate", thm.limsup_estimate}};
  switch (psi.family()) {
    case ControlFamily::linear:
      report["verdict"] = "quasidisk (bounded distortion)";
      report["classification"] = classify_from_rho(RhoModelKind::power_law, 0.0);
      break;
    case ControlFamily::power: {
      const double s = psi.exponent();
      if (s >= 1.0) {
        report["verdict"] = "quasidisk (bounded distortion)";
        report["classification"] = classify_from_rho(RhoModelKind::power_law, 0.0);
      } else {
        const double alpha = welding_exponent_from_three_point(s);
        report["verdict"] = "p-integrable distortion";
        report["welding_exponent"] = alpha;
        report["p_range"] = {0.0, p_upper_from_three_point(s)};
        report["classification"] = classify_from_rho(RhoModelKind::power_law, alpha);
      }
      break;
    }
    case ControlFamily::log_power:
    case ControlFamily::table:
      if (thm.verdict == LimsupVerdict::bounded) {
        report["verdict"] = "generalized quasidisk (exp-integrable)";
        report["classification"] = classify_from_rho(RhoModelKind::log_law);
      } else {
        report["verdict"] = "condition fails";
      }
      break;
  }
  fs::create_directories(ctx.out_dir);
  {
    CsvWriter csv(ctx.out_dir / "thm51.csv", {"r", "q"});
    for (std::size_t k = 0; k < thm.r_grid.size(); ++k) csv.row({thm.r_grid[k], thm.q[k]});
  }
  write_json(ctx.out_dir / "classify_report.json", report);
  return report;
}

json cmd_boundary(const json& config, const CommandContext& ctx) {
  const JordanCurve curve = domain_from(config);
  const int grid = ctx.grid.value_or(config.at("grid").get<int>());
  EnvelopeOptions eo;
  eo.seed = ctx.seed;
  const Envelope env = three_point_envelope(curve, config.at("pair_samples").get<int>(), eo);

  const json& lc = config.at("lc");
  const std::string kind = lc.at("kind").get<std::string>();
  if (kind != "lc1" && kind != "lc2") throw std::invalid_argument("lc.kind must be lc1 or lc2");
  const LcReport lcr = lc_check(curve, side_from_string(lc.at("side").get<std::string>()), control_from(lc.at("phi")),
                                grid, lc.at("probes").get<int>(), ctx.seed, kind == "lc1" ? LcKind::lc1 : LcKind::lc2);

  json report;
  report["command"] = "boundary";
  report["config"] = config;
  report["seed"] = ctx.seed;
  report["curve"] = {{"vertices", curve.size()},
                     {"area", curve.signed_area()},
                     {"perimeter", curve.perimeter()},
                     {"diameter", curve.diameter()}};
  report["envelope"] = env;
  report["lc_check"] = lcr;
  const json& du = config.at("duality");
  if (du.at("enabled").get<bool>()) {
    DualityOptions opts;
    opts.seed = ctx.seed;
    opts.grid_res = grid;
    opts.pair_samples = du.at("pair_samples").get<int>();
    opts.probe_count = du.at("probes").get<int>();
    report["duality"] = duality_check(curve, control_from(du.at("psi")), opts);
  }
  fs::create_directories(ctx.out_dir);
  {
    CsvWriter csv(ctx.out_dir / "envelope.csv", {"d", "m"});
    for (std::size_t k = 0; k < env.bin_d.size(); ++k) csv.row({env.bin_d[k], env.bin_m[k]});
  }
  write_json(ctx.out_dir / "boundary_report.json", report);
  return report;
}

json cmd_modulus(const json& config, const CommandContext& ctx) {
  const json& p = config.at("problem");
  const int grid = ctx.grid.value_or(config.at("grid").get<int>());
  const int nv = p.at("vertices").get<int>();
  SolverOptions opts;
  opts.tolerance = config.at("tolerance").get<double>();
  const std::string kind = p.at("kind").get<std::string>();

  json report;
  report["command"] = "modulus";
  report["config"] = config;
  report["seed"] = ctx.seed;
  if (kind == "annulus" || kind == "square_ring") {
    RingProblem rp;
    if (kind == "annulus") {
      const double r = p.at("r_inner").get<double>(), big = p.at("r_outer").get<double>();
      rp = RingProblem{circle_curve(r, nv), circle_curve(big, nv), grid};
      report["closed_form_separating"] = std::log(big / r) / (2.0 * std::numbers::pi);
    } else {
      rp = RingProblem{square_curve(p.at("side_inner").get<double>(), nv),
                       square_curve(p.at("side_outer").get<double>(), nv), grid};
    }
    report["result"] = ring_modulus(rp, opts);
  } else if (kind == "continua") {
    const double rc = p.at("continuum_radius").get<double>();
    const double half = 0.5 * p.at("center_distance").get<double>();
    report["result"] = continua_modulus_bounds(circle_curve(rc, nv / 4, Point(-half, 0.0)),
                                               circle_curve(rc, nv / 4, Point(half, 0.0)), Point::Zero(),
                                               p.at("ball_radius").get<double>(), grid, opts);
  } else {
    throw std::invalid_argument("unknown modulus problem kind: " + kind);
  }
  fs::create_directories(ctx.out_dir);
  write_json(ctx.out_dir / "modulus_report.json", report);
  return report;
}

json cmd_report(const json& config, const CommandContext& ctx) {
  fs::create_directories(ctx.out_dir);
  json report;
  report["command"] = "report";
  report["config"] = config;
  report["seed"] = ctx.seed;

  // Scalewise bound and exponent per power lift.
  {
    CsvWriter csv(ctx.out_dir / "table_lifts.csv", {"a", "ratio_inf", "ratio_sup", "spread", "alpha", "a_minus_1"});
    json rows = json::array();
    for (double a : config.at("lifts").get<std::vector<double>>()) {
      const PlaneMapField field = extend_welding(CircleHomeo::power(a));
      const ScalewiseBoundReport sb = verify_scalewise_bound(field, dyadic_radii(3, 10), 1024);
      const ExponentFit fit = fit_radial_exponent(radial_profile(field, dyadic_radii(3, 11), 1024));
      csv.row({a, sb.ratio_inf, sb.ratio_sup, sb.ratio_sup / sb.ratio_inf, fit.alpha, a - 1.0});
      rows.push_back({{"a", a}, {"ratio_inf", sb.ratio_inf}, {"ratio_sup", sb.ratio_sup}, {"alpha", fit.alpha}});
    }
    report["lifts"] = rows;
  }
  // Limsup condition on log-power controls; p-ranges for power controls.
  {
    CsvWriter csv(ctx.out_dir / "table_thm51.csv", {"beta", "growth_exponent", "limsup_estimate", "bounded"});
    json rows = json::array();
    for (double beta : config.at("betas").get<std::vector<double>>()) {
      const Thm51Result r = thm51_condition(ControlFunction::log_power(1.0, beta));
      csv.row({beta, r.growth_exponent, r.limsup_estimate, r.verdict == LimsupVerdict::bounded ? 1.0 : 0.0});
      rows.push_back({{"beta", beta}, {"verdict", std::string(to_string(r.verdict))}});
    }
    report["thm51"] = rows;
    json ranges = json::array();
    for (double s : config.at("three_point_s").get<std::vector<double>>()) {
      ranges.push_back({{"s", s},
                        {"welding_exponent", welding_exponent_from_three_point(s)},
                        {"p_upper", p_upper_from_three_point(s)}});
    }
    report["three_point_p_ranges"] = ranges;
  }
  // Envelopes.
  {
    CsvWriter csv(ctx.out_dir / "table_envelopes.csv", {"domain", "max_ratio", "exponent", "constant", "residual"});
    json rows = json::array();
    for (const auto& name : config.at("domains").get<std::vector<std::string>>()) {
      DomainSpec spec;
      spec.family = domain_family_from_string(name);
      EnvelopeOptions eo;
      eo.seed = ctx.seed;
      const Envelope env = three_point_envelope(make_domain(spec, 1024), config.at("pair_samples").get<int>(), eo);
      csv.row(name, {env.max_ratio, env.fit.psi.exponent(), env.fit.psi.c(), env.fit.residual});
      rows.push_back({{"domain", name}, {"fit", env.fit}, {"max_ratio", env.max_ratio}});
    }
    report["envelopes"] = rows;
  }
  // Ring moduli.
  {
    const int grid = ctx.grid.value_or(config.at("modulus_grid").get<int>());
    CsvWriter csv(ctx.out_dir / "table_rings.csv", {"r", "R", "connecting", "separating", "closed_form", "product"});
    json rows = json::array();
    for (const auto& ring : config.at("rings").get<std::vector<std::vector<double>>>()) {
      if (ring.size() != 2) throw std::invalid_argument("rings entries must be [r, R]");
      const RingModulus m = ring_modulus({circle_curve(ring[0], 1024), circle_curve(ring[1], 1024), grid});
      const double exact = std::log(ring[1] / ring[0]) / (2.0 * std::numbers::pi);
      csv.row({ring[0], ring[1], m.connecting, m.separating, exact, m.connecting * m.separating});
      rows.push_back({{"r", ring[0]}, {"R", ring[1]}, {"modulus", m}, {"closed_form", exact}});
    }
    report["rings"] = rows;
  }
  write_json(ctx.out_dir / "report.json", report);
  return report;
}

json run_command(std::string_view command, const json& user_config, const CommandContext& ctx) {
  const json config = merge_config(default_config(command), user_config);
  if (command == "extend") return cmd_extend(config, ctx);
  if (command == "classify") return cmd_classify(config, ctx);
  if (command == "boundary") return cmd_boundary(config, ctx);
  if (command == "modulus") return cmd_modulus(config, ctx);
  return cmd_report(config, ctx);
}

}  // namespace weldlab
