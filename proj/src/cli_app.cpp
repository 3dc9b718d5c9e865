#include "unidyn/cli_app.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "unidyn/dynamics.hpp"
#include "unidyn/linearize.hpp"
#include "unidyn/numerics.hpp"
#include "unidyn/simulate.hpp"
#include "unidyn/steady_state.hpp"

namespace unidyn::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int exit_ok = 0;
constexpr int exit_validation = 2;
constexpr int exit_solver = 3;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void require_keys(const json& obj, const std::string& where,
                  const std::vector<std::string>& allowed) {
  if (!obj.is_object()) throw ValidationError(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const auto& key : allowed)
      if (item.key() == key) known = true;
    if (!known) throw ValidationError("unknown key \"" + item.key() + "\" in " + where);
  }
}

double require_number(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) throw ValidationError(where + " is missing required key \"" + key + "\"");
  if (!obj[key].is_number()) throw ValidationError(where + "." + key + " must be a number");
  return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& where, const std::string& key,
                 double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ValidationError(where + "." + key + " must be a number");
  return obj[key].get<double>();
}

int int_or(const json& obj, const std::string& where, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) throw ValidationError(where + "." + key + " must be an integer");
  return obj[key].get<int>();
}

// Angles are radians in files; a "_deg" suffixed key is accepted instead.
double require_angle(const json& obj, const std::string& where, const std::string& key) {
  const std::string deg_key = key + "_deg";
  if (obj.contains(key) && obj.contains(deg_key))
    throw ValidationError(where + ": give either " + key + " or " + deg_key + ", not both");
  if (obj.contains(deg_key)) return require_number(obj, where, deg_key) * M_PI / 180.0;
  return require_number(obj, where, key);
}

double angle_or(const json& obj, const std::string& where, const std::string& key,
                double fallback) {
  const std::string deg_key = key + "_deg";
  if (obj.contains(key) && obj.contains(deg_key))
    throw ValidationError(where + ": give either " + key + " or " + deg_key + ", not both");
  if (obj.contains(deg_key)) return require_number(obj, where, deg_key) * M_PI / 180.0;
  if (obj.contains(key)) return require_number(obj, where, key);
  return fallback;
}

PhysicalParams parse_params(const json& root) {
  PhysicalParams p;
  if (!root.contains("params")) return p;
  const json& jp = root["params"];
  require_keys(jp, "params", {"m", "m0", "R", "g"});
  p.m = number_or(jp, "params", "m", p.m);
  p.m0 = number_or(jp, "params", "m0", p.m0);
  p.R = number_or(jp, "params", "R", p.R);
  p.g = number_or(jp, "params", "g", p.g);
  try {
    p.validate();
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
  return p;
}

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  bool svg = false;
  int threads = 1;
};

json load_config(const CommonOptions& common, const std::string& command) {
  json root;
  if (common.config_path.empty()) {
    root = json::object();
  } else {
    std::ifstream in(common.config_path);
    if (!in) throw ValidationError("cannot open config file " + common.config_path);
    try {
      in >> root;
    } catch (const json::exception& e) {
      throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
  }
  require_keys(root, "config", {"params", "command", "options"});
  if (root.contains("command")) {
    if (!root["command"].is_string() || root["command"].get<std::string>() != command)
      throw ValidationError("config \"command\" does not match subcommand \"" + command + "\"");
  }
  if (!root.contains("options")) root["options"] = json::object();
  return root;
}

json resolved_config(const json& root, const std::string& command, const PhysicalParams& p) {
  json echo = root;
  echo["command"] = command;
  echo["params"] = {{"m", p.m}, {"m0", p.m0}, {"R", p.R}, {"g", p.g}};
  return echo;
}

std::ofstream open_output(const CommonOptions& common, const std::string& name) {
  fs::path dir = common.out_dir.empty() ? fs::path(".") : fs::path(common.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream out(dir / name, std::ios::binary);  // LF line endings on every platform
  if (!out) throw ValidationError("cannot open output file " + (dir / name).string());
  return out;
}

void write_config_header(std::ostream& out, const json& echo) {
  out << "# config: " << echo.dump() << "\n";
}

// --- tiny static SVG rendering -------------------------------------------

struct Series {
  std::vector<double> x, y;
  std::string color = "#1f77b4";
};

void write_svg_plot(std::ostream& out, const std::vector<Series>& series,
                    const std::string& title) {
  const double width = 860, height = 520, ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) {
    ymax = ymin + 1;
    ymin -= 1;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4, yv = ymin + (ymax - ymin) * k / 4;
    out << "<text x=\"" << px(xv) << "\" y=\"" << height - mb + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << std::setprecision(4) << xv
        << "</text>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << std::setprecision(4) << yv
        << "</text>\n";
  }
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) out << px(s.x[i]) << "," << py(s.y[i]) << " ";
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

// --- commands --------------------------------------------------------------

int cmd_steady_state(const CommonOptions& common) {
  const json root = load_config(common, "steady-state");
  const PhysicalParams p = parse_params(root);
  const json& opts = root["options"];
  require_keys(opts, "options",
               {"model", "theta_star", "theta_star_deg", "psi_dot_star"});
  std::string model = opts.contains("model") ? opts["model"].get<std::string>() : "unicycle";
  if (model != "wheel" && model != "unicycle")
    throw ValidationError("options.model must be \"wheel\" or \"unicycle\"");
  const double theta = require_angle(opts, "options", "theta_star");
  const double psi_dot = require_number(opts, "options", "psi_dot_star");
  if (std::abs(theta) >= M_PI / 2 - singular_tilt_guard)
    throw ValidationError("theta_star reaches the horizontal-wheel singularity");

  json report;
  report["model"] = model;
  if (psi_dot == 0.0 && theta == 0.0) {
    report["kind"] = to_string(SteadyStateKind::StraightRolling);
    report["theta_star"] = 0.0;
    report["psi_dot_star"] = 0.0;
    report["r_star"] = 0.0;
    report["phi_dot_star"] = "arbitrary";
    report["note"] = "straight rolling: any pitch rate is a steady state";
    report["residuals"] = {0.0, 0.0};
    report["feasible"] = true;
  } else {
    SteadyState ss;
    if (model == "wheel") {
      ss = make_wheel_steady(theta, psi_dot, p);
      report["residuals"] = {wheel_steady_residual(ss.theta_star, ss.psi_dot_star,
                                                   ss.phi_dot_star, p)};
    } else {
      ss = unicycle_solve(theta, psi_dot, p);
      const Eigen::Vector2d res = unicycle_steady_residuals(ss.theta_star, ss.psi_dot_star,
                                                            ss.phi_dot_star, ss.r_star, p);
      report["residuals"] = {res[0], res[1]};
      report["region"] = to_string(classify_region(theta, psi_dot, p));
    }
    report["kind"] = to_string(ss.kind);
    report["theta_star"] = ss.theta_star;
    report["psi_dot_star"] = ss.psi_dot_star;
    report["phi_dot_star"] = ss.phi_dot_star;
    report["r_star"] = ss.r_star;
    report["feasible"] = ss.feasible;
  }

  const json echo = resolved_config(root, "steady-state", p);
  std::cout << "# config: " << echo.dump() << "\n" << report.dump(2) << "\n";
  if (!common.out_dir.empty()) {
    std::ofstream out = open_output(common, "steady_state.json");
    out << report.dump(2) << "\n";
  }
  return exit_ok;
}

int cmd_stability_map(const CommonOptions& common) {
  const json root = load_config(common, "stability-map");
  const PhysicalParams base = parse_params(root);
  const json& opts = root["options"];
  require_keys(opts, "options",
               {"model", "m0", "theta_min", "theta_max", "theta_min_deg", "theta_max_deg",
                "theta_count", "psi_dot_min", "psi_dot_max", "psi_dot_count"});
  std::string model_name = opts.contains("model") ? opts["model"].get<std::string>() : "unicycle";
  if (model_name != "wheel" && model_name != "unicycle")
    throw ValidationError("options.model must be \"wheel\" or \"unicycle\"");
  PhysicalParams p = base;
  if (opts.contains("m0")) p.m0 = require_number(opts, "options", "m0");

  GridSpec grid;
  grid.theta_min = angle_or(opts, "options", "theta_min", -60.0 * M_PI / 180.0);
  grid.theta_max = angle_or(opts, "options", "theta_max", 60.0 * M_PI / 180.0);
  grid.theta_count = int_or(opts, "options", "theta_count", 121);
  grid.psi_dot_min = number_or(opts, "options", "psi_dot_min", -10.0);
  grid.psi_dot_max = number_or(opts, "options", "psi_dot_max", 10.0);
  grid.psi_dot_count = int_or(opts, "options", "psi_dot_count", 101);
  try {
    grid.validate();
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }

  const MapModel model = model_name == "wheel" ? MapModel::Wheel : MapModel::Unicycle;
  const std::vector<MapPoint> map = stability_map(grid, model, p, common.threads);

  const json echo = resolved_config(root, "stability-map", p);
  std::ofstream out = open_output(common, "stability_map.csv");
  write_config_header(out, echo);
  out << "theta_star,psi_dot_star,phi_dot_star,r_star,label,max_real_root\n";
  for (const MapPoint& pt : map) {
    const char* label = pt.status == MapPointStatus::Stable ? "stable"
                         : pt.status == MapPointStatus::Unstable ? "unstable"
                                                                 : "skip";
    out << format_double(pt.theta_star) << ',' << format_double(pt.psi_dot_star) << ','
        << format_double(pt.phi_dot_star) << ',' << format_double(pt.r_star) << ',' << label
        << ',' << format_double(pt.max_real_root) << "\n";
  }
  out.close();

  if (common.svg) {
    std::ofstream svg = open_output(common, "stability_map.svg");
    const double width = 860, height = 520;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const double cw = width / grid.theta_count, ch = height / grid.psi_dot_count;
    for (int i = 0; i < grid.theta_count; ++i)
      for (int j = 0; j < grid.psi_dot_count; ++j) {
        const MapPoint& pt = map[static_cast<size_t>(i * grid.psi_dot_count + j)];
        const char* fill = pt.status == MapPointStatus::Stable ? "#2ca02c"
                            : pt.status == MapPointStatus::Unstable ? "#d62728"
                                                                    : "#ffffff";
        svg << "<rect x=\"" << i * cw << "\" y=\"" << height - (j + 1) * ch << "\" width=\""
            << cw + 0.5 << "\" height=\"" << ch + 0.5 << "\" fill=\"" << fill << "\"/>\n";
      }
    svg << "</svg>\n";
  }
  std::cout << "stability map: " << map.size() << " points written\n";
  return exit_ok;
}

json gains_to_json(const GainVector& gains) {
  json jg;
  jg["D_theta_Ns"] = gains.d_theta();
  jg["P_theta_N"] = gains.p_theta();
  jg["D_r_Ns_per_m"] = gains.d_r();
  jg["P_r_N_per_m"] = gains.p_r();
  jg["P_psi_N"] = gains.p_psi();
  if (gains.kind == ManeuverKind::LaneChange) jg["P_y_N_per_m"] = gains.p_y();
  return jg;
}

ManeuverKind parse_maneuver_kind(const json& opts) {
  if (!opts.contains("maneuver"))
    throw ValidationError("options.maneuver is required (\"lane_change\" or \"turn\")");
  const std::string name = opts["maneuver"].get<std::string>();
  if (name == "lane_change") return ManeuverKind::LaneChange;
  if (name == "turn") return ManeuverKind::Turn;
  throw ValidationError("options.maneuver must be \"lane_change\" or \"turn\"");
}

int cmd_design_gains(const CommonOptions& common) {
  const json root = load_config(common, "design-gains");
  const PhysicalParams p = parse_params(root);
  const json& opts = root["options"];
  require_keys(opts, "options", {"maneuver", "speed", "pole"});
  const ManeuverKind kind = parse_maneuver_kind(opts);
  const double speed = require_number(opts, "options", "speed");
  const double pole = number_or(opts, "options", "pole", -8.0);
  if (!(speed > 0.0)) throw ValidationError("options.speed must be positive");
  if (!(pole < 0.0)) throw ValidationError("options.pole must be negative");
  if (!(p.m0 > 0.0)) throw ValidationError("gain design needs a point mass, m0 > 0");

  const double phi_dot = speed / p.R;
  const ReducedModel reduced = reduced_model(phi_dot, p, kind);
  const GainVector gains = place_gains(reduced, pole);

  SteadyState straight = make_wheel_straight_rolling(phi_dot);
  const Matrix10 a_full = unicycle_state_matrix(straight, p);
  const Vector10 b_full = input_matrix(p);
  const Eigen::MatrixXd c = output_matrix(kind);
  const int rank_mc = numerical_rank(controllability_matrix(a_full, b_full));
  const int rank_moc = output_controllability(a_full, b_full, c);

  const Eigen::MatrixXd closed = reduced.a - reduced.b * gains.k.transpose();
  const std::vector<Complex> eigs = eigenvalues(closed);
  const Polynomial closed_poly = char_poly_coeffs(closed);
  double coeff_err = 0.0;
  const Eigen::Index n = closed.rows();
  for (Eigen::Index i = 0; i <= n; ++i) {
    double binom = 1.0;
    for (Eigen::Index j = 0; j < n - i; ++j) binom = binom * (n - j) / (j + 1);
    const double want = binom * std::pow(-pole, static_cast<double>(n - i));
    coeff_err = std::max(coeff_err,
                         std::abs(closed_poly.coeffs[static_cast<size_t>(i)] - want) /
                             std::max(1.0, std::abs(want)));
  }

  json report;
  report["maneuver"] = to_string(kind);
  report["speed_m_per_s"] = speed;
  report["phi_dot_star_rad_per_s"] = phi_dot;
  report["pole_per_s"] = pole;
  report["gains"] = gains_to_json(gains);
  report["rank_Mc"] = rank_mc;
  report["rank_Moc"] = rank_moc;
  report["closed_loop_char_coeff_rel_err"] = coeff_err;
  json jeigs = json::array();
  for (const Complex& z : eigs) jeigs.push_back({{"re", z.real()}, {"im", z.imag()}});
  report["closed_loop_eigenvalues"] = jeigs;

  const json echo = resolved_config(root, "design-gains", p);
  std::cout << "# config: " << echo.dump() << "\n" << report.dump(2) << "\n";
  if (!common.out_dir.empty()) {
    std::ofstream out = open_output(common, "gains.json");
    out << report.dump(2) << "\n";
  }
  return exit_ok;
}

int cmd_maneuver(const CommonOptions& common) {
  const json root = load_config(common, "maneuver");
  const PhysicalParams p = parse_params(root);
  const json& opts = root["options"];
  require_keys(opts, "options",
               {"maneuver", "speed", "amplitude", "pole", "gains", "h", "t_end"});
  ManeuverSpec spec;
  spec.kind = parse_maneuver_kind(opts);
  spec.speed = require_number(opts, "options", "speed");
  spec.amplitude = number_or(opts, "options", "amplitude",
                             spec.kind == ManeuverKind::LaneChange ? 2.5 : M_PI / 2.0);
  spec.pole = number_or(opts, "options", "pole", -8.0);
  IntegratorConfig cfg;
  cfg.h = number_or(opts, "options", "h", 1e-3);
  cfg.t_end = number_or(opts, "options", "t_end", 10.0);
  spec.t_end = cfg.t_end;
  try {
    spec.validate();
    cfg.validate();
    p.validate();
    if (!(p.m0 > 0.0)) throw DomainError("maneuvers need a point mass, m0 > 0");
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }

  GainVector gains;
  if (!opts.contains("gains") ||
      (opts["gains"].is_string() && opts["gains"].get<std::string>() == "design")) {
    gains = place_gains(reduced_model(spec.speed / p.R, p, spec.kind), spec.pole);
  } else if (opts["gains"].is_array()) {
    const size_t want = spec.kind == ManeuverKind::LaneChange ? 6 : 5;
    if (opts["gains"].size() != want)
      throw ValidationError("options.gains must have " + std::to_string(want) + " entries");
    gains.kind = spec.kind;
    gains.k = Eigen::VectorXd(static_cast<Eigen::Index>(want));
    for (size_t i = 0; i < want; ++i) gains.k[static_cast<Eigen::Index>(i)] = opts["gains"][i].get<double>();
  } else {
    throw ValidationError("options.gains must be \"design\" or an array of gains");
  }

  const ManeuverResult result = run_maneuver(spec, p, gains, cfg);

  const json echo = resolved_config(root, "maneuver", p);
  std::ofstream out = open_output(common, "maneuver.csv");
  write_config_header(out, echo);
  out << "t,omega1,omega2,omega3,theta,sigma,r,psi,phi,xG,yG,u,vP_norm,energy,work\n";
  for (const TraceRecord& rec : result.trace.records) {
    out << format_double(rec.t);
    for (int i = 0; i < 10; ++i) out << ',' << format_double(rec.state[i]);
    out << ',' << format_double(rec.u) << ',' << format_double(rec.vp_norm) << ','
        << format_double(rec.energy) << ',' << format_double(rec.work) << "\n";
  }
  out.close();

  json jm;
  jm["final_lateral_error_m"] = result.metrics.final_lateral_error;
  jm["final_yaw_error_rad"] = result.metrics.final_yaw_error;
  jm["max_abs_u_N"] = result.metrics.max_abs_u;
  jm["max_constraint_residual_m_per_s"] = result.metrics.max_constraint_residual;
  jm["energy_work_residual_J"] = result.metrics.energy_work_residual;
  jm["gains"] = gains_to_json(gains);
  std::ofstream mout = open_output(common, "maneuver_metrics.json");
  mout << jm.dump(2) << "\n";
  std::cout << "# config: " << echo.dump() << "\n" << jm.dump(2) << "\n";

  if (common.svg) {
    const auto& recs = result.trace.records;
    auto series_of = [&recs](auto getter) {
      Series s;
      s.x.reserve(recs.size());
      s.y.reserve(recs.size());
      for (const auto& rec : recs) {
        s.x.push_back(rec.t);
        s.y.push_back(getter(rec));
      }
      return s;
    };
    struct Panel {
      std::string file, title;
      Series series;
    };
    std::vector<Panel> panels;
    panels.push_back({"maneuver_theta.svg", "tilt angle theta(t) [rad]",
                      series_of([](const TraceRecord& r) { return r.state[uni_idx::theta]; })});
    panels.push_back({"maneuver_r.svg", "mass position r(t) [m]",
                      series_of([](const TraceRecord& r) { return r.state[uni_idx::r]; })});
    panels.push_back({"maneuver_psi.svg", "yaw angle psi(t) [rad]",
                      series_of([](const TraceRecord& r) { return r.state[uni_idx::psi]; })});
    panels.push_back({"maneuver_u.svg", "control input u(t) [N]",
                      series_of([](const TraceRecord& r) { return r.u; })});
    for (auto& panel : panels) {
      std::ofstream svg = open_output(common, panel.file);
      write_svg_plot(svg, {panel.series}, panel.title);
    }
    Series path;
    for (const auto& rec : recs) {
      path.x.push_back(rec.state[uni_idx::xg]);
      path.y.push_back(rec.state[uni_idx::yg]);
    }
    std::ofstream svg = open_output(common, "maneuver_path.svg");
    write_svg_plot(svg, {path}, "CG path over the ground plane [m]");
  }
  return exit_ok;
}

int cmd_root_locus(const CommonOptions& common) {
  const json root = load_config(common, "root-locus");
  const PhysicalParams p = parse_params(root);
  const json& opts = root["options"];
  require_keys(opts, "options", {"phi_dot_min", "phi_dot_max", "count", "m0_list"});
  SweepSpec sweep;
  sweep.phi_dot_min = number_or(opts, "options", "phi_dot_min", 0.0);
  sweep.phi_dot_max = number_or(opts, "options", "phi_dot_max", 6.0);
  sweep.count = int_or(opts, "options", "count", 241);
  try {
    sweep.validate();
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
  std::vector<double> m0_values;
  if (opts.contains("m0_list")) {
    if (!opts["m0_list"].is_array()) throw ValidationError("options.m0_list must be an array");
    for (const auto& v : opts["m0_list"]) m0_values.push_back(v.get<double>());
  } else {
    m0_values.push_back(p.m0);
  }
  for (double v : m0_values)
    if (!(v > 0.0)) throw ValidationError("m0_list entries must be positive");

  const RootLocus locus = root_locus_straight_rolling(sweep, p, m0_values);

  const json echo = resolved_config(root, "root-locus", p);
  std::ofstream out = open_output(common, "root_locus.csv");
  write_config_header(out, echo);
  out << "phi_dot_star,model,branch,re,im\n";
  for (const RootLocusSample& sample : locus.samples) {
    for (int b = 0; b < 2; ++b)
      out << format_double(sample.phi_dot_star) << ",wheel," << b << ','
          << format_double(sample.wheel[static_cast<size_t>(b)].real()) << ','
          << format_double(sample.wheel[static_cast<size_t>(b)].imag()) << "\n";
    for (size_t k = 0; k < m0_values.size(); ++k)
      for (int b = 0; b < 4; ++b)
        out << format_double(sample.phi_dot_star) << ",m0=" << format_double(m0_values[k]) << ','
            << b << ',' << format_double(sample.unicycle[k][static_cast<size_t>(b)].real()) << ','
            << format_double(sample.unicycle[k][static_cast<size_t>(b)].imag()) << "\n";
  }
  std::cout << "root locus: " << locus.samples.size() << " samples written\n";
  return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  static const char* prog = "unidyn";
  argv.push_back(prog);
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  CLI::App app{"rolling-wheel and unicycle dynamics, stability and steering"};
  app.require_subcommand(1);

  CommonOptions common;
  if (const char* env = std::getenv("UNIDYN_THREADS")) common.threads = std::atoi(env);
  if (common.threads < 1) common.threads = 1;

  long long seed_ignored = 0;
  std::string subcommand;
  static const std::vector<std::string> commands = {"steady-state", "stability-map",
                                                    "design-gains", "maneuver", "root-locus"};
  for (const std::string& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", common.config_path, "JSON configuration file");
    sub->add_option("--out", common.out_dir, "output directory");
    sub->add_flag("--svg", common.svg, "emit static SVG figures");
    sub->add_option("--seed", seed_ignored, "accepted and ignored; nothing here is random");
    sub->add_option("--grid-threads", common.threads, "worker threads for grid evaluation");
    sub->callback([&subcommand, name] { subcommand = name; });
  }

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_validation;
  }

  try {
    if (subcommand == "steady-state") return cmd_steady_state(common);
    if (subcommand == "stability-map") return cmd_stability_map(common);
    if (subcommand == "design-gains") return cmd_design_gains(common);
    if (subcommand == "maneuver") return cmd_maneuver(common);
    if (subcommand == "root-locus") return cmd_root_locus(common);
    std::cerr << "error: no subcommand given\n";
    return exit_validation;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return exit_validation;
  } catch (const json::exception& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return exit_validation;
  } catch (const SimulationAbortError& e) {
    std::cerr << "solver error: " << e.what() << " (last valid t = " << e.t_last << " s)\n";
    return exit_solver;
  } catch (const Error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return exit_solver;
  }
}

}  // namespace unidyn::cli
