#include <doctest.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "unidyn/cli_app.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("unidyn_test_" + std::to_string(static_cast<unsigned>(::getpid())) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int n = 0;
    return n;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_config(const TempDir& dir, const std::string& name, const json& config) {
  const std::string path = dir.file(name);
  std::ofstream out(path);
  out << config.dump(2);
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::vector<std::string>& args) { return unidyn::cli::run(args); }

json table_params_json() {
  return {{"m", 10.0}, {"m0", 5.0}, {"R", 0.3}, {"g", 9.81}};
}

}  // namespace

TEST_CASE("cli steady-state solves and reports residuals") {
  TempDir dir;
  const json config = {{"command", "steady-state"},
                       {"params", table_params_json()},
                       {"options", {{"model", "unicycle"}, {"theta_star", 0.15}, {"psi_dot_star", 2.0}}}};
  const std::string cfg = write_config(dir, "cfg.json", config);
  CHECK(run_cli({"steady-state", "--config", cfg, "--out", dir.path.string()}) == 0);

  const json report = json::parse(slurp(dir.file("steady_state.json")));
  CHECK(report["kind"] == "turning_rolling");
  CHECK(std::abs(report["residuals"][0].get<double>()) < 1e-9);
  CHECK(std::abs(report["residuals"][1].get<double>()) < 1e-9);
  CHECK(report["feasible"].get<bool>());
}

TEST_CASE("cli steady-state straight-rolling special case") {
  TempDir dir;
  const json config = {{"command", "steady-state"},
                       {"params", table_params_json()},
                       {"options", {{"theta_star", 0.0}, {"psi_dot_star", 0.0}}}};
  const std::string cfg = write_config(dir, "cfg.json", config);
  CHECK(run_cli({"steady-state", "--config", cfg, "--out", dir.path.string()}) == 0);
  const json report = json::parse(slurp(dir.file("steady_state.json")));
  CHECK(report["kind"] == "straight_rolling");
  CHECK(report["r_star"].get<double>() == 0.0);
  CHECK(report["phi_dot_star"] == "arbitrary");
}

TEST_CASE("cli steady-state excluded yaw rate exits 3 and names the condition") {
  TempDir dir;
  const double excluded = std::sqrt(2.0 * 5.0 * 9.81 / (3.0 * 10.0 * 0.3 * std::pow(std::cos(0.1), 3)));
  const json config = {{"command", "steady-state"},
                       {"params", table_params_json()},
                       {"options", {{"theta_star", 0.1}, {"psi_dot_star", excluded}}}};
  const std::string cfg = write_config(dir, "cfg.json", config);
  CHECK(run_cli({"steady-state", "--config", cfg, "--out", dir.path.string()}) == 3);
}

TEST_CASE("cli rejects unknown config keys") {
  TempDir dir;
  const json config = {{"command", "steady-state"},
                       {"params", table_params_json()},
                       {"options", {{"theta_star", 0.1}, {"psi_dot_star", 1.0}, {"bogus", 1}}}};
  const std::string cfg = write_config(dir, "cfg.json", config);
  CHECK(run_cli({"steady-state", "--config", cfg}) == 2);

  const json config2 = {{"command", "steady-state"}, {"nonsense", 1}};
  const std::string cfg2 = write_config(dir, "cfg2.json", config2);
  CHECK(run_cli({"steady-state", "--config", cfg2}) == 2);
}

TEST_CASE("cli accepts degree-suffixed angles") {
  TempDir dir;
  const json config = {{"command", "steady-state"},
                       {"params", table_params_json()},
                       {"options", {{"theta_star_deg", 30.0}, {"psi_dot_star", 2.0}}}};
  const std::string cfg = write_config(dir, "cfg.json", config);
  CHECK(run_cli({"steady-state", "--config", cfg, "--out", dir.path.string()}) == 0);
  const json report = json::parse(slurp(dir.file("steady_state.json")));
  CHECK(report["theta_star"].get<double>() == doctest::Approx(M_PI / 6).epsilon(1e-12));
}

TEST_CASE("cli stability map: wheel structure and m0 = 0 equivalence") {
  TempDir dir;
  json grid = {{"model", "wheel"},      {"theta_min_deg", -60.0}, {"theta_max_deg", 60.0},
               {"theta_count", 21},     {"psi_dot_min", -8.0},    {"psi_dot_max", 8.0},
               {"psi_dot_count", 21}};
  json config = {{"command", "stability-map"}, {"params", table_params_json()}, {"options", grid}};
  const std::string cfg = write_config(dir, "cfg.json", config);
  const std::string wheel_dir = (dir.path / "wheel").string();
  CHECK(run_cli({"stability-map", "--config", cfg, "--out", wheel_dir}) == 0);

  // parse and check: all rows with |theta| > 18.63 deg are stable
  std::ifstream in(wheel_dir + "/stability_map.csv");
  std::string line;
  std::getline(in, line);  // config echo
  CHECK(line.rfind("# config:", 0) == 0);
  std::getline(in, line);
  CHECK(line == "theta_star,psi_dot_star,phi_dot_star,r_star,label,max_real_root");
  std::vector<std::string> wheel_labels;
  int checked = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> cells;
    while (std::getline(ss, tok, ',')) cells.push_back(tok);
    REQUIRE(cells.size() == 6);
    wheel_labels.push_back(cells[4]);
    const double theta = std::strtod(cells[0].c_str(), nullptr);
    if (std::abs(theta) > 18.63 * M_PI / 180.0 && cells[4] != "skip") {
      CHECK(cells[4] == "stable");
      ++checked;
    }
  }
  CHECK(checked > 100);

  // unicycle at m0 = 0 gives identical labels
  config["options"]["model"] = "unicycle";
  config["options"]["m0"] = 0.0;
  const std::string cfg2 = write_config(dir, "cfg2.json", config);
  const std::string uni_dir = (dir.path / "uni").string();
  CHECK(run_cli({"stability-map", "--config", cfg2, "--out", uni_dir}) == 0);
  std::ifstream in2(uni_dir + "/stability_map.csv");
  std::getline(in2, line);
  std::getline(in2, line);
  size_t k = 0;
  while (std::getline(in2, line)) {
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> cells;
    while (std::getline(ss, tok, ',')) cells.push_back(tok);
    REQUIRE(k < wheel_labels.size());
    CHECK(cells[4] == wheel_labels[k]);
    ++k;
  }
  CHECK(k == wheel_labels.size());
}

TEST_CASE("cli stability map rejects an empty grid") {
  TempDir dir;
  const json config = {{"command", "stability-map"},
                       {"params", table_params_json()},
                       {"options", {{"model", "wheel"}, {"theta_count", 0}}}};
  const std::string cfg = write_config(dir, "cfg.json", config);
  CHECK(run_cli({"stability-map", "--config", cfg, "--out", dir.path.string()}) == 2);
}

TEST_CASE("cli design-gains reproduces the gain tables and ranks") {
  TempDir dir;
  const json config = {{"command", "design-gains"},
                       {"params", table_params_json()},
                       {"options", {{"maneuver", "lane_change"}, {"speed", 1.0}, {"pole", -8.0}}}};
  const std::string cfg = write_config(dir, "cfg.json", config);
  CHECK(run_cli({"design-gains", "--config", cfg, "--out", dir.path.string()}) == 0);
  const json report = json::parse(slurp(dir.file("gains.json")));
  CHECK(report["gains"]["D_theta_Ns"].get<double>() == doctest::Approx(-2042.70).epsilon(0.005));
  CHECK(report["gains"]["P_theta_N"].get<double>() == doctest::Approx(-7637.29).epsilon(0.005));
  CHECK(report["gains"]["D_r_Ns_per_m"].get<double>() == doctest::Approx(2116.86).epsilon(0.005));
  CHECK(report["gains"]["P_r_N_per_m"].get<double>() == doctest::Approx(11942.04).epsilon(0.005));
  CHECK(report["gains"]["P_psi_N"].get<double>() == doctest::Approx(3382.02).epsilon(0.005));
  CHECK(report["gains"]["P_y_N_per_m"].get<double>() == doctest::Approx(4509.36).epsilon(0.005));
  CHECK(report["rank_Mc"].get<int>() == 6);
  CHECK(report["rank_Moc"].get<int>() == 6);
  CHECK(report["closed_loop_char_coeff_rel_err"].get<double>() < 1e-6);
}

TEST_CASE("cli design-gains rejects a non-negative pole") {
  TempDir dir;
  const json config = {{"command", "design-gains"},
                       {"params", table_params_json()},
                       {"options", {{"maneuver", "turn"}, {"speed", 1.0}, {"pole", 0.0}}}};
  const std::string cfg = write_config(dir, "cfg.json", config);
  CHECK(run_cli({"design-gains", "--config", cfg}) == 2);
}

TEST_CASE("cli maneuver emits trace, metrics and deterministic output") {
  TempDir dir;
  const json config = {{"command", "maneuver"},
                       {"params", table_params_json()},
                       {"options",
                        {{"maneuver", "turn"}, {"speed", 1.0}, {"gains", "design"}, {"t_end", 10.0}}}};
  const std::string cfg = write_config(dir, "cfg.json", config);
  const std::string out1 = (dir.path / "a").string();
  CHECK(run_cli({"maneuver", "--config", cfg, "--out", out1, "--svg"}) == 0);

  const json metrics = json::parse(slurp(out1 + "/maneuver_metrics.json"));
  CHECK(std::abs(metrics["final_yaw_error_rad"].get<double>()) < 0.02);
  CHECK(metrics["max_constraint_residual_m_per_s"].get<double>() < 1e-8);

  // header, column names, record count
  std::ifstream in(out1 + "/maneuver.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# config:", 0) == 0);
  std::getline(in, line);
  CHECK(line == "t,omega1,omega2,omega3,theta,sigma,r,psi,phi,xG,yG,u,vP_norm,energy,work");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 10001);

  // byte-identical rerun
  const std::string out2 = (dir.path / "b").string();
  CHECK(run_cli({"maneuver", "--config", cfg, "--out", out2}) == 0);
  CHECK(slurp(out1 + "/maneuver.csv") == slurp(out2 + "/maneuver.csv"));

  for (const char* name : {"maneuver_theta.svg", "maneuver_r.svg", "maneuver_psi.svg",
                           "maneuver_u.svg", "maneuver_path.svg"})
    CHECK(fs::exists(fs::path(out1) / name));
}

TEST_CASE("cli maneuver csv round-trips to full precision") {
  TempDir dir;
  const json config = {{"command", "maneuver"},
                       {"params", table_params_json()},
                       {"options",
                        {{"maneuver", "lane_change"},
                         {"speed", 1.0},
                         {"amplitude", 2.5},
                         {"gains", "design"},
                         {"t_end", 1.0}}}};
  const std::string cfg = write_config(dir, "cfg.json", config);
  CHECK(run_cli({"maneuver", "--config", cfg, "--out", dir.path.string()}) == 0);

  std::ifstream in(dir.file("maneuver.csv"));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const double value = std::strtod(tok.c_str(), nullptr);
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", value);
      CHECK(tok == buf);
    }
  }
}

TEST_CASE("cli root-locus detects both critical rates") {
  TempDir dir;
  const json config = {{"command", "root-locus"},
                       {"params", table_params_json()},
                       {"options",
                        {{"phi_dot_min", 0.0}, {"phi_dot_max", 6.0}, {"count", 601},
                         {"m0_list", {1.0, 5.0, 20.0}}}}};
  const std::string cfg = write_config(dir, "cfg.json", config);
  CHECK(run_cli({"root-locus", "--config", cfg, "--out", dir.path.string()}) == 0);

  std::ifstream in(dir.file("root_locus.csv"));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line == "phi_dot_star,model,branch,re,im");
  struct Key {
    std::string model;
    double prev_max = -1.0;
    double cross = -1.0;
  };
  std::map<std::string, std::map<double, double>> max_re;  // model -> phi_dot -> max re
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string fd_s, model, branch, re_s, im_s;
    std::getline(ss, fd_s, ',');
    std::getline(ss, model, ',');
    std::getline(ss, branch, ',');
    std::getline(ss, re_s, ',');
    std::getline(ss, im_s, ',');
    const double fd = std::strtod(fd_s.c_str(), nullptr);
    const double re = std::strtod(re_s.c_str(), nullptr);
    auto& row = max_re[model];
    row[fd] = std::max(row.count(fd) ? row[fd] : -1e300, re);
  }
  auto crossing = [](const std::map<double, double>& row) {
    double prev_fd = 0.0, prev = 1.0, cross = -1.0;
    bool first = true;
    for (const auto& [fd, re] : row) {
      if (!first && prev > 1e-7 && re <= 1e-7) cross = 0.5 * (prev_fd + fd);
      prev = re;
      prev_fd = fd;
      first = false;
    }
    return cross;
  };
  const double res = 6.0 / 600.0;
  CHECK(std::abs(crossing(max_re["wheel"]) - 3.30151) <= res);
  for (const char* key : {"m0=1", "m0=5", "m0=20"})
    CHECK(std::abs(crossing(max_re[key]) - 4.04351) <= res);
}

TEST_CASE("cli root-locus rejects an empty sweep") {
  TempDir dir;
  const json config = {{"command", "root-locus"},
                       {"params", table_params_json()},
                       {"options", {{"phi_dot_min", 0.0}, {"phi_dot_max", 6.0}, {"count", 1}}}};
  const std::string cfg = write_config(dir, "cfg.json", config);
  CHECK(run_cli({"root-locus", "--config", cfg, "--out", dir.path.string()}) == 2);
}

TEST_CASE("cli binary end-to-end exit codes") {
  TempDir dir;
  const std::string bin = UNIDYN_CLI_PATH;
  CHECK(std::system((bin + " --help > /dev/null").c_str()) == 0);

  const json good = {{"command", "design-gains"},
                     {"params", table_params_json()},
                     {"options", {{"maneuver", "turn"}, {"speed", 5.0}}}};
  const std::string good_cfg = write_config(dir, "good.json", good);
  CHECK(WEXITSTATUS(std::system((bin + " design-gains --config " + good_cfg +
                                 " --out " + dir.path.string() + " > /dev/null")
                                    .c_str())) == 0);

  const json bad = {{"command", "design-gains"},
                    {"params", table_params_json()},
                    {"options", {{"maneuver", "turn"}, {"speed", -1.0}}}};
  const std::string bad_cfg = write_config(dir, "bad.json", bad);
  CHECK(WEXITSTATUS(std::system((bin + " design-gains --config " + bad_cfg +
                                 " 2> /dev/null")
                                    .c_str())) == 2);

  const double excluded =
      std::sqrt(2.0 * 5.0 * 9.81 / (3.0 * 10.0 * 0.3 * std::pow(std::cos(0.2), 3)));
  const json solver = {{"command", "steady-state"},
                       {"params", table_params_json()},
                       {"options", {{"theta_star", 0.2}, {"psi_dot_star", excluded}}}};
  const std::string solver_cfg = write_config(dir, "solver.json", solver);
  CHECK(WEXITSTATUS(std::system((bin + " steady-state --config " + solver_cfg +
                                 " 2> /dev/null")
                                    .c_str())) == 3);
}
