#include <doctest.h>

#include <cmath>

#include "test_helpers.hpp"
#include "unidyn/control.hpp"
#include "unidyn/dynamics.hpp"
#include "unidyn/linearize.hpp"
#include "unidyn/simulate.hpp"

using namespace unidyn;
using unidyn::testing::table_params;

namespace {

GainVector design(const PhysicalParams& p, const ManeuverSpec& spec) {
  return place_gains(reduced_model(spec.speed / p.R, p, spec.kind), spec.pole);
}

}  // namespace

TEST_CASE("integrate: scalar decay and record layout") {
  IntegratorConfig cfg;
  cfg.h = 0.01;
  cfg.t_end = 1.0;
  const Rhs decay = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd { return -x; };
  Eigen::VectorXd x0(1);
  x0 << 1.0;
  const SimTrace trace = integrate(decay, x0, cfg);
  CHECK(trace.records.size() == 101);
  for (size_t i = 1; i < trace.records.size(); ++i)
    CHECK(trace.records[i].t > trace.records[i - 1].t);
  CHECK(std::abs(trace.records.back().state[0] - std::exp(-1.0)) < 1e-8);
}

TEST_CASE("integrate: straight rolling stays on its ray") {
  const PhysicalParams p = table_params();
  const double fd = 4.0;
  WheelState x0 = WheelState::Zero();
  x0[wheel_idx::omega2] = fd;
  IntegratorConfig cfg;
  const SimTrace trace = simulate_wheel(x0, p, cfg);
  const TraceRecord& last = trace.records.back();
  CHECK(std::abs(last.state[wheel_idx::omega2] - fd) < 1e-10);
  CHECK(std::abs(last.state[wheel_idx::phi] - fd * 10.0) < 1e-9);
  CHECK(std::abs(last.state[wheel_idx::xg] - p.R * fd * 10.0) < 1e-9);
  CHECK(std::abs(last.state[wheel_idx::theta]) < 1e-12);
}

TEST_CASE("integrate: fourth-order convergence on a tilted wheel trajectory") {
  const PhysicalParams p = table_params();
  WheelState x0 = WheelState::Zero();
  x0[wheel_idx::omega1] = 0.3;
  x0[wheel_idx::omega2] = 3.0;
  x0[wheel_idx::omega3] = 0.5;
  x0[wheel_idx::theta] = 0.2;

  auto final_state = [&](double h, IntegratorMethod method) {
    IntegratorConfig cfg;
    cfg.h = h;
    cfg.t_end = 2.0;
    cfg.method = method;
    return simulate_wheel(x0, p, cfg).records.back().state;
  };
  const Eigen::VectorXd ref = final_state(1.0 / 8192.0, IntegratorMethod::Rk4);
  const double e1 = (final_state(1.0 / 256.0, IntegratorMethod::Rk4) - ref).norm();
  const double e2 = (final_state(1.0 / 512.0, IntegratorMethod::Rk4) - ref).norm();
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.25));

  // the fifth-order method is more accurate at the same step
  const double e45 = (final_state(1.0 / 256.0, IntegratorMethod::Rk45) - ref).norm();
  CHECK(e45 < e1 / 4.0);
}

TEST_CASE("integrate aborts carry the last valid sample") {
  const PhysicalParams p = table_params();
  // a wheel falling over reaches the tilt guard in finite time
  WheelState x0 = WheelState::Zero();
  x0[wheel_idx::theta] = 1.4;
  x0[wheel_idx::omega1] = 1.0;
  IntegratorConfig cfg;
  cfg.t_end = 5.0;
  try {
    simulate_wheel(x0, p, cfg);
    FAIL("expected abort");
  } catch (const SimulationAbortError& e) {
    CHECK(e.t_last > 0.0);
    CHECK(e.t_last < 5.0);
    CHECK(e.x_last.allFinite());
  }

  const Rhs blowup = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return 1e30 * x.array().square().matrix() + Eigen::VectorXd::Ones(x.size()) * 1e30;
  };
  Eigen::VectorXd one(1);
  one << 1.0;
  CHECK_THROWS_AS(integrate(blowup, one, cfg), SimulationAbortError);
}

TEST_CASE("traces are deterministic") {
  const PhysicalParams p = table_params();
  ManeuverSpec spec;
  spec.kind = ManeuverKind::Turn;
  spec.speed = 1.0;
  spec.amplitude = M_PI / 2;
  const GainVector gains = design(p, spec);
  IntegratorConfig cfg;
  cfg.t_end = 2.0;
  const ManeuverResult a = run_maneuver(spec, p, gains, cfg);
  const ManeuverResult b = run_maneuver(spec, p, gains, cfg);
  REQUIRE(a.trace.records.size() == b.trace.records.size());
  for (size_t i = 0; i < a.trace.records.size(); ++i) {
    CHECK(a.trace.records[i].state == b.trace.records[i].state);
    CHECK(a.trace.records[i].u == b.trace.records[i].u);
    CHECK(a.trace.records[i].work == b.trace.records[i].work);
  }
}

TEST_CASE("physics invariants along open-loop trajectories") {
  const PhysicalParams p = table_params();

  // wheel from a constraint-consistent tilted start
  WheelState x0 = WheelState::Zero();
  x0[wheel_idx::omega1] = 0.1;
  x0[wheel_idx::omega2] = 3.0;
  x0[wheel_idx::omega3] = 0.4;
  x0[wheel_idx::theta] = 0.2;
  IntegratorConfig cfg;
  const SimTrace wheel_trace = simulate_wheel(x0, p, cfg);
  const double e0 = wheel_trace.records.front().energy;
  for (const TraceRecord& rec : wheel_trace.records) {
    CHECK(rec.vp_norm < 1e-8);
    CHECK(std::abs(rec.energy - e0) / std::max(1.0, e0) < 1e-6);
  }

  // geometric constraint: d/dt (R cos theta) = -R omega1 sin theta, checked
  // with a high-order difference of the integrated tilt series
  const auto& recs = wheel_trace.records;
  const double h = cfg.h;
  for (size_t i = 2; i + 2 < recs.size(); i += 97) {
    auto zg = [&](size_t k) { return p.R * std::cos(recs[k].state[wheel_idx::theta]); };
    const double zg_dot =
        (-zg(i + 2) + 8 * zg(i + 1) - 8 * zg(i - 1) + zg(i - 2)) / (12.0 * h);
    const double want = -p.R * recs[i].state[wheel_idx::omega1] *
                        std::sin(recs[i].state[wheel_idx::theta]);
    CHECK(std::abs(zg_dot - want) < 1e-10);
  }

  // unicycle under zero input conserves energy
  UnicycleState u0 = UnicycleState::Zero();
  u0[uni_idx::omega1] = 0.05;
  u0[uni_idx::omega2] = 4.0;
  u0[uni_idx::omega3] = 0.2;
  u0[uni_idx::theta] = 0.1;
  u0[uni_idx::r] = 0.05;
  const SimTrace uni_trace = simulate_unicycle(u0, p, cfg);
  const double ue0 = uni_trace.records.front().energy;
  for (const TraceRecord& rec : uni_trace.records) {
    CHECK(rec.vp_norm < 1e-8);
    CHECK(std::abs(rec.energy - ue0 - rec.work) / std::max(1.0, ue0) < 1e-6);
    CHECK(rec.work == 0.0);
  }
}

TEST_CASE("work-energy balance under forcing") {
  const PhysicalParams p = table_params();
  UnicycleState x0 = UnicycleState::Zero();
  x0[uni_idx::omega1] = 0.05;
  x0[uni_idx::omega2] = 4.0;
  x0[uni_idx::omega3] = 0.2;
  x0[uni_idx::theta] = 0.1;
  x0[uni_idx::r] = 0.05;
  const ControlLaw wobble = [](double t, const UnicycleState&) { return 2.0 * std::sin(1.7 * t); };
  IntegratorConfig cfg;
  const SimTrace trace = simulate_unicycle(x0, p, cfg, wobble);
  const double e0 = trace.records.front().energy;
  for (const TraceRecord& rec : trace.records)
    CHECK(std::abs(rec.energy - e0 - rec.work) / std::max(1.0, e0) < 1e-6);
  // the forcing genuinely did work
  CHECK(std::abs(trace.records.back().work) > 1e-3);
}

TEST_CASE("massless-limit unicycle trajectories match the wheel on shared states") {
  const PhysicalParams p = table_params();
  WheelState w0 = WheelState::Zero();
  w0[wheel_idx::omega1] = 0.1;
  w0[wheel_idx::omega2] = 3.0;
  w0[wheel_idx::omega3] = 0.4;
  w0[wheel_idx::theta] = 0.2;

  UnicycleState u0 = UnicycleState::Zero();
  u0[uni_idx::omega1] = w0[wheel_idx::omega1];
  u0[uni_idx::omega2] = w0[wheel_idx::omega2];
  u0[uni_idx::omega3] = w0[wheel_idx::omega3];
  u0[uni_idx::theta] = w0[wheel_idx::theta];

  IntegratorConfig cfg;
  const Rhs wheel_f = [&p](double, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return wheel_rhs(WheelState(x), p);
  };
  const Rhs limit_f = [&p](double, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return unicycle_rhs_wheel_limit(UnicycleState(x), p);
  };
  const SimTrace wt = integrate(wheel_f, w0, cfg);
  const SimTrace ut = integrate(limit_f, u0, cfg);
  const int wheel_of_uni[8] = {uni_idx::omega1, uni_idx::omega2, uni_idx::omega3, uni_idx::theta,
                               uni_idx::psi,    uni_idx::phi,    uni_idx::xg,     uni_idx::yg};
  for (size_t i = 0; i < wt.records.size(); i += 50) {
    for (int k = 0; k < 8; ++k)
      CHECK(std::abs(wt.records[i].state[k] - ut.records[i].state[wheel_of_uni[k]]) < 1e-9);
  }
}

TEST_CASE("maneuvers reach their targets") {
  const PhysicalParams p = table_params();

  ManeuverSpec lane;
  lane.kind = ManeuverKind::LaneChange;
  lane.speed = 1.0;
  lane.amplitude = 2.5;
  const ManeuverResult r1 = run_maneuver(lane, p, design(p, lane));
  CHECK(r1.metrics.final_lateral_error / lane.amplitude < 0.02);
  CHECK(r1.metrics.final_yaw_error < 0.02);
  CHECK(r1.metrics.max_abs_u < 10.0);
  CHECK(r1.metrics.max_constraint_residual < 1e-8);
  CHECK(r1.metrics.energy_work_residual / std::max(1.0, r1.trace.records.front().energy) < 1e-6);

  ManeuverSpec turn;
  turn.kind = ManeuverKind::Turn;
  turn.speed = 5.0;
  turn.amplitude = M_PI / 2;
  const ManeuverResult r2 = run_maneuver(turn, p, design(p, turn));
  CHECK(r2.metrics.final_yaw_error < 0.02);
  const double psi_final = r2.trace.records.back().state[uni_idx::psi];
  CHECK(std::abs(psi_final + M_PI / 2) < 0.02);
}

TEST_CASE("supercritical turn has more high-frequency control content") {
  const PhysicalParams p = table_params();
  auto spectral_high_fraction = [&](double speed) {
    ManeuverSpec spec;
    spec.kind = ManeuverKind::Turn;
    spec.speed = speed;
    spec.amplitude = M_PI / 2;
    const ManeuverResult result = run_maneuver(spec, p, design(p, spec));
    // decimate to 10 ms and split the power spectrum at 1 Hz
    std::vector<double> u;
    for (size_t i = 0; i < result.trace.records.size(); i += 10)
      u.push_back(result.trace.records[i].u);
    const size_t n = u.size();
    const double dt = 0.01;
    double low = 0.0, high = 0.0;
    for (size_t k = 1; k <= n / 2; ++k) {
      double re = 0.0, im = 0.0;
      for (size_t j = 0; j < n; ++j) {
        const double arg = 2.0 * M_PI * k * j / n;
        re += u[j] * std::cos(arg);
        im -= u[j] * std::sin(arg);
      }
      const double freq = k / (n * dt);
      (freq > 1.0 ? high : low) += re * re + im * im;
    }
    return high / (low + high);
  };
  CHECK(spectral_high_fraction(5.0) > spectral_high_fraction(1.0));
}

TEST_CASE("open-loop instability grows at the predicted rate") {
  const PhysicalParams p = table_params();
  const double speed = 1.0;
  const double fd = speed / p.R;
  UnicycleState x0 = UnicycleState::Zero();
  x0[uni_idx::omega2] = fd;
  x0[uni_idx::theta] = 1e-6;
  IntegratorConfig cfg;
  cfg.t_end = 3.0;
  const SimTrace trace = simulate_unicycle(x0, p, cfg);
  const double th2 = trace.records[2000].state[uni_idx::theta];
  const double th3 = trace.records[3000].state[uni_idx::theta];
  const double growth = std::log(std::abs(th3 / th2)) / 1.0;

  const CharQuartic q = unicycle_char_quartic(make_wheel_straight_rolling(fd), p);
  double predicted = 0.0;
  for (const Complex& z : q.roots()) predicted = std::max(predicted, z.real());
  CHECK(growth == doctest::Approx(predicted).epsilon(0.05));
}

TEST_CASE("metrics on a synthetic perfect trace") {
  ManeuverSpec spec;
  spec.kind = ManeuverKind::LaneChange;
  spec.speed = 1.0;
  spec.amplitude = 2.5;
  SimTrace trace;
  for (int i = 0; i <= 1000; ++i) {
    TraceRecord rec;
    rec.t = i * 0.01;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(10);
    x[uni_idx::yg] = spec.reference(rec.t)[5];
    rec.state = x;
    rec.energy = 7.0;
    rec.work = 0.0;
    trace.records.push_back(rec);
  }
  const ManeuverMetrics m = metrics(trace, spec);
  CHECK(m.final_lateral_error == 0.0);
  CHECK(m.final_yaw_error == 0.0);
  CHECK(m.max_abs_u == 0.0);
  CHECK(m.energy_work_residual == 0.0);
}

TEST_CASE("terminal metrics are step-size robust") {
  const PhysicalParams p = table_params();
  ManeuverSpec spec;
  spec.kind = ManeuverKind::LaneChange;
  spec.speed = 1.0;
  spec.amplitude = 2.5;
  const GainVector gains = design(p, spec);
  IntegratorConfig coarse, fine;
  coarse.h = 1e-3;
  fine.h = 5e-4;
  const ManeuverMetrics a = run_maneuver(spec, p, gains, coarse).metrics;
  const ManeuverMetrics b = run_maneuver(spec, p, gains, fine).metrics;
  CHECK(std::abs(a.final_lateral_error - b.final_lateral_error) /
            std::max(1.0, std::abs(a.final_lateral_error)) <
        1e-6);
  CHECK(std::abs(a.final_yaw_error - b.final_yaw_error) /
            std::max(1.0, std::abs(a.final_yaw_error)) <
        1e-6);
}

TEST_CASE("closed-loop nonlinear dynamics match the linear model to first order") {
  const PhysicalParams p = table_params();
  const double speed = 2.0;
  const double fd = speed / p.R;
  const GainVector gains = place_gains(reduced_model(fd, p, ManeuverKind::LaneChange), -8.0);
  const Eigen::MatrixXd c = output_matrix(ManeuverKind::LaneChange);
  const Matrix10 a = unicycle_state_matrix(make_wheel_straight_rolling(fd), p);
  const Vector10 b = input_matrix(p);
  const Eigen::MatrixXd closed = a - b * gains.k.transpose() * c;

  Eigen::VectorXd direction = Eigen::VectorXd::Zero(10);
  direction[uni_idx::theta] = 1.0;
  direction[uni_idx::omega1] = -0.5;
  direction[uni_idx::r] = 0.3;

  auto mismatch = [&](double eps) {
    UnicycleState x0 = UnicycleState::Zero();
    x0[uni_idx::omega2] = fd;
    Eigen::VectorXd delta0 = eps * direction;
    UnicycleState x = UnicycleState(x0 + delta0);
    Eigen::VectorXd delta = delta0;
    const double h = 1e-3;
    double worst = 0.0;
    const ControlLaw law = [&](double, const UnicycleState& xs) {
      return -gains.k.dot(c * (xs - x0));
    };
    for (int i = 0; i < 2000; ++i) {
      // nonlinear step
      const Rhs f = [&](double t, const Eigen::VectorXd& z) -> Eigen::VectorXd {
        const UnicycleState zz(z);
        return unicycle_rhs(zz, p, law(t, zz));
      };
      const Eigen::VectorXd k1 = f(0, x), k2 = f(0, x + h / 2 * k1), k3 = f(0, x + h / 2 * k2),
                            k4 = f(0, x + h * k3);
      x = UnicycleState(x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4));
      // linear step
      const Eigen::VectorXd l1 = closed * delta, l2 = closed * (delta + h / 2 * l1),
                            l3 = closed * (delta + h / 2 * l2), l4 = closed * (delta + h * l3);
      delta += h / 6 * (l1 + 2 * l2 + 2 * l3 + l4);
      worst = std::max(worst, (x - (x0 + delta)).cwiseAbs().maxCoeff());
    }
    return worst;
  };

  const double m1 = mismatch(1e-4);
  const double m2 = mismatch(5e-5);
  CHECK(m1 / m2 == doctest::Approx(4.0).epsilon(0.3));
}
