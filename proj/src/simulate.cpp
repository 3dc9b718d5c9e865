#include "unidyn/simulate.hpp"

#include <cmath>

#include "unidyn/dynamics.hpp"

namespace unidyn {

namespace {

Eigen::VectorXd step_rk4(const Rhs& f, double t, const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd k1 = f(t, x);
  const Eigen::VectorXd k2 = f(t + h / 2, x + (h / 2) * k1);
  const Eigen::VectorXd k3 = f(t + h / 2, x + (h / 2) * k2);
  const Eigen::VectorXd k4 = f(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd step_rk45(const Rhs& f, double t, const Eigen::VectorXd& x, double h) {
  // Fehlberg coefficients, fifth-order combination at fixed step
  const Eigen::VectorXd k1 = f(t, x);
  const Eigen::VectorXd k2 = f(t + h / 4, x + h * (k1 / 4));
  const Eigen::VectorXd k3 = f(t + 3 * h / 8, x + h * (3.0 / 32 * k1 + 9.0 / 32 * k2));
  const Eigen::VectorXd k4 =
      f(t + 12 * h / 13,
        x + h * (1932.0 / 2197 * k1 - 7200.0 / 2197 * k2 + 7296.0 / 2197 * k3));
  const Eigen::VectorXd k5 =
      f(t + h, x + h * (439.0 / 216 * k1 - 8.0 * k2 + 3680.0 / 513 * k3 - 845.0 / 4104 * k4));
  const Eigen::VectorXd k6 =
      f(t + h / 2, x + h * (-8.0 / 27 * k1 + 2.0 * k2 - 3544.0 / 2565 * k3 +
                            1859.0 / 4104 * k4 - 11.0 / 40 * k5));
  return x + h * (16.0 / 135 * k1 + 6656.0 / 12825 * k3 + 28561.0 / 56430 * k4 -
                  9.0 / 50 * k5 + 2.0 / 55 * k6);
}

}  // namespace

SimTrace integrate(const Rhs& f, const Eigen::VectorXd& x0, const IntegratorConfig& config) {
  config.validate();
  if (!x0.allFinite()) throw DomainError("integrate: non-finite initial state");
  const int n = config.steps();
  SimTrace trace;
  trace.records.reserve(static_cast<size_t>(n) + 1);
  Eigen::VectorXd x = x0;
  double t = 0.0;
  trace.records.push_back({t, x, 0, 0, 0, 0});
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd next;
    try {
      next = (config.method == IntegratorMethod::Rk4) ? step_rk4(f, t, x, config.h)
                                                      : step_rk45(f, t, x, config.h);
    } catch (const SingularTiltError& e) {
      throw SimulationAbortError(e.what(), t, x);
    }
    if (!next.allFinite()) throw SimulationAbortError("state became non-finite", t, x);
    x = std::move(next);
    t = (i + 1) * config.h;
    trace.records.push_back({t, x, 0, 0, 0, 0});
  }
  return trace;
}

SimTrace simulate_wheel(const WheelState& x0, const PhysicalParams& p,
                        const IntegratorConfig& config) {
  p.validate();
  const Rhs f = [&p](double, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return wheel_rhs(WheelState(x), p);
  };
  SimTrace trace = integrate(f, x0, config);
  trace.state_labels = {"omega1", "omega2", "omega3", "theta", "psi", "phi", "xG", "yG"};
  for (TraceRecord& rec : trace.records) {
    const WheelState x(rec.state);
    rec.vp_norm = contact_point_velocity(x, p).norm();
    rec.energy = mechanical_energy(x, p);
  }
  return trace;
}

SimTrace simulate_unicycle(const UnicycleState& x0, const PhysicalParams& p,
                           const IntegratorConfig& config, const ControlLaw& control) {
  p.validate();
  if (!(p.m0 > 0.0)) throw InvalidParamsError("simulate_unicycle requires m0 > 0");
  const auto u_of = [&control](double t, const UnicycleState& x) -> double {
    return control ? control(t, x) : 0.0;
  };
  // The work integral rides along as an 11th state, so it shares the
  // integrator's order.
  const Rhs f = [&](double t, const Eigen::VectorXd& z) -> Eigen::VectorXd {
    const UnicycleState x(z.head<10>());
    const double u = u_of(t, x);
    Eigen::VectorXd dz(11);
    dz.head<10>() = unicycle_rhs(x, p, u);
    dz[10] = u * x[uni_idx::sigma];
    return dz;
  };
  Eigen::VectorXd z0(11);
  z0.head<10>() = x0;
  z0[10] = 0.0;
  SimTrace trace = integrate(f, z0, config);
  trace.state_labels = {"omega1", "omega2", "omega3", "theta", "sigma",
                        "r",      "psi",    "phi",    "xG",    "yG"};
  for (TraceRecord& rec : trace.records) {
    const UnicycleState x(rec.state.head<10>());
    rec.work = rec.state[10];
    rec.state = x;
    rec.u = u_of(rec.t, x);
    rec.vp_norm = contact_point_velocity(x, p).norm();
    rec.energy = mechanical_energy(x, p);
  }
  return trace;
}

ManeuverResult run_maneuver(const ManeuverSpec& spec, const PhysicalParams& p,
                            const GainVector& gains, const IntegratorConfig& config) {
  spec.validate();
  p.validate();
  if (gains.kind != spec.kind) throw DomainError("run_maneuver: gain/maneuver kind mismatch");

  const double phi_dot = spec.speed / p.R;
  UnicycleState x0 = UnicycleState::Zero();
  x0[uni_idx::omega2] = phi_dot;

  const Eigen::MatrixXd c = output_matrix(spec.kind);
  const ControlLaw law = [&spec, &gains, c](double t, const UnicycleState& x) -> double {
    const double tt = std::min(t, spec.t_end);
    return feedback(gains, c * x, spec.reference(tt));
  };

  ManeuverResult result;
  result.trace = simulate_unicycle(x0, p, config, law);
  result.metrics = metrics(result.trace, spec);
  return result;
}

ManeuverMetrics metrics(const SimTrace& trace, const ManeuverSpec& spec) {
  if (trace.records.empty()) throw DomainError("metrics: empty trace");
  ManeuverMetrics out;
  const double t_final = trace.records.back().t;
  const double window_start = t_final - 0.5;
  const double e0 = trace.records.front().energy;

  double lat_sum = 0.0, yaw_sum = 0.0;
  int window_count = 0;
  const double yaw_target = spec.kind == ManeuverKind::Turn ? -M_PI / 2.0 : 0.0;
  for (const TraceRecord& rec : trace.records) {
    out.max_abs_u = std::max(out.max_abs_u, std::abs(rec.u));
    out.max_constraint_residual = std::max(out.max_constraint_residual, rec.vp_norm);
    out.energy_work_residual =
        std::max(out.energy_work_residual, std::abs(rec.energy - e0 - rec.work));
    if (rec.t >= window_start) {
      ++window_count;
      yaw_sum += std::abs(rec.state[uni_idx::psi] - yaw_target);
      if (spec.kind == ManeuverKind::LaneChange)
        lat_sum += std::abs(rec.state[uni_idx::yg] + spec.amplitude);
    }
  }
  out.final_yaw_error = yaw_sum / window_count;
  out.final_lateral_error =
      spec.kind == ManeuverKind::LaneChange ? lat_sum / window_count : 0.0;
  return out;
}

}  // namespace unidyn
