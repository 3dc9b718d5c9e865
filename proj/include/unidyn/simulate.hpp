#ifndef UNIDYN_SIMULATE_HPP
#define UNIDYN_SIMULATE_HPP

#include <functional>
#include <string>
#include <vector>

#include "unidyn/control.hpp"
#include "unidyn/types.hpp"

// Fixed-step integration of the open- and closed-loop dynamics with trace
// logging and maneuver metrics.

namespace unidyn {

enum class IntegratorMethod { Rk4, Rk45 };

struct IntegratorConfig {
  double h = 1e-3;     // s
  double t_end = 10.0; // s
  IntegratorMethod method = IntegratorMethod::Rk4;

  void validate() const {
    if (!(h > 0.0)) throw DomainError("integrator: step must be positive");
    if (!(t_end > 0.0)) throw DomainError("integrator: horizon must be positive");
  }
  int steps() const { return static_cast<int>(std::floor(t_end / h + 1e-12)); }
};

struct TraceRecord {
  double t = 0.0;
  Eigen::VectorXd state;
  double u = 0.0;        // N
  double vp_norm = 0.0;  // m/s, rolling-constraint residual
  double energy = 0.0;   // J
  double work = 0.0;     // J, integral of u * sigma
};

struct SimTrace {
  std::vector<std::string> state_labels;
  std::vector<TraceRecord> records;
};

// Aborted integration: carries the last finite, in-domain sample.
struct SimulationAbortError : Error {
  SimulationAbortError(const std::string& reason, double t_last, Eigen::VectorXd x_last)
      : Error("simulation aborted at t = " + std::to_string(t_last) + " s: " + reason),
        t_last(t_last),
        x_last(std::move(x_last)) {}
  double t_last;
  Eigen::VectorXd x_last;
};

using Rhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

// Fixed-step integration of dx/dt = f(t, x); one record per step including
// the initial state (floor(t_end/h) + 1 records). Deterministic for given
// inputs. Only t and state are filled; diagnostics stay zero.
SimTrace integrate(const Rhs& f, const Eigen::VectorXd& x0, const IntegratorConfig& config);

// Open-loop trajectories with physics diagnostics attached (constraint
// residual, energy; work stays 0 for the wheel, integrates u*sigma when a
// control law is supplied for the unicycle).
SimTrace simulate_wheel(const WheelState& x0, const PhysicalParams& p,
                        const IntegratorConfig& config);

using ControlLaw = std::function<double(double, const UnicycleState&)>;

SimTrace simulate_unicycle(const UnicycleState& x0, const PhysicalParams& p,
                           const IntegratorConfig& config, const ControlLaw& control = {});

struct ManeuverMetrics {
  double final_lateral_error = 0.0;      // m, mean |yG - target| over the last 0.5 s (lane change)
  double final_yaw_error = 0.0;          // rad, mean |psi - target| over the last 0.5 s
  double max_abs_u = 0.0;                // N
  double max_constraint_residual = 0.0;  // m/s
  double energy_work_residual = 0.0;     // J, max |E(t) - E(0) - W(t)|
};

// Closed-loop maneuver from straight rolling at spec.speed with
// u = -K (C x - y_des(t)).
struct ManeuverResult {
  SimTrace trace;
  ManeuverMetrics metrics;
};

ManeuverResult run_maneuver(const ManeuverSpec& spec, const PhysicalParams& p,
                            const GainVector& gains, const IntegratorConfig& config = {});

ManeuverMetrics metrics(const SimTrace& trace, const ManeuverSpec& spec);

}  // namespace unidyn

#endif
