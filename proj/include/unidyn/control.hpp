#ifndef UNIDYN_CONTROL_HPP
#define UNIDYN_CONTROL_HPP

#include <string>
#include <vector>

#include "unidyn/types.hpp"

// Controllability analysis, reduced models, reference trajectories, the
// output-feedback law and pole-placement gain synthesis for the lane-change
// and turning maneuvers about straight rolling.

namespace unidyn {

enum class ManeuverKind { LaneChange, Turn };

std::string to_string(ManeuverKind k);

// Input column of the control-affine unicycle model at straight rolling:
// nonzero only in the omega1 and sigma rows.
Vector10 input_matrix(const PhysicalParams& p);

// Kalman controllability matrix [B AB ... A^(n-1)B].
Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

// Output controllability matrix [CB CAB ... CA^(n-1)B].
Eigen::MatrixXd output_controllability_matrix(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                              const Eigen::MatrixXd& c);

int output_controllability(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           const Eigen::MatrixXd& c);

// Proportionality constant of the reachable manifold omega3 = -2 phi_dot* theta.
double tilt_yaw_relation(double phi_dot_star);

// Reachable subsystem about straight rolling. Lane change keeps
// (omega1, theta, sigma, r, psi, yG); the turn drops yG.
struct ReducedModel {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  std::vector<std::string> labels;
  ManeuverKind kind = ManeuverKind::LaneChange;
};

ReducedModel reduced_model(double phi_dot_star, const PhysicalParams& p, ManeuverKind kind);

// Output selection matrix mapping the full 10-state vector to the reduced
// outputs (6x10 for lane change, 5x10 for turn).
Eigen::MatrixXd output_matrix(ManeuverKind kind);

// Named feedback gains, ordered [D_theta P_theta D_r P_r P_psi (P_y)].
struct GainVector {
  Eigen::VectorXd k;
  ManeuverKind kind = ManeuverKind::LaneChange;

  double d_theta() const { return k[0]; }  // N s
  double p_theta() const { return k[1]; }  // N
  double d_r() const { return k[2]; }      // N s / m
  double p_r() const { return k[3]; }      // N / m
  double p_psi() const { return k[4]; }    // N
  double p_y() const;                      // N / m, lane change only
};

// Unique single-input gains placing every reduced-model eigenvalue at `pole`,
// via characteristic-coefficient matching.
GainVector place_gains(const ReducedModel& reduced, double pole);

// Scalar output-feedback force u = -K (y - y_des).
double feedback(const GainVector& gains, const Eigen::VectorXd& y, const Eigen::VectorXd& y_des);

// Desired outputs for the lane change: only the yG component is nonzero,
// easing from 0 to -L over [2 s, 7 s] along a half cosine.
Eigen::VectorXd reference_lane_change(double t, double lane_offset);

// Desired outputs for the 90-degree right turn: only the psi component is
// nonzero, easing from 0 to -pi/2 over [2 s, 7 s].
Eigen::VectorXd reference_turn(double t);

// Maneuver description; timing and pole follow the published setup.
struct ManeuverSpec {
  ManeuverKind kind = ManeuverKind::LaneChange;
  double speed = 1.0;      // m/s, CG speed of the initial straight rolling
  double amplitude = 2.5;  // lane offset L in m (lane change); pi/2 for the turn
  double t1 = 2.0, t2 = 7.0, t_end = 10.0;
  double pole = -8.0;      // 1/s

  void validate() const;
  Eigen::VectorXd reference(double t) const;
};

}  // namespace unidyn

#endif
