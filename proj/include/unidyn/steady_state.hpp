#ifndef UNIDYN_STEADY_STATE_HPP
#define UNIDYN_STEADY_STATE_HPP

#include <string>
#include <utility>

#include "unidyn/types.hpp"

// Steady-state families of the rolling wheel and the unicycle: residuals,
// closed-form solves, classification and feasibility.

namespace unidyn {

enum class SteadyStateKind {
  StraightRolling,   // psi_dot = 0, theta = 0, pitch rate arbitrary
  TurningRolling,    // generic: contact point traces a circle
  Spinning,          // phi_dot = 0, theta = 0, spin on the spot
  Static,            // wheel only: standing disc
  NonTiltedTurning,  // unicycle only: theta = 0 at the special yaw rates
  TiltedSpinning,    // unicycle only: phi_dot = 0 with nonzero tilt
};

std::string to_string(SteadyStateKind k);

struct SteadyState {
  SteadyStateKind kind = SteadyStateKind::StraightRolling;
  double theta_star = 0.0;    // rad
  double psi_dot_star = 0.0;  // rad/s
  double phi_dot_star = 0.0;  // rad/s
  double r_star = 0.0;        // m, 0 for the wheel
  bool feasible = true;       // point mass above ground, z_A > 0
};

enum class RegionLabel {
  FeasibleMassBelowCenter,  // 0 < z_A < z_G
  FeasibleMassAboveCenter,  // z_A > z_G (boundary z_A = z_G assigned here)
  Infeasible,               // z_A <= 0
};

std::string to_string(RegionLabel label);

// Left-hand side of the wheel steady-state relation
//   5 psi'^2 R sin cos + 6 psi' phi' R cos + 4 g sin = 0.
double wheel_steady_residual(double theta_star, double psi_dot_star, double phi_dot_star,
                             const PhysicalParams& p);

// Pitch rate closing the wheel relation for a turning-rolling state,
//   phi' = -(5/6) psi' sin - 2 g tan / (3 R psi').
double wheel_pitch_rate(double theta_star, double psi_dot_star, const PhysicalParams& p);

// Assembles a classified wheel steady state from (theta*, psi_dot*); for
// straight rolling / static the pitch rate is free and passed explicitly.
SteadyState make_wheel_steady(double theta_star, double psi_dot_star, const PhysicalParams& p);
SteadyState make_wheel_straight_rolling(double phi_dot_star);

// Closed-form generalized coordinates of a wheel steady state at time t. For
// a turning state (x0, y0) is the circle center; for straight rolling it is
// the starting CG position.
struct SteadyPose {
  double psi, phi, xg, yg;
};
SteadyPose wheel_steady_trajectory(const SteadyState& ss, double t, const PhysicalParams& p,
                                   double psi0 = 0.0, double phi0 = 0.0, double x0 = 0.0,
                                   double y0 = 0.0);

// Contact-circle and CG-circle radii of a turning-rolling state.
double contact_circle_radius(const SteadyState& ss, const PhysicalParams& p);
double cg_circle_radius(const SteadyState& ss, const PhysicalParams& p);

// Both steady relations of the unicycle expressed in generalized velocities.
Eigen::Vector2d unicycle_steady_residuals(double theta_star, double psi_dot_star,
                                          double phi_dot_star, double r_star,
                                          const PhysicalParams& p);

// Closed-form (phi_dot*, r*) for a generic unicycle turning-rolling state.
// Fails when psi_dot* = 0 or sits at the excluded rates
// +-sqrt(2 m0 g / (3 m R cos^3 theta*)) (within 1e-9 rad/s).
SteadyState unicycle_solve(double theta_star, double psi_dot_star, const PhysicalParams& p);

// Non-tilted turning: the two yaw-rate branches at theta* = 0 for a given
// point-mass position.
std::pair<SteadyState, SteadyState> non_tilted_turning(double r_star, const PhysicalParams& p);

// Tilted spinning (phi_dot* = 0, theta* != 0): yaw rate of the requested sign
// and the point-mass position with sgn r* = sgn theta*.
SteadyState tilted_spinning(double theta_star, const PhysicalParams& p, int yaw_sign = +1);

// Feasibility per z_A = R cos + r sin > 0.
bool steady_feasible(const SteadyState& ss, const PhysicalParams& p);

// Fig.-5-style region of a generic turning-rolling point.
RegionLabel classify_region(double theta_star, double psi_dot_star, const PhysicalParams& p);

// Embeds a steady state into the full state vector at t = 0 (psi0 = phi0 = 0,
// CG at the closed-form trajectory's starting point with circle center at the
// origin).
WheelState embed_wheel(const SteadyState& ss, const PhysicalParams& p);
UnicycleState embed_unicycle(const SteadyState& ss, const PhysicalParams& p);

}  // namespace unidyn

#endif
