#include "unidyn/steady_state.hpp"

#include <cmath>

#include "unidyn/dynamics.hpp"

namespace unidyn {

std::string to_string(SteadyStateKind k) {
  switch (k) {
    case SteadyStateKind::StraightRolling: return "straight_rolling";
    case SteadyStateKind::TurningRolling: return "turning_rolling";
    case SteadyStateKind::Spinning: return "spinning";
    case SteadyStateKind::Static: return "static";
    case SteadyStateKind::NonTiltedTurning: return "non_tilted_turning";
    case SteadyStateKind::TiltedSpinning: return "tilted_spinning";
  }
  return "?";
}

std::string to_string(RegionLabel label) {
  switch (label) {
    case RegionLabel::FeasibleMassBelowCenter: return "feasible_below_center";
    case RegionLabel::FeasibleMassAboveCenter: return "feasible_above_center";
    case RegionLabel::Infeasible: return "infeasible";
  }
  return "?";
}

double wheel_steady_residual(double theta_star, double psi_dot_star, double phi_dot_star,
                             const PhysicalParams& p) {
  const double s = std::sin(theta_star), c = std::cos(theta_star);
  return 5.0 * psi_dot_star * psi_dot_star * p.R * s * c +
         6.0 * psi_dot_star * phi_dot_star * p.R * c + 4.0 * p.g * s;
}

double wheel_pitch_rate(double theta_star, double psi_dot_star, const PhysicalParams& p) {
  if (psi_dot_star == 0.0)
    throw ZeroYawRateError("wheel_pitch_rate: psi_dot* = 0 (straight rolling has free pitch rate)");
  return -(5.0 / 6.0) * psi_dot_star * std::sin(theta_star) -
         2.0 * p.g * std::tan(theta_star) / (3.0 * p.R * psi_dot_star);
}

SteadyState make_wheel_steady(double theta_star, double psi_dot_star, const PhysicalParams& p) {
  check_tilt(theta_star);
  SteadyState ss;
  ss.theta_star = theta_star;
  ss.psi_dot_star = psi_dot_star;
  ss.r_star = 0.0;
  ss.feasible = true;
  if (psi_dot_star == 0.0) {
    if (theta_star != 0.0)
      throw DomainError("wheel steady state with psi_dot* = 0 requires theta* = 0");
    ss.kind = SteadyStateKind::Static;
    ss.phi_dot_star = 0.0;
    return ss;
  }
  ss.phi_dot_star = wheel_pitch_rate(theta_star, psi_dot_star, p);
  ss.kind = (ss.phi_dot_star == 0.0) ? SteadyStateKind::Spinning : SteadyStateKind::TurningRolling;
  return ss;
}

SteadyState make_wheel_straight_rolling(double phi_dot_star) {
  SteadyState ss;
  ss.kind = (phi_dot_star == 0.0) ? SteadyStateKind::Static : SteadyStateKind::StraightRolling;
  ss.phi_dot_star = phi_dot_star;
  return ss;
}

SteadyPose wheel_steady_trajectory(const SteadyState& ss, double t, const PhysicalParams& p,
                                   double psi0, double phi0, double x0, double y0) {
  SteadyPose pose;
  pose.psi = ss.psi_dot_star * t + psi0;
  pose.phi = ss.phi_dot_star * t + phi0;
  if (ss.psi_dot_star != 0.0) {
    const double rho = (ss.phi_dot_star / ss.psi_dot_star + std::sin(ss.theta_star)) * p.R;
    pose.xg = rho * std::sin(pose.psi) + x0;
    pose.yg = -rho * std::cos(pose.psi) + y0;
  } else {
    pose.xg = ss.phi_dot_star * t * p.R * std::cos(psi0) + x0;
    pose.yg = ss.phi_dot_star * t * p.R * std::sin(psi0) + y0;
  }
  return pose;
}

double contact_circle_radius(const SteadyState& ss, const PhysicalParams& p) {
  if (ss.psi_dot_star == 0.0)
    throw ZeroYawRateError("contact_circle_radius: straight rolling has no contact circle");
  return std::abs(ss.phi_dot_star / ss.psi_dot_star) * p.R;
}

double cg_circle_radius(const SteadyState& ss, const PhysicalParams& p) {
  if (ss.psi_dot_star == 0.0)
    throw ZeroYawRateError("cg_circle_radius: straight rolling has no CG circle");
  return std::abs(ss.phi_dot_star / ss.psi_dot_star + std::sin(ss.theta_star)) * p.R;
}

Eigen::Vector2d unicycle_steady_residuals(double theta_star, double psi_dot_star,
                                          double phi_dot_star, double r_star,
                                          const PhysicalParams& p) {
  const double s = std::sin(theta_star), c = std::cos(theta_star);
  const double m = p.m, m0 = p.m0, R = p.R, g = p.g;
  const double pd = psi_dot_star, fd = phi_dot_star, r = r_star;
  Eigen::Vector2d res;
  res[0] = 5 * m * R * R * pd * pd * s * c + 4 * m0 * R * pd * pd * r * s * s -
           4 * m0 * pd * pd * r * r * s * c + 6 * m * R * R * pd * fd * c +
           4 * m0 * R * pd * fd * r * s - 4 * m0 * g * r * c + 4 * m * g * R * s;
  res[1] = m * R * R * R * pd * fd * c + 4 * m0 * R * R * pd * fd * r * s -
           4 * m0 * R * pd * fd * r * r * c + 5 * m * R * R * pd * pd * r * c * c +
           4 * m0 * R * R * pd * pd * r * s * s - 8 * m0 * R * pd * pd * r * r * s * c +
           4 * m0 * pd * pd * r * r * r * c * c - m * g * R * R * s - 4 * m0 * g * R * r * c -
           4 * m0 * g * r * r * s;
  return res;
}

SteadyState unicycle_solve(double theta_star, double psi_dot_star, const PhysicalParams& p) {
  check_tilt(theta_star);
  if (!(p.m0 > 0.0)) throw InvalidParamsError("unicycle_solve requires m0 > 0");
  if (psi_dot_star == 0.0)
    throw ZeroYawRateError(
        "unicycle_solve: psi_dot* = 0 is straight rolling (theta* = 0, r* = 0, free pitch rate)");
  const double s = std::sin(theta_star), c = std::cos(theta_star);
  const double m = p.m, m0 = p.m0, R = p.R, g = p.g, pd = psi_dot_star;
  const double excluded = std::sqrt(2.0 * m0 * g / (3.0 * m * R * c * c * c));
  if (std::abs(std::abs(pd) - excluded) < 1e-9)
    throw ExcludedYawRateError(
        "unicycle_solve: psi_dot* = " + std::to_string(pd) +
        " sits at the excluded rate +-sqrt(2 m0 g / (3 m R cos^3 theta*)) = +-" +
        std::to_string(excluded) + " where r* diverges (non-tilted turning family)");

  const double r = m * R * (pd * pd * R * c + 2.0 * g) * s * c /
                   (6.0 * pd * pd * m * R * c * c * c - 4.0 * m0 * g);
  const double fd = (-4.0 * m * g * R * s + pd * pd * (4.0 * m0 * r * r - 5.0 * m * R * R) * s * c -
                     4.0 * pd * pd * m0 * R * r * s * s + 4.0 * m0 * g * r * c) /
                    (pd * R * (6.0 * m * R * c + 4.0 * m0 * r * s));

  SteadyState ss;
  ss.theta_star = theta_star;
  ss.psi_dot_star = pd;
  ss.phi_dot_star = fd;
  ss.r_star = r;
  ss.kind = (fd == 0.0) ? SteadyStateKind::Spinning : SteadyStateKind::TurningRolling;
  ss.feasible = steady_feasible(ss, p);
  return ss;
}

std::pair<SteadyState, SteadyState> non_tilted_turning(double r_star, const PhysicalParams& p) {
  if (!(p.m0 > 0.0)) throw InvalidParamsError("non_tilted_turning requires m0 > 0");
  const double pd = std::sqrt(2.0 * p.m0 * p.g / (3.0 * p.m * p.R));
  const double fd = std::sqrt(2.0 * p.m0 * p.g / (3.0 * p.m * p.R * p.R * p.R)) * r_star;
  SteadyState a, b;
  a.kind = b.kind =
      (r_star == 0.0) ? SteadyStateKind::Spinning : SteadyStateKind::NonTiltedTurning;
  a.psi_dot_star = pd;
  a.phi_dot_star = fd;
  b.psi_dot_star = -pd;
  b.phi_dot_star = -fd;
  a.r_star = b.r_star = r_star;
  a.feasible = b.feasible = true;  // theta* = 0, z_A = R > 0
  return {a, b};
}

SteadyState tilted_spinning(double theta_star, const PhysicalParams& p, int yaw_sign) {
  check_tilt(theta_star);
  if (!(p.m0 > 0.0)) throw InvalidParamsError("tilted_spinning requires m0 > 0");
  if (theta_star == 0.0)
    throw DomainError("tilted_spinning: theta* = 0 degenerates to spinning at the center");
  const double s = std::sin(theta_star), c = std::cos(theta_star), t = s / c;
  const double m = p.m, m0 = p.m0, R = p.R, g = p.g;
  const double r = R * t / (2.0 * m0) *
                   (m * c * c + m0 + std::sqrt(m * m * c * c * c * c + 3.0 * m * m0 * c * c +
                                               m0 * m0));
  const double num = 4.0 * m0 * g * r * c - 4.0 * m * g * R * s;
  const double den = (5.0 * m * R * R - 4.0 * m0 * r * r) * s * c + 4.0 * m0 * R * r * s * s;
  const double radicand = num / den;
  if (!(radicand > 0.0))
    throw NegativeRadicandError("tilted_spinning: yaw-rate radicand is not positive at theta* = " +
                                std::to_string(theta_star));
  SteadyState ss;
  ss.kind = SteadyStateKind::TiltedSpinning;
  ss.theta_star = theta_star;
  ss.psi_dot_star = (yaw_sign >= 0 ? 1.0 : -1.0) * std::sqrt(radicand);
  ss.phi_dot_star = 0.0;
  ss.r_star = r;
  ss.feasible = steady_feasible(ss, p);
  return ss;
}

bool steady_feasible(const SteadyState& ss, const PhysicalParams& p) {
  return point_mass_height(ss.theta_star, ss.r_star, p) > 0.0;
}

RegionLabel classify_region(double theta_star, double psi_dot_star, const PhysicalParams& p) {
  const SteadyState ss = unicycle_solve(theta_star, psi_dot_star, p);
  const double z_a = point_mass_height(ss.theta_star, ss.r_star, p);
  const double z_g = p.R * std::cos(ss.theta_star);
  if (z_a <= 0.0) return RegionLabel::Infeasible;
  return (z_a < z_g) ? RegionLabel::FeasibleMassBelowCenter : RegionLabel::FeasibleMassAboveCenter;
}

WheelState embed_wheel(const SteadyState& ss, const PhysicalParams& p) {
  const double s = std::sin(ss.theta_star), c = std::cos(ss.theta_star);
  const SteadyPose pose = wheel_steady_trajectory(ss, 0.0, p);
  WheelState x;
  x[wheel_idx::omega1] = 0.0;
  x[wheel_idx::omega2] = ss.psi_dot_star * s + ss.phi_dot_star;
  x[wheel_idx::omega3] = ss.psi_dot_star * c;
  x[wheel_idx::theta] = ss.theta_star;
  x[wheel_idx::psi] = pose.psi;
  x[wheel_idx::phi] = pose.phi;
  x[wheel_idx::xg] = pose.xg;
  x[wheel_idx::yg] = pose.yg;
  return x;
}

UnicycleState embed_unicycle(const SteadyState& ss, const PhysicalParams& p) {
  const double s = std::sin(ss.theta_star), c = std::cos(ss.theta_star);
  const SteadyPose pose = wheel_steady_trajectory(ss, 0.0, p);
  UnicycleState x;
  x.setZero();
  x[uni_idx::omega2] = ss.psi_dot_star * s + ss.phi_dot_star;
  x[uni_idx::omega3] = ss.psi_dot_star * c;
  x[uni_idx::theta] = ss.theta_star;
  x[uni_idx::r] = ss.r_star;
  x[uni_idx::psi] = pose.psi;
  x[uni_idx::phi] = pose.phi;
  x[uni_idx::xg] = pose.xg;
  x[uni_idx::yg] = pose.yg;
  return x;
}

}  // namespace unidyn
