#ifndef UNIDYN_DYNAMICS_HPP
#define UNIDYN_DYNAMICS_HPP

#include <cmath>

#include "unidyn/types.hpp"

// Exact nonlinear vector fields of the rolling wheel and the point-mass-on-axle
// unicycle, plus the kinematic reconstruction and energy diagnostics built on
// the same frames.
//
// Conventions: the wheel-fixed frame F2 has x in the wheel plane tangent to
// the contact path, y along the axle, z in the wheel plane through the center.
// Pseudo velocities are the wheel angular velocity resolved in F2,
//   omega1 = theta_dot, omega2 = psi_dot sin(theta) + phi_dot,
//   omega3 = psi_dot cos(theta),
// and for the unicycle additionally sigma = r_dot (mass speed along the axle).

namespace unidyn {

// Right-hand side of the rolling-wheel equations of motion. The first four
// components (essential dynamics) depend only on (omega1..3, theta).
template <class Scalar>
WheelStateT<Scalar> wheel_rhs(const WheelStateT<Scalar>& x, const PhysicalParams& p) {
  using std::cos, std::sin, std::tan;
  const Scalar w1 = x[wheel_idx::omega1], w2 = x[wheel_idx::omega2], w3 = x[wheel_idx::omega3];
  const Scalar th = x[wheel_idx::theta], ps = x[wheel_idx::psi];
  check_tilt(th);
  const Scalar s = sin(th), c = cos(th), tt = tan(th);
  const Scalar R = p.R, g = p.g;

  WheelStateT<Scalar> d;
  d[wheel_idx::omega1] = Scalar(1.2) * w2 * w3 - Scalar(0.2) * w3 * w3 * tt + Scalar(0.8) * g / R * s;
  d[wheel_idx::omega2] = Scalar(-2.0 / 3.0) * w1 * w3;
  d[wheel_idx::omega3] = Scalar(-2) * w1 * w2 + w1 * w3 * tt;
  d[wheel_idx::theta] = w1;
  d[wheel_idx::psi] = w3 / c;
  d[wheel_idx::phi] = w2 - w3 * tt;
  d[wheel_idx::xg] = w1 * R * sin(ps) * c + w2 * R * cos(ps);
  d[wheel_idx::yg] = -w1 * R * cos(ps) * c + w2 * R * sin(ps);
  return d;
}

namespace detail {

// Unicycle pseudo-acceleration block shared by the full field and the m0 -> 0
// limit form. Returns (omega1_dot, omega2_dot, omega3_dot, sigma_dot).
// `u_term` carries the already-scaled control contribution of the sigma row;
// the omega1 row control contribution is passed separately.
template <class Scalar>
Eigen::Matrix<Scalar, 4, 1> unicycle_pseudo_accel(const UnicycleStateT<Scalar>& x,
                                                  const PhysicalParams& p, Scalar m0,
                                                  Scalar u_row1, Scalar u_row4) {
  using std::cos, std::sin, std::tan;
  const Scalar w1 = x[uni_idx::omega1], w2 = x[uni_idx::omega2], w3 = x[uni_idx::omega3];
  const Scalar th = x[uni_idx::theta], sg = x[uni_idx::sigma], r = x[uni_idx::r];
  const Scalar s = sin(th), c = cos(th), tt = tan(th);
  const Scalar m = p.m, R = p.R, g = p.g;

  const Scalar D1 = 5 * m * R * R + 4 * m0 * r * r;
  const Scalar D2 = 3 * m * R * R + 2 * m0 * R * R + 12 * m0 * r * r;

  Eigen::Matrix<Scalar, 4, 1> a;
  a[0] = (4 * w1 * w1 * m0 * R * r - w3 * w3 * (m * R * R + 4 * m0 * r * r) * tt -
          8 * w1 * sg * m0 * r + 2 * w2 * w3 * R * (3 * m * R + 2 * m0 * r * tt) -
          4 * m0 * g * r * c + 4 * m * g * R * s + u_row1) /
         D1;
  a[1] = 2 *
         (-2 * w1 * w2 * m0 * R * r - w1 * w3 * (m * R * R + m0 * R * R + 4 * m0 * r * r) +
          2 * w3 * sg * m0 * R) /
         D2;
  a[2] = (-2 * w1 * w2 * R * R * (3 * m + 2 * m0) +
          w1 * w3 * (3 * m * R * R * tt + 2 * m0 * (R * R * tt + 2 * R * r + 6 * r * r * tt)) -
          24 * w3 * sg * m0 * r) /
         D2;
  a[3] = (w1 * w1 * (5 * m * R * R + 4 * m0 * (R * R + r * r)) * r +
          w3 * w3 * (5 * m * R * R * r - 4 * m0 * R * r * r * tt + 4 * m0 * r * r * r -
                     m * R * R * R * tt) -
          8 * m0 * R * r * w1 * sg + w2 * w3 * R * (m * R * R + 4 * m0 * (R * r * tt - r * r)) -
          (m * R * R + 4 * m0 * r * r) * g * s - 4 * m0 * g * R * r * c + u_row4) /
         D1;
  return a;
}

template <class Scalar>
UnicycleStateT<Scalar> unicycle_field(const UnicycleStateT<Scalar>& x, const PhysicalParams& p,
                                      Scalar m0, Scalar u_row1, Scalar u_row4) {
  using std::cos, std::sin, std::tan;
  const Scalar w1 = x[uni_idx::omega1], w2 = x[uni_idx::omega2], w3 = x[uni_idx::omega3];
  const Scalar th = x[uni_idx::theta], ps = x[uni_idx::psi];
  check_tilt(th);
  const Scalar c = cos(th), tt = tan(th);
  const Scalar R = p.R;

  const Eigen::Matrix<Scalar, 4, 1> a = unicycle_pseudo_accel(x, p, m0, u_row1, u_row4);
  UnicycleStateT<Scalar> d;
  d[uni_idx::omega1] = a[0];
  d[uni_idx::omega2] = a[1];
  d[uni_idx::omega3] = a[2];
  d[uni_idx::theta] = w1;
  d[uni_idx::sigma] = a[3];
  d[uni_idx::r] = x[uni_idx::sigma];
  d[uni_idx::psi] = w3 / c;
  d[uni_idx::phi] = w2 - w3 * tt;
  d[uni_idx::xg] = w1 * R * sin(ps) * c + w2 * R * cos(ps);
  d[uni_idx::yg] = -w1 * R * cos(ps) * c + w2 * R * sin(ps);
  return d;
}

}  // namespace detail

// Right-hand side of the unicycle equations of motion with control force u
// acting along the axle between wheel and point mass. Affine in u.
// m0 = 0 is rejected: the sigma equation carries a 1/m0 control coefficient;
// use wheel_rhs (or unicycle_rhs_wheel_limit) for the pure wheel.
template <class Scalar>
UnicycleStateT<Scalar> unicycle_rhs(const UnicycleStateT<Scalar>& x, const PhysicalParams& p,
                                    Scalar u) {
  if (!(p.m0 > 0.0))
    throw InvalidParamsError("unicycle_rhs requires m0 > 0; m0 = 0 is the wheel model");
  const Scalar m0 = Scalar(p.m0);
  const Scalar m = Scalar(p.m), R = Scalar(p.R), r = x[uni_idx::r];
  const Scalar u_row1 = 4 * R * u;
  const Scalar u_row4 = (5 * (m / m0) * R * R + 4 * R * R + 4 * r * r) * u;
  return detail::unicycle_field(x, p, m0, u_row1, u_row4);
}

// The unicycle field in the analytic m0 -> 0 limit (u = 0): every m0 factor is
// cancelled rather than divided. On the shared states this coincides with the
// wheel field; the sigma row keeps its finite limit.
template <class Scalar>
UnicycleStateT<Scalar> unicycle_rhs_wheel_limit(const UnicycleStateT<Scalar>& x,
                                                const PhysicalParams& p) {
  return detail::unicycle_field(x, p, Scalar(0), Scalar(0), Scalar(0));
}

// Componentwise difference between the m0 -> 0 limit of the unicycle field and
// the wheel field on the shared states (omega1..3, theta, psi, phi, xG, yG).
// Requires r = sigma = 0 so the two state spaces describe the same motion.
inline WheelState wheel_limit_check(const UnicycleState& x, const PhysicalParams& p) {
  const UnicycleState du = unicycle_rhs_wheel_limit(x, p);
  WheelState xw;
  xw << x[uni_idx::omega1], x[uni_idx::omega2], x[uni_idx::omega3], x[uni_idx::theta],
      x[uni_idx::psi], x[uni_idx::phi], x[uni_idx::xg], x[uni_idx::yg];
  const WheelState dw = wheel_rhs(xw, p);
  WheelState res;
  res << du[uni_idx::omega1] - dw[wheel_idx::omega1], du[uni_idx::omega2] - dw[wheel_idx::omega2],
      du[uni_idx::omega3] - dw[wheel_idx::omega3], du[uni_idx::theta] - dw[wheel_idx::theta],
      du[uni_idx::psi] - dw[wheel_idx::psi], du[uni_idx::phi] - dw[wheel_idx::phi],
      du[uni_idx::xg] - dw[wheel_idx::xg], du[uni_idx::yg] - dw[wheel_idx::yg];
  return res;
}

// Generalized velocities recovered from pseudo velocities and angles.
struct GeneralizedVelocities {
  double xg_dot = 0, yg_dot = 0, psi_dot = 0, theta_dot = 0, phi_dot = 0;
  double r_dot = 0;  // unicycle only
};

namespace detail {

inline GeneralizedVelocities reconstruct(double w1, double w2, double w3, double th, double ps,
                                         double R) {
  check_tilt(th);
  GeneralizedVelocities v;
  const double s = std::sin(th), c = std::cos(th);
  v.xg_dot = w1 * R * std::sin(ps) * c + w2 * R * std::cos(ps);
  v.yg_dot = -w1 * R * std::cos(ps) * c + w2 * R * std::sin(ps);
  v.psi_dot = w3 / c;
  v.theta_dot = w1;
  v.phi_dot = w2 - w3 * s / c;
  return v;
}

}  // namespace detail

inline GeneralizedVelocities reconstruct_generalized_velocities(const WheelState& x,
                                                                const PhysicalParams& p) {
  return detail::reconstruct(x[wheel_idx::omega1], x[wheel_idx::omega2], x[wheel_idx::omega3],
                             x[wheel_idx::theta], x[wheel_idx::psi], p.R);
}

inline GeneralizedVelocities reconstruct_generalized_velocities(const UnicycleState& x,
                                                                const PhysicalParams& p) {
  GeneralizedVelocities v =
      detail::reconstruct(x[uni_idx::omega1], x[uni_idx::omega2], x[uni_idx::omega3],
                          x[uni_idx::theta], x[uni_idx::psi], p.R);
  v.r_dot = x[uni_idx::sigma];
  return v;
}

namespace detail {

// v_P = v_G + omega x r_GP resolved in the ground frame. v_G is the
// center-of-gravity velocity in the ground frame (z component = -R theta_dot
// sin theta from the geometric constraint unless supplied explicitly).
inline Eigen::Vector3d contact_velocity_from(const Eigen::Vector3d& v_g, double w1, double w2,
                                             double w3, double th, double ps, double R) {
  check_tilt(th);
  const double s = std::sin(th), c = std::cos(th);
  const double cp = std::cos(ps), sp = std::sin(ps);
  // rotation F2 -> ground (yaw about z, then tilt about the new x)
  Eigen::Matrix3d T02;
  T02 << cp, -sp * c, sp * s,
         sp, cp * c, -cp * s,
         0.0, s, c;
  const Eigen::Vector3d omega_f2(w1, w2, w3);
  const Eigen::Vector3d r_gp_f2(0.0, 0.0, -R);
  return v_g + (T02 * omega_f2).cross(T02 * r_gp_f2);
}

}  // namespace detail

// Contact-point velocity with the horizontal v_G components supplied by the
// caller (the z component follows the geometric constraint).
inline Eigen::Vector3d contact_point_velocity(const WheelState& x, const PhysicalParams& p,
                                              double xg_dot, double yg_dot) {
  const double th = x[wheel_idx::theta];
  const double zg_dot = -p.R * x[wheel_idx::omega1] * std::sin(th);
  return detail::contact_velocity_from(Eigen::Vector3d(xg_dot, yg_dot, zg_dot),
                                       x[wheel_idx::omega1], x[wheel_idx::omega2],
                                       x[wheel_idx::omega3], th, x[wheel_idx::psi], p.R);
}

inline Eigen::Vector3d contact_point_velocity(const WheelState& x, const PhysicalParams& p) {
  const GeneralizedVelocities v = reconstruct_generalized_velocities(x, p);
  return contact_point_velocity(x, p, v.xg_dot, v.yg_dot);
}

inline Eigen::Vector3d contact_point_velocity(const UnicycleState& x, const PhysicalParams& p,
                                              double xg_dot, double yg_dot) {
  const double th = x[uni_idx::theta];
  const double zg_dot = -p.R * x[uni_idx::omega1] * std::sin(th);
  return detail::contact_velocity_from(Eigen::Vector3d(xg_dot, yg_dot, zg_dot),
                                       x[uni_idx::omega1], x[uni_idx::omega2], x[uni_idx::omega3],
                                       th, x[uni_idx::psi], p.R);
}

inline Eigen::Vector3d contact_point_velocity(const UnicycleState& x, const PhysicalParams& p) {
  const GeneralizedVelocities v = reconstruct_generalized_velocities(x, p);
  return contact_point_velocity(x, p, v.xg_dot, v.yg_dot);
}

// Ground-frame height of the point mass, z_A = R cos(theta) + r sin(theta).
inline double point_mass_height(double theta, double r, const PhysicalParams& p) {
  return p.R * std::cos(theta) + r * std::sin(theta);
}

inline double point_mass_height(const UnicycleState& x, const PhysicalParams& p) {
  return point_mass_height(x[uni_idx::theta], x[uni_idx::r], p);
}

// Total mechanical energy. In F2 the wheel CG velocity is (R w2, -R w1, 0)
// and the point-mass velocity (R w2 - r w3, sigma - R w1, r w1); the inertia
// tensor about G is (m R^2 / 4) diag(1, 2, 1).
inline double mechanical_energy(const WheelState& x, const PhysicalParams& p) {
  check_tilt(x[wheel_idx::theta]);
  const double w1 = x[wheel_idx::omega1], w2 = x[wheel_idx::omega2], w3 = x[wheel_idx::omega3];
  const double vg2 = p.R * p.R * (w1 * w1 + w2 * w2);
  const double rot = (p.m * p.R * p.R / 4.0) * (w1 * w1 + 2 * w2 * w2 + w3 * w3);
  return 0.5 * p.m * vg2 + 0.5 * rot + p.m * p.g * p.R * std::cos(x[wheel_idx::theta]);
}

inline double mechanical_energy(const UnicycleState& x, const PhysicalParams& p) {
  check_tilt(x[uni_idx::theta]);
  const double w1 = x[uni_idx::omega1], w2 = x[uni_idx::omega2], w3 = x[uni_idx::omega3];
  const double sg = x[uni_idx::sigma], r = x[uni_idx::r], th = x[uni_idx::theta];
  const double vg2 = p.R * p.R * (w1 * w1 + w2 * w2);
  const double rot = (p.m * p.R * p.R / 4.0) * (w1 * w1 + 2 * w2 * w2 + w3 * w3);
  const double ax = p.R * w2 - r * w3;
  const double ay = sg - p.R * w1;
  const double az = r * w1;
  const double va2 = ax * ax + ay * ay + az * az;
  return 0.5 * p.m * vg2 + 0.5 * rot + p.m * p.g * p.R * std::cos(th) + 0.5 * p.m0 * va2 +
         p.m0 * p.g * point_mass_height(th, r, p);
}

}  // namespace unidyn

#endif
