#include "unidyn/control.hpp"

#include <cmath>

#include "unidyn/numerics.hpp"

namespace unidyn {

std::string to_string(ManeuverKind k) {
  return k == ManeuverKind::LaneChange ? "lane_change" : "turn";
}

Vector10 input_matrix(const PhysicalParams& p) {
  if (!(p.m0 > 0.0)) throw InvalidParamsError("input_matrix requires m0 > 0");
  Vector10 b = Vector10::Zero();
  b[uni_idx::omega1] = 4.0 / (5.0 * p.m * p.R);
  b[uni_idx::sigma] = (5.0 * p.m + 4.0 * p.m0) / (5.0 * p.m * p.m0);
  return b;
}

Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw DomainError("controllability_matrix: dimension mismatch");
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd mc(n, n);
  Eigen::VectorXd col = b;
  for (Eigen::Index j = 0; j < n; ++j) {
    mc.col(j) = col;
    col = a * col;
  }
  return mc;
}

Eigen::MatrixXd output_controllability_matrix(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                              const Eigen::MatrixXd& c) {
  if (c.cols() != a.rows()) throw DomainError("output_controllability_matrix: dimension mismatch");
  return c * controllability_matrix(a, b);
}

int output_controllability(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           const Eigen::MatrixXd& c) {
  return numerical_rank(output_controllability_matrix(a, b, c));
}

double tilt_yaw_relation(double phi_dot_star) { return -2.0 * phi_dot_star; }

ReducedModel reduced_model(double phi_dot_star, const PhysicalParams& p, ManeuverKind kind) {
  if (!(p.m0 > 0.0)) throw InvalidParamsError("reduced_model requires m0 > 0");
  const double fd = phi_dot_star;
  const double m = p.m, m0 = p.m0, R = p.R, g = p.g;

  ReducedModel model;
  model.kind = kind;
  model.labels = {"omega1", "theta", "sigma", "r", "psi", "yG"};
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
  a(0, 1) = 0.8 * g / R - 2.4 * fd * fd;
  a(0, 3) = -4.0 * m0 * g / (5.0 * m * R * R);
  a(1, 0) = 1.0;
  a(2, 1) = -(g / 5.0 + 0.4 * R * fd * fd);
  a(2, 3) = -4.0 * m0 * g / (5.0 * m * R);
  a(3, 2) = 1.0;
  a(4, 1) = tilt_yaw_relation(fd);
  a(5, 0) = -R;
  a(5, 4) = R * fd;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(6);
  b[0] = 4.0 / (5.0 * m * R);
  b[2] = (5.0 * m + 4.0 * m0) / (5.0 * m * m0);

  if (kind == ManeuverKind::Turn) {
    model.a = a.topLeftCorner(5, 5);
    model.b = b.head(5);
    model.labels.pop_back();
  } else {
    model.a = a;
    model.b = b;
  }
  return model;
}

Eigen::MatrixXd output_matrix(ManeuverKind kind) {
  const int rows = kind == ManeuverKind::LaneChange ? 6 : 5;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(rows, 10);
  c(0, uni_idx::omega1) = 1.0;
  c(1, uni_idx::theta) = 1.0;
  c(2, uni_idx::sigma) = 1.0;
  c(3, uni_idx::r) = 1.0;
  c(4, uni_idx::psi) = 1.0;
  if (kind == ManeuverKind::LaneChange) c(5, uni_idx::yg) = 1.0;
  return c;
}

double GainVector::p_y() const {
  if (kind != ManeuverKind::LaneChange)
    throw DomainError("P_y gain exists only for the lane change");
  return k[5];
}

GainVector place_gains(const ReducedModel& reduced, double pole) {
  const Eigen::Index n = reduced.a.rows();
  const Eigen::MatrixXd mc = controllability_matrix(reduced.a, reduced.b);
  if (numerical_rank(mc) != n)
    throw UncontrollableError("place_gains: (A, B) pair is not controllable (rank " +
                              std::to_string(numerical_rank(mc)) + " of " + std::to_string(n) +
                              ")");

  // char(A - B K) = char(A) + sum_j K_j c_j(lambda) for a single input; the
  // c_j have degree < n, so matching against (lambda - pole)^n is an n x n
  // linear solve in K.
  const Polynomial open = char_poly_coeffs(reduced.a);
  Eigen::MatrixXd coef(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::RowVectorXd kj = Eigen::RowVectorXd::Zero(n);
    kj[j] = 1.0;
    const Polynomial closed = char_poly_coeffs(reduced.a - reduced.b * kj);
    for (Eigen::Index i = 0; i < n; ++i)
      coef(i, j) = closed.coeffs[static_cast<size_t>(i)] - open.coeffs[static_cast<size_t>(i)];
  }

  // (lambda - pole)^n coefficients, ascending
  Eigen::VectorXd target(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) {
    double binom = 1.0;
    for (Eigen::Index j = 0; j < n - i; ++j) binom = binom * (n - j) / (j + 1);
    target[i] = binom * std::pow(-pole, static_cast<double>(n - i));
  }

  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i)
    rhs[i] = target[i] - open.coeffs[static_cast<size_t>(i)];

  GainVector gains;
  gains.kind = reduced.kind;
  gains.k = solve_linear(coef, rhs);
  return gains;
}

double feedback(const GainVector& gains, const Eigen::VectorXd& y, const Eigen::VectorXd& y_des) {
  if (y.size() != gains.k.size() || y_des.size() != gains.k.size())
    throw DomainError("feedback: gain and output dimensions disagree");
  return -gains.k.dot(y - y_des);
}

namespace {

double eased_step(double t, double t1, double t2, double final_value) {
  if (t < t1) return 0.0;
  if (t < t2) return (final_value / 2.0) * (1.0 - std::cos(M_PI * (t - t1) / (t2 - t1)));
  return final_value;
}

}  // namespace

Eigen::VectorXd reference_lane_change(double t, double lane_offset) {
  if (t < 0.0 || t > 10.0) throw DomainError("reference_lane_change: t outside [0, 10] s");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(6);
  y[5] = eased_step(t, 2.0, 7.0, -lane_offset);
  return y;
}

Eigen::VectorXd reference_turn(double t) {
  if (t < 0.0 || t > 10.0) throw DomainError("reference_turn: t outside [0, 10] s");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(5);
  y[4] = eased_step(t, 2.0, 7.0, -M_PI / 2.0);
  return y;
}

void ManeuverSpec::validate() const {
  if (!(speed > 0.0)) throw DomainError("maneuver: speed must be positive");
  if (!(t1 < t2 && t2 < t_end)) throw DomainError("maneuver: need t1 < t2 < t_end");
  if (!(pole < 0.0)) throw DomainError("maneuver: pole must be negative");
  if (kind == ManeuverKind::LaneChange && !(amplitude > 0.0))
    throw DomainError("maneuver: lane offset must be positive");
}

Eigen::VectorXd ManeuverSpec::reference(double t) const {
  if (t < 0.0 || t > t_end) throw DomainError("reference: t outside maneuver window");
  if (kind == ManeuverKind::LaneChange) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(6);
    y[5] = eased_step(t, t1, t2, -amplitude);
    return y;
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(5);
  y[4] = eased_step(t, t1, t2, -M_PI / 2.0);
  return y;
}

}  // namespace unidyn
