#ifndef UNIDYN_TYPES_HPP
#define UNIDYN_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace unidyn {

template <class Scalar> using WheelStateT = Eigen::Matrix<Scalar, 8, 1>;
template <class Scalar> using UnicycleStateT = Eigen::Matrix<Scalar, 10, 1>;
using WheelState = WheelStateT<double>;
using UnicycleState = UnicycleStateT<double>;

using Matrix8 = Eigen::Matrix<double, 8, 8>;
using Matrix10 = Eigen::Matrix<double, 10, 10>;
using Vector10 = Eigen::Matrix<double, 10, 1>;
using Complex = std::complex<double>;

// State component indices. The ordering is fixed everywhere: serialization,
// state matrices and traces all use the same index map.
namespace wheel_idx {
enum : int { omega1 = 0, omega2, omega3, theta, psi, phi, xg, yg };
}
namespace uni_idx {
enum : int { omega1 = 0, omega2, omega3, theta, sigma, r, psi, phi, xg, yg };
}

// Guard band around the horizontal-wheel singularity |theta| = pi/2,
// where the kinematic map loses rank (det C = cos theta).
inline constexpr double singular_tilt_guard = 1e-6;

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularTiltError : Error {
  explicit SingularTiltError(double theta)
      : Error("tilt angle " + std::to_string(theta) +
              " rad is within the guard band of the horizontal-wheel singularity |theta| = pi/2"),
        theta(theta) {}
  double theta;
};

struct InvalidParamsError : Error {
  using Error::Error;
};

struct ZeroYawRateError : Error {
  using Error::Error;
};

struct ExcludedYawRateError : Error {
  using Error::Error;
};

struct NegativeRadicandError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct NotSteadyError : Error {
  using Error::Error;
};

struct SingularMatrixError : Error {
  using Error::Error;
};

struct UncontrollableError : Error {
  using Error::Error;
};

struct NonConvergenceError : Error {
  using Error::Error;
};

// Masses, wheel radius and gravity. m0 = 0 selects the pure-wheel limit.
struct PhysicalParams {
  double m = 10.0;   // wheel mass, kg
  double m0 = 5.0;   // point mass, kg
  double R = 0.3;    // wheel radius, m
  double g = 9.81;   // gravitational acceleration, m/s^2

  void validate() const {
    if (!(m > 0.0)) throw InvalidParamsError("wheel mass m must be positive");
    if (!(R > 0.0)) throw InvalidParamsError("wheel radius R must be positive");
    if (!(g > 0.0)) throw InvalidParamsError("gravitational acceleration g must be positive");
    if (!(m0 >= 0.0)) throw InvalidParamsError("point mass m0 must be non-negative");
  }

  bool wheel_only() const { return m0 == 0.0; }
};

template <class Scalar>
void check_tilt(Scalar theta) {
  using std::abs;
  if (!(abs(theta) < Scalar(M_PI / 2) - Scalar(singular_tilt_guard)))
    throw SingularTiltError(static_cast<double>(theta));
}

}  // namespace unidyn

#endif
