#ifndef UNIDYN_LINEARIZE_HPP
#define UNIDYN_LINEARIZE_HPP

#include <array>
#include <utility>
#include <vector>

#include "unidyn/steady_state.hpp"
#include "unidyn/types.hpp"

// State matrices about steady states, closed-form characteristic roots,
// critical rates and stability maps.

namespace unidyn {

inline constexpr double default_root_threshold = 1e-7;  // Re(lambda) above this is unstable

// State matrix of the wheel about a steady state; time-varying entries use
// psi*(t) = psi_dot* t (psi0 = 0).
Matrix8 wheel_state_matrix(const SteadyState& ss, const PhysicalParams& p, double t = 0.0);

// Closed-form characteristic roots: the +-sqrt pair followed by six zeros.
std::array<Complex, 8> wheel_char_roots(const SteadyState& ss, const PhysicalParams& p);

// Radicand of the closed-form pair with the turning-rolling pitch rate
// substituted; positive means a real (unstable) pair.
double wheel_char_radicand(double theta_star, double psi_dot_star, const PhysicalParams& p);

// Critical yaw rates of the turning-rolling family, ordered. Defined for
// |theta*| <= V; above V every steady state is neutrally stable.
std::pair<double, double> wheel_critical_yaw_rates(double theta_star, const PhysicalParams& p);

// The parameter-free critical tilt angle V = arcsin(sqrt(12/19 - 9 sqrt5/38)).
double critical_tilt_angle();

// Critical pitch rate of wheel straight rolling, sqrt(g / 3R).
double wheel_straight_critical(const PhysicalParams& p);

// Critical yaw rate of wheel spinning, sqrt(4g / 5R).
double wheel_spin_critical(const PhysicalParams& p);

// State matrix of the unicycle about a steady state satisfying the steady
// relations to 1e-9 (otherwise NotSteadyError).
Matrix10 unicycle_state_matrix(const SteadyState& ss, const PhysicalParams& p, double t = 0.0);

// Even quartic factor of the unicycle characteristic equation,
//   c4 lambda^4 + c2 lambda^2 + c0,
// scaled by c4 = 5 m R^2 so that for straight rolling (c4, c2, c0) equal the
// textbook (a, b, c) triple.
struct CharQuartic {
  double c4 = 0, c2 = 0, c0 = 0;
  std::array<Complex, 4> roots() const;
};

CharQuartic unicycle_char_quartic(const SteadyState& ss, const PhysicalParams& p);

// Critical pitch rate of unicycle straight rolling, sqrt(g / 2R); independent
// of both masses.
double unicycle_straight_critical(const PhysicalParams& p);

enum class Verdict { NeutrallyStable, Unstable };

struct StabilityVerdict {
  Verdict verdict = Verdict::NeutrallyStable;
  std::vector<Complex> witness;  // the root(s) deciding the verdict
};

// Unstable iff any root's real part exceeds eps_root; zero roots (hidden
// states) never decide.
StabilityVerdict classify(const std::vector<Complex>& roots,
                          double eps_root = default_root_threshold);

// --- stability maps -----------------------------------------------------

struct GridSpec {
  double theta_min = 0, theta_max = 0;
  int theta_count = 0;
  double psi_dot_min = 0, psi_dot_max = 0;
  int psi_dot_count = 0;

  void validate() const;
  double theta(int i) const;
  double psi_dot(int j) const;
};

enum class MapPointStatus { Stable, Unstable, Skip };

struct MapPoint {
  double theta_star = 0, psi_dot_star = 0;
  double phi_dot_star = 0, r_star = 0;
  MapPointStatus status = MapPointStatus::Skip;
  double max_real_root = 0;  // level-set / margin value; 0 when skipped
};

enum class MapModel { Wheel, Unicycle };

// Per-point stability verdicts over a (theta*, psi_dot*) grid. Points where no
// steady state can be classified (psi_dot* = 0 line, excluded yaw rates,
// residual overflow near them) are marked Skip. Rows are evaluated in
// parallel over `threads` workers; the output is identical to a sequential
// evaluation.
std::vector<MapPoint> stability_map(const GridSpec& grid, MapModel model,
                                    const PhysicalParams& p, int threads = 1);

// --- root locus over straight rolling ------------------------------------

struct SweepSpec {
  double phi_dot_min = 0, phi_dot_max = 0;
  int count = 0;
  void validate() const;
  double phi_dot(int i) const;
};

struct RootLocusSample {
  double phi_dot_star = 0;
  std::array<Complex, 2> wheel{};                 // Eq.-26-type pair
  std::vector<std::array<Complex, 4>> unicycle;   // per m0, branch-continuous
};

struct RootLocus {
  std::vector<double> m0_values;
  std::vector<RootLocusSample> samples;
};

// Characteristic roots of straight rolling as a function of the pitch rate,
// for the wheel and for each configured point mass. Branches are ordered by
// continuity along the sweep.
RootLocus root_locus_straight_rolling(const SweepSpec& sweep, const PhysicalParams& p,
                                      const std::vector<double>& m0_values);

}  // namespace unidyn

#endif
