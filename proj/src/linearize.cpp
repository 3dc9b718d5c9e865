#include "unidyn/linearize.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "unidyn/numerics.hpp"

namespace unidyn {

Matrix8 wheel_state_matrix(const SteadyState& ss, const PhysicalParams& p, double t) {
  check_tilt(ss.theta_star);
  const double s = std::sin(ss.theta_star), c = std::cos(ss.theta_star);
  const double tt = s / c;
  const double pd = ss.psi_dot_star, fd = ss.phi_dot_star;
  const double R = p.R, g = p.g;
  const double psis = pd * t;

  Matrix8 a = Matrix8::Zero();
  a(0, 1) = 1.2 * pd * c;
  a(0, 2) = 0.8 * pd * s + 1.2 * fd;
  a(0, 3) = -0.2 * pd * pd + 0.8 * g / R * c;
  a(1, 0) = -(2.0 / 3.0) * pd * c;
  a(2, 0) = -pd * s - 2.0 * fd;
  a(3, 0) = 1.0;
  a(4, 2) = 1.0 / c;
  a(4, 3) = pd * tt;
  a(5, 1) = 1.0;
  a(5, 2) = -tt;
  a(5, 3) = -pd / c;
  a(6, 0) = R * std::sin(psis) * c;
  a(6, 1) = R * std::cos(psis);
  a(6, 4) = -R * std::sin(psis) * (pd * s + fd);
  a(7, 0) = -R * std::cos(psis) * c;
  a(7, 1) = R * std::sin(psis);
  a(7, 4) = R * std::cos(psis) * (pd * s + fd);
  return a;
}

std::array<Complex, 8> wheel_char_roots(const SteadyState& ss, const PhysicalParams& p) {
  const double s = std::sin(ss.theta_star), c = std::cos(ss.theta_star);
  const double pd = ss.psi_dot_star, fd = ss.phi_dot_star;
  const double radicand =
      0.8 * p.g / p.R * c - (pd * pd + 2.8 * pd * fd * s + 2.4 * fd * fd);
  std::array<Complex, 8> roots{};
  if (radicand >= 0.0) {
    roots[0] = Complex(std::sqrt(radicand), 0.0);
    roots[1] = Complex(-std::sqrt(radicand), 0.0);
  } else {
    roots[0] = Complex(0.0, std::sqrt(-radicand));
    roots[1] = Complex(0.0, -std::sqrt(-radicand));
  }
  return roots;
}

double wheel_char_radicand(double theta_star, double psi_dot_star, const PhysicalParams& p) {
  const double fd = wheel_pitch_rate(theta_star, psi_dot_star, p);
  const double s = std::sin(theta_star), c = std::cos(theta_star);
  return 0.8 * p.g / p.R * c -
         (psi_dot_star * psi_dot_star + 2.8 * psi_dot_star * fd * s + 2.4 * fd * fd);
}

std::pair<double, double> wheel_critical_yaw_rates(double theta_star, const PhysicalParams& p) {
  const double s2 = std::sin(theta_star) * std::sin(theta_star);
  const double c = std::cos(theta_star);
  const double disc = 76.0 * s2 * s2 - 96.0 * s2 + 9.0;
  if (disc < 0.0)
    throw DomainError("wheel_critical_yaw_rates: |theta*| exceeds the critical tilt angle; "
                      "every steady state is neutrally stable there");
  const double pref = 2.0 * p.g / (5.0 * p.R);
  const double den = (2.0 * s2 - 3.0) * c;
  double lo = pref * (3.0 - 6.0 * (1.0 - s2) + std::sqrt(disc)) / den;
  double hi = pref * (3.0 - 6.0 * (1.0 - s2) - std::sqrt(disc)) / den;
  if (lo > hi) std::swap(lo, hi);
  return {std::sqrt(std::max(0.0, lo)), std::sqrt(std::max(0.0, hi))};
}

double critical_tilt_angle() {
  return std::asin(std::sqrt(12.0 / 19.0 - 9.0 * std::sqrt(5.0) / 38.0));
}

double wheel_straight_critical(const PhysicalParams& p) { return std::sqrt(p.g / (3.0 * p.R)); }

double wheel_spin_critical(const PhysicalParams& p) { return std::sqrt(4.0 * p.g / (5.0 * p.R)); }

Matrix10 unicycle_state_matrix(const SteadyState& ss, const PhysicalParams& p, double t) {
  check_tilt(ss.theta_star);
  const Eigen::Vector2d res = unicycle_steady_residuals(ss.theta_star, ss.psi_dot_star,
                                                        ss.phi_dot_star, ss.r_star, p);
  if (res.cwiseAbs().maxCoeff() >= 1e-9)
    throw NotSteadyError("unicycle_state_matrix: steady relations violated, residual " +
                         std::to_string(res.cwiseAbs().maxCoeff()));

  const double s = std::sin(ss.theta_star), c = std::cos(ss.theta_star);
  const double tt = s / c;
  const double pd = ss.psi_dot_star, fd = ss.phi_dot_star, r = ss.r_star;
  const double m = p.m, m0 = p.m0, R = p.R, g = p.g;
  const double D1 = 5 * m * R * R + 4 * m0 * r * r;
  const double D2 = 3 * m * R * R + 2 * m0 * R * R + 12 * m0 * r * r;
  const double D1sq = D1 * D1;
  const double psis = pd * t;

  Matrix10 a = Matrix10::Zero();
  a(0, 1) = 2 * R * pd / D1 * (3 * m * R * c + 2 * m0 * r * s);
  a(0, 2) = 2.0 / D1 *
            (2 * m * R * R * pd * s + 3 * m * R * R * fd + 2 * m0 * R * r * pd * s * tt +
             2 * m0 * R * r * fd * tt - 4 * m0 * r * r * pd * s);
  a(0, 3) = 4 * m0 * R * r * pd * (fd + pd * s) / (D1 * c) +
            (-m * R * R * pd * pd + 4 * m * g * R * c - 4 * m0 * r * r * pd * pd +
             4 * m0 * g * r * s) /
                D1;
  a(0, 5) = 4 * m0 / D1sq *
            (5 * m * R * R * R * pd * pd * s * s + 5 * m * R * R * R * pd * fd * s -
             20 * m * R * R * r * pd * pd * s * c - 12 * m * R * R * r * pd * fd * c -
             5 * m * g * R * R * c - 4 * m0 * R * r * r * pd * pd * s * s -
             4 * m0 * R * r * r * pd * fd * s - 8 * m * g * R * r * s + 4 * m0 * g * r * r * c);
  a(1, 0) = -(2 * m * R * R * pd * c + 2 * m0 * R * R * pd * c + 4 * m0 * R * r * pd * s +
              4 * m0 * R * r * fd + 8 * m0 * r * r * pd * c) /
            D2;
  a(1, 4) = 4 * m0 * R * pd * c / D2;
  a(2, 0) = (-3 * m * R * R * pd * s - 2 * m0 * R * R * pd * s - 6 * m * R * R * fd -
             4 * m0 * R * R * fd + 4 * m0 * R * r * pd * c + 12 * m0 * r * r * pd * s) /
            D2;
  a(2, 4) = -24 * m0 * r * pd * c / D2;
  a(3, 0) = 1.0;
  a(4, 1) = R * pd * c / D1 * (m * R * R + 4 * m0 * R * r * tt - 4 * m0 * r * r);
  a(4, 2) = (m * R * R * R * fd - m * R * R * R * pd * s + 10 * m * R * R * r * pd * c +
             4 * m0 * R * R * r * pd * s * tt + 4 * m0 * R * R * r * fd * tt -
             12 * m0 * R * r * r * pd * s - 4 * m0 * R * fd * r * r + 8 * m0 * r * r * r * pd * c) /
            D1;
  // The pd^2 r^2 term here differs from the printed element by one factor of
  // cos(theta*): this is the Jacobian of the verified field, cross-checked by
  // finite differences at tilted steady states.
  a(4, 3) = (1.0 / (2.0 * D1 * c)) *
            (-2 * m * R * R * R * pd * pd * c + 8 * m0 * R * R * r * pd * pd * s +
             8 * m0 * R * R * r * pd * fd - 2 * m * g * R * R * c * c -
             8 * m0 * R * r * r * pd * pd * c + 8 * m0 * g * R * r * s * c -
             8 * m0 * g * r * r * c * c);
  a(4, 5) = (1.0 / D1sq) *
            (25 * m * m * R * R * R * R * pd * pd * c * c +
             20 * m * m0 * R * R * R * R * pd * pd * s * s +
             20 * m * m0 * R * R * R * R * pd * fd * s -
             80 * m * m0 * R * R * R * r * pd * pd * s * c -
             48 * m * m0 * R * R * R * r * pd * fd * c - 20 * m * m0 * g * R * R * R * c +
             40 * m * m0 * R * R * r * r * pd * pd * c * c -
             16 * m0 * m0 * R * R * r * r * pd * pd * s * s -
             16 * m0 * m0 * R * R * r * r * pd * fd * s - 32 * m * m0 * g * R * R * r * s +
             16 * m0 * m0 * g * R * r * r * c + 16 * m0 * m0 * r * r * r * r * pd * pd * c * c);
  a(5, 4) = 1.0;
  a(6, 2) = 1.0 / c;
  a(6, 3) = pd * tt;
  a(7, 1) = 1.0;
  a(7, 2) = -tt;
  a(7, 3) = -pd / c;
  a(8, 0) = R * std::sin(psis) * c;
  a(8, 1) = R * std::cos(psis);
  a(8, 6) = -R * (pd * s + fd) * std::sin(psis);
  a(9, 0) = -R * std::cos(psis) * c;
  a(9, 1) = R * std::sin(psis);
  a(9, 6) = R * (pd * s + fd) * std::cos(psis);
  return a;
}

std::array<Complex, 4> CharQuartic::roots() const {
  // quadratic in lambda^2
  const double disc = c2 * c2 - 4.0 * c4 * c0;
  std::array<Complex, 4> out;
  Complex sq = std::sqrt(Complex(disc, 0.0));
  const Complex z1 = (-c2 + sq) / (2.0 * c4);
  const Complex z2 = (-c2 - sq) / (2.0 * c4);
  const Complex r1 = std::sqrt(z1), r2 = std::sqrt(z2);
  out[0] = r1;
  out[1] = -r1;
  out[2] = r2;
  out[3] = -r2;
  return out;
}

CharQuartic unicycle_char_quartic(const SteadyState& ss, const PhysicalParams& p) {
  const Matrix10 a = unicycle_state_matrix(ss, p, 0.0);
  const double sum = a(0, 1) * a(1, 0) + a(0, 2) * a(2, 0) + a(0, 3) + a(1, 4) * a(4, 1) +
                     a(2, 4) * a(4, 2) + a(4, 5);
  const double comb =
      a(0, 1) * a(1, 0) * a(2, 4) * a(4, 2) + a(0, 1) * a(1, 0) * a(4, 5) -
      a(0, 1) * a(2, 0) * a(1, 4) * a(4, 2) - a(0, 1) * a(1, 4) * a(4, 3) +
      a(0, 2) * a(2, 0) * a(1, 4) * a(4, 1) + a(0, 2) * a(2, 0) * a(4, 5) -
      a(0, 2) * a(1, 0) * a(2, 4) * a(4, 1) - a(0, 2) * a(2, 4) * a(4, 3) +
      a(0, 3) * a(1, 4) * a(4, 1) + a(0, 3) * a(2, 4) * a(4, 2) + a(0, 3) * a(4, 5) -
      a(0, 5) * a(1, 0) * a(4, 1) - a(0, 5) * a(2, 0) * a(4, 2) - a(0, 5) * a(4, 3);
  const double scale = 5.0 * p.m * p.R * p.R;
  CharQuartic q;
  q.c4 = scale;
  q.c2 = -scale * sum;
  q.c0 = scale * comb;
  return q;
}

double unicycle_straight_critical(const PhysicalParams& p) { return std::sqrt(p.g / (2.0 * p.R)); }

StabilityVerdict classify(const std::vector<Complex>& roots, double eps_root) {
  StabilityVerdict v;
  double worst = -1.0;
  Complex worst_root;
  for (const Complex& z : roots) {
    if (z.real() > worst) {
      worst = z.real();
      worst_root = z;
    }
  }
  if (worst > eps_root) {
    v.verdict = Verdict::Unstable;
    for (const Complex& z : roots)
      if (z.real() > eps_root) v.witness.push_back(z);
  } else {
    v.verdict = Verdict::NeutrallyStable;
    v.witness.push_back(worst_root);
  }
  return v;
}

void GridSpec::validate() const {
  if (theta_count < 1 || psi_dot_count < 1)
    throw DomainError("grid: counts must be at least 1");
  if (!(theta_min <= theta_max) || !(psi_dot_min <= psi_dot_max))
    throw DomainError("grid: inverted ranges");
  if (std::max(std::abs(theta_min), std::abs(theta_max)) >= M_PI / 2 - singular_tilt_guard)
    throw DomainError("grid: tilt range reaches the horizontal-wheel singularity");
}

double GridSpec::theta(int i) const {
  if (theta_count == 1) return theta_min;
  return theta_min + (theta_max - theta_min) * i / (theta_count - 1);
}

double GridSpec::psi_dot(int j) const {
  if (psi_dot_count == 1) return psi_dot_min;
  return psi_dot_min + (psi_dot_max - psi_dot_min) * j / (psi_dot_count - 1);
}

namespace {

MapPoint evaluate_wheel_point(double th, double pd, const PhysicalParams& p) {
  MapPoint pt;
  pt.theta_star = th;
  pt.psi_dot_star = pd;
  if (pd == 0.0) return pt;  // pitch rate undetermined on this line
  try {
    pt.phi_dot_star = wheel_pitch_rate(th, pd, p);
    const double radicand = wheel_char_radicand(th, pd, p);
    pt.max_real_root = radicand > 0.0 ? std::sqrt(radicand) : 0.0;
    pt.status = radicand > 0.0 ? MapPointStatus::Unstable : MapPointStatus::Stable;
  } catch (const Error&) {
    pt.status = MapPointStatus::Skip;
  }
  return pt;
}

MapPoint evaluate_unicycle_point(double th, double pd, const PhysicalParams& p) {
  // Without a point mass the model is the wheel: the leftover (sigma, r)
  // subsystem of the m0 = 0 matrix is a massless artifact whose limit
  // dynamics (sigma' = psi'^2 cos^2 theta r) would flag every point
  // unstable. The m0 = 0 panel is the wheel map.
  if (p.m0 == 0.0) return evaluate_wheel_point(th, pd, p);
  MapPoint pt;
  pt.theta_star = th;
  pt.psi_dot_star = pd;
  if (pd == 0.0) return pt;
  try {
    const SteadyState ss = unicycle_solve(th, pd, p);
    const Matrix10 a = unicycle_state_matrix(ss, p, 0.0);
    const std::vector<Complex> roots = eigenvalues(a);
    const StabilityVerdict v = classify(roots);
    pt.phi_dot_star = ss.phi_dot_star;
    pt.r_star = ss.r_star;
    double max_re = 0.0;
    for (const Complex& z : roots) max_re = std::max(max_re, z.real());
    pt.max_real_root = max_re;
    pt.status =
        v.verdict == Verdict::Unstable ? MapPointStatus::Unstable : MapPointStatus::Stable;
  } catch (const Error&) {
    pt.status = MapPointStatus::Skip;
  }
  return pt;
}

}  // namespace

std::vector<MapPoint> stability_map(const GridSpec& grid, MapModel model,
                                    const PhysicalParams& p, int threads) {
  grid.validate();
  p.validate();
  const int n = grid.theta_count * grid.psi_dot_count;
  std::vector<MapPoint> out(static_cast<size_t>(n));
  const int workers = std::max(1, threads);

  auto work = [&](int begin, int end) {
    for (int k = begin; k < end; ++k) {
      const int i = k / grid.psi_dot_count;
      const int j = k % grid.psi_dot_count;
      const double th = grid.theta(i);
      const double pd = grid.psi_dot(j);
      out[static_cast<size_t>(k)] = (model == MapModel::Wheel)
                                        ? evaluate_wheel_point(th, pd, p)
                                        : evaluate_unicycle_point(th, pd, p);
    }
  };

  if (workers == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

void SweepSpec::validate() const {
  if (count < 2) throw DomainError("sweep: need at least 2 samples");
  if (!(phi_dot_min <= phi_dot_max)) throw DomainError("sweep: inverted range");
}

double SweepSpec::phi_dot(int i) const {
  return phi_dot_min + (phi_dot_max - phi_dot_min) * i / (count - 1);
}

namespace {

// Reorder `next` to minimize total distance to `prev` (branch continuity).
std::array<Complex, 4> match_branches(const std::array<Complex, 4>& prev,
                                      std::array<Complex, 4> next) {
  std::array<int, 4> perm = {0, 1, 2, 3};
  std::array<int, 4> best = perm;
  double best_cost = -1.0;
  std::sort(perm.begin(), perm.end());
  do {
    double cost = 0.0;
    for (int i = 0; i < 4; ++i) cost += std::abs(prev[i] - next[perm[i]]);
    if (best_cost < 0.0 || cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::array<Complex, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = next[best[i]];
  return out;
}

}  // namespace

RootLocus root_locus_straight_rolling(const SweepSpec& sweep, const PhysicalParams& p,
                                      const std::vector<double>& m0_values) {
  sweep.validate();
  RootLocus locus;
  locus.m0_values = m0_values;
  locus.samples.resize(static_cast<size_t>(sweep.count));
  for (int i = 0; i < sweep.count; ++i) {
    RootLocusSample& sample = locus.samples[static_cast<size_t>(i)];
    const double fd = sweep.phi_dot(i);
    sample.phi_dot_star = fd;
    const double radicand = 0.8 * p.g / p.R - 2.4 * fd * fd;
    sample.wheel[0] = radicand >= 0.0 ? Complex(std::sqrt(radicand), 0.0)
                                      : Complex(0.0, std::sqrt(-radicand));
    sample.wheel[1] = -sample.wheel[0];
    sample.unicycle.reserve(m0_values.size());
    for (size_t k = 0; k < m0_values.size(); ++k) {
      PhysicalParams q = p;
      q.m0 = m0_values[k];
      SteadyState ss = make_wheel_straight_rolling(fd);
      std::array<Complex, 4> roots = unicycle_char_quartic(ss, q).roots();
      if (i > 0) roots = match_branches(locus.samples[static_cast<size_t>(i - 1)].unicycle[k], roots);
      sample.unicycle.push_back(roots);
    }
  }
  return locus;
}

}  // namespace unidyn
