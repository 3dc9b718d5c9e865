#include "unidyn/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace unidyn {

Polynomial Polynomial::trimmed() const {
  double scale = 0.0;
  for (double c : coeffs) scale = std::max(scale, std::abs(c));
  Polynomial out = *this;
  while (out.coeffs.size() > 1 && std::abs(out.coeffs.back()) <= 1e-14 * scale)
    out.coeffs.pop_back();
  return out;
}

Complex Polynomial::eval(Complex z) const {
  Complex acc(0.0, 0.0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

namespace {

// Diagonal similarity scaling by powers of two; exact in floating point.
void balance(Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if (c + r < 0.95 * s) {
        converged = false;
        a.col(i) *= f;
        a.row(i) /= f;
      }
    }
  }
}

}  // namespace

std::vector<Complex> eigenvalues(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) throw DomainError("eigenvalues: matrix must be square");
  if (m.rows() > 16) throw DomainError("eigenvalues: dimension limit is 16");
  if (!m.allFinite()) throw DomainError("eigenvalues: non-finite entries");

  Eigen::MatrixXd a = m;
  int deflated = 0;
  // Strip exactly-zero rows and columns; each is an exact zero eigenvalue and
  // the rest of the spectrum is that of the principal submatrix.
  for (;;) {
    const Eigen::Index n = a.rows();
    Eigen::Index kill = -1;
    for (Eigen::Index j = 0; j < n && kill < 0; ++j)
      if (a.col(j).isZero(0.0) || a.row(j).isZero(0.0)) kill = j;
    if (kill < 0 || n == 0) break;
    ++deflated;
    Eigen::MatrixXd b(n - 1, n - 1);
    Eigen::Index bi = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == kill) continue;
      Eigen::Index bj = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == kill) continue;
        b(bi, bj++) = a(i, j);
      }
      ++bi;
    }
    a.swap(b);
  }

  std::vector<Complex> out(static_cast<size_t>(deflated), Complex(0.0, 0.0));
  if (a.rows() > 0) {
    balance(a);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
      throw NonConvergenceError("eigenvalues: Schur iteration failed to converge for n = " +
                                std::to_string(a.rows()));
    for (Eigen::Index i = 0; i < a.rows(); ++i) out.push_back(solver.eigenvalues()[i]);
  }
  (void)tol;
  return out;
}

double char_poly_residual(const Eigen::MatrixXd& m, Complex lambda) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXcd a = -m.cast<Complex>();
  a.diagonal().array() += lambda;
  const Complex det = a.fullPivLu().determinant();
  const double scale = std::pow(std::max(1.0, m.norm()), static_cast<double>(n));
  return std::abs(det) / scale;
}

Polynomial char_poly_coeffs(const Eigen::MatrixXd& m) {
  using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = m.rows();
  const LMat a = m.cast<long double>();
  LMat mk = LMat::Zero(n, n);
  std::vector<long double> c(static_cast<size_t>(n) + 1);
  c[static_cast<size_t>(n)] = 1.0L;  // monic, ascending storage
  long double ck = 1.0L;
  for (Eigen::Index k = 1; k <= n; ++k) {
    mk = (a * mk).eval();
    mk.diagonal().array() += ck;
    ck = -(a * mk).trace() / static_cast<long double>(k);
    c[static_cast<size_t>(n - k)] = ck;
  }
  Polynomial p;
  p.coeffs.assign(c.begin(), c.end());
  return p;
}

std::vector<Complex> poly_roots(const Polynomial& p_in, double tol) {
  const Polynomial p = p_in.trimmed();
  const int deg = p.degree();
  if (deg < 1) throw DomainError("poly_roots: degree must be at least 1");
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  const double lead = p.coeffs.back();
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -p.coeffs[static_cast<size_t>(i)] / lead;
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  std::vector<Complex> roots = eigenvalues(companion, tol);
  // pair up conjugates exactly for real input
  for (auto& z : roots)
    if (std::abs(z.imag()) < 1e-14 * (1.0 + std::abs(z.real()))) z = Complex(z.real(), 0.0);
  return roots;
}

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  if (!m.allFinite()) throw DomainError("numerical_rank: non-finite entries");
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > rel_tol * sv[0]) ++rank;
  return rank;
}

Eigen::VectorXd solve_linear(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw DomainError("solve_linear: dimension mismatch");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible())
    throw SingularMatrixError("solve_linear: matrix is singular at relative tolerance 1e-12");
  return lu.solve(b);
}

}  // namespace unidyn
