#ifndef UNIDYN_NUMERICS_HPP
#define UNIDYN_NUMERICS_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "unidyn/types.hpp"

// Shared numerical kernels: eigenvalues, polynomial roots, numerical rank,
// linear solves and finite-difference Jacobians.

namespace unidyn {

// Real polynomial with coefficients in ascending degree order.
struct Polynomial {
  std::vector<double> coeffs;

  // Drops trailing (highest-degree) coefficients below 1e-14 of the largest.
  Polynomial trimmed() const;
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  Complex eval(Complex z) const;
};

// Eigenvalues of a real square matrix (n <= 16). Exactly-zero rows/columns are
// deflated first (each contributes an exact zero eigenvalue), the remainder is
// balanced by powers of two and handed to a Schur-based solver. The returned
// multiset satisfies the characteristic polynomial to the requested scaled
// tolerance; tol only guards the internal residual, it does not alter values.
std::vector<Complex> eigenvalues(const Eigen::MatrixXd& m, double tol = 1e-8);

// Scaled characteristic-polynomial residual |det(lambda I - M)| / ||M||_F^n,
// used to validate eigenvalue output.
double char_poly_residual(const Eigen::MatrixXd& m, Complex lambda);

// Characteristic polynomial coefficients of M, ascending order, monic leading
// coefficient (Faddeev-LeVerrier recursion in extended precision).
Polynomial char_poly_coeffs(const Eigen::MatrixXd& m);

// All roots of p via the companion-matrix eigensolve. For real input, complex
// roots come in conjugate pairs; each root evaluates p below tol times the
// coefficient scale (multiple roots excepted, where the bound degrades by the
// usual multiplicity power).
std::vector<Complex> poly_roots(const Polynomial& p, double tol = 1e-6);

// Count of singular values above rel_tol times the largest.
int numerical_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-9);

// Solve A x = b for square nonsingular A (rank-revealing LU; singularity
// detected at relative tolerance 1e-12).
Eigen::VectorXd solve_linear(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

// Central-difference Jacobian of f at x with per-component step
// h_rel * max(1, |x_i|).
template <class F>
Eigen::MatrixXd fd_jacobian(F&& f, const Eigen::VectorXd& x, double h_rel = 1e-6) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = h_rel * std::max(1.0, std::abs(x[j]));
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Eigen::VectorXd fp = f(xp), fm = f(xm);
    if (!fp.allFinite() || !fm.allFinite())
      throw DomainError("fd_jacobian: non-finite function evaluation");
    jac.col(j) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

}  // namespace unidyn

#endif
