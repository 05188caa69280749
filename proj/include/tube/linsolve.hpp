#pragma once
// Solvers for the singular systems this project actually meets:
//   - stationary density of the conservative transport operator (kernel vector),
//   - corrector equations  A x = b  where A has a known 1-dimensional kernel
//     and b satisfies the matching compatibility condition,
//   - interior eigenpairs of the twisted operator by shift-invert iteration.
// Direct sparse LU on a bordered system covers the nonsymmetric cases; the
// symmetric drift-free case uses a deflated Jacobi-preconditioned CG so large
// 3-d grids stay cheap in memory.

#include <complex>
#include <string>

#include "tube/operators.hpp"

namespace tube {

struct SolveOptions {
  double tol = 1e-10;       // relative residual target
  int maxIter = 0;          // 0 = pick automatically from the problem size
  double compatTol = 1e-8;  // allowed relative component of b along the left kernel
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;  // ||A x - b||_2 after the solve
  bool converged = false;
  std::string method;
};

// Solves A x = b where A is singular with a one-dimensional kernel and
// leftKernel spans the left null space. b is first projected onto the range
// of A; if the component removed is larger than compatTol (relative), the
// system is inconsistent and IncompatibleRHS is thrown. The returned x is
// gauged to mean zero. Throws NotConverged if the residual target is missed.
SolveReport solve_singular_compatible(const SpMatR& A, const Eigen::VectorXd& b,
                                      const Eigen::VectorXd& leftKernel,
                                      Eigen::VectorXd& x,
                                      const SolveOptions& opts = {});

struct Nullvector {
  Eigen::VectorXd pi;  // positive, normalized so sum(pi) * h^dim == 1
  SolveReport report;
};

// Stationary density of the conservative operator (theta must be 0, so the
// matrix is real). Solves via pi = 1 + w where A w = -A 1, which is exact for
// a straight tube where the uniform density is already stationary. Throws
// NonPositiveNullvector if any entry fails to be strictly positive.
Nullvector nullvector(const SparseOperator& fp, const Grid& g,
                      const SolveOptions& opts = {});

struct EigenPair {
  cplx lambda;
  Eigen::VectorXcd vec;  // unit norm, largest-magnitude entry real positive
  int iterations = 0;
  double residual = 0.0;  // ||M v - lambda v||_2
};

// Shift-invert iteration for the eigenvalue of M nearest `shift`. v0 seeds the
// iteration (empty = all-ones). Throws ShiftSingular if M - shift I cannot be
// factored, NotConverged if the residual target is missed.
EigenPair eigen_shift_invert(const SpMatC& M, cplx shift,
                             const Eigen::VectorXcd& v0 = {},
                             double scale = 1.0, const SolveOptions& opts = {});

}  // namespace tube
