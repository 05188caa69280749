#pragma once

#include <complex>
#include <vector>

#include <Eigen/SparseCore>

#include "tube/grid.hpp"

namespace tube {

using cplx = std::complex<double>;
using SpMatR = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<cplx>;

// Exponential-fitting weight B(x) = x / (e^x - 1), B(0) = 1, evaluated
// stably near 0. The face flux of the density operator in the +s direction
// is F = (1/h) [B(-q) u_lo - B(q) u_up] with q = V h.
double bernoulli(double x);

// Discrete operator on the active cells of a grid. Real when the seam
// phase e^{i theta} is real (theta = 0 or +-pi); complex otherwise.
struct SparseOperator {
  int64_t n = 0;
  int dim = 2;
  double h = 0;
  double V = 0;
  double theta = 0;
  bool real = true;
  SpMatR MR;
  SpMatC MC;

  // Row-sum scale of the stencil, used for residual normalization.
  double scale() const;
};

// Density (Fokker-Planck) operator M*: conservative exponential-fitting
// fluxes, zero flux through walls, seam couplings twisted by e^{+i theta}
// toward s=0-side unknowns and e^{-i theta} toward s=1-side unknowns.
// At theta = 0 all column sums vanish (discrete conservation).
SparseOperator assemble_fokker_planck(const Grid& g, double V, double theta = 0.0);

// Generator M = (M*)^H; exact discrete duality by construction.
SparseOperator generator_from_adjoint(const SparseOperator& fp);

// Generator applied to the unwrapped axial coordinate (seam differences
// count +h like interior faces). On a straight tube this is exactly V in
// every cell.
std::vector<double> generator_applied_to_s(const Grid& g, double V);

}  // namespace tube
