#pragma once
// Cell-problem pipeline: stationary density, effective drift by three
// independent quadratures, corrector field, and effective diffusivity.

#include <vector>

#include "tube/grid.hpp"
#include "tube/linsolve.hpp"
#include "tube/operators.hpp"

namespace tube {

// The three drift quadratures. All are algebraically equal for the
// conservative flux discretization, so their spread measures solver error
// only; `lat` is the canonical value (needs no gradient data).
struct DriftRoutes {
  double cut = 0.0;  // flux through one full layer of s-faces
  double vol = 0.0;  // volume form: drift mass plus density differences
  double lat = 0.0;  // boundary form: V minus wall-flux deficit
  double spread() const;
};

struct EffectiveResult {
  double V = 0.0;
  double h = 0.0;
  Eigen::VectorXd pi;   // stationary density, sum(pi) h^d = 1
  Eigen::VectorXd psi;  // periodic corrector, mean zero
  DriftRoutes drift;
  double veff = 0.0;    // = drift.lat
  double sigma2 = 0.0;  // face quadrature of the harmonic coordinate
  double compatResidual = 0.0;
  SolveReport piReport, psiReport;
};

Eigen::VectorXd invariant_density(const Grid& g, double V,
                                  SolveReport* report = nullptr,
                                  const SolveOptions& opts = {});

// Total drift-diffusion flux of pi through the layer of s-faces at the given
// lattice plane in [0, ns). Layer-independent to machine precision.
double cut_flux_at_layer(const Grid& g, const Eigen::VectorXd& pi, double V,
                         int plane);

DriftRoutes effective_drift(const Grid& g, const Eigen::VectorXd& pi, double V);

// Periodic part of the harmonic coordinate: solves the corrector system with
// right-hand side veff - (generator applied to the unwrapped s-coordinate).
// veff must be the boundary-form drift so the system is compatible.
Eigen::VectorXd corrector(const Grid& g, const SparseOperator& fp,
                          const Eigen::VectorXd& pi, double V, double veff,
                          double* compatResidual = nullptr,
                          SolveReport* report = nullptr,
                          const SolveOptions& opts = {});

// sigma^2 = sum over interior+seam faces of (face difference of s+psi over
// h)^2 times the arithmetic face mean of pi times h^d.
double effective_diffusivity(const Grid& g, const Eigen::VectorXd& pi,
                             const Eigen::VectorXd& psi);

// Drift-free identity sigma^2 = 1 - dirichlet_energy(psi)/|domain|; the
// energy includes the wall contribution of the unit Neumann datum. Agrees
// with effective_diffusivity exactly when V = 0.
double diffusivity_defect_v0(const Grid& g, const Eigen::VectorXd& psi,
                             double V);

EffectiveResult compute_effective(const Grid& g, double V,
                                  const SolveOptions& opts = {});

struct SlopeResult {
  double slope = 0.0;   // least-squares odd fit of veff(V) through 0
  double sigma0 = 0.0;  // sigma^2 at V = 0
  double relDeviation = 0.0;
  bool monotone = true;
  std::vector<double> vList, veffList;
};

// Fits veff(V) over a symmetric list of small drifts and compares the slope
// at 0 against sigma^2(0).
SlopeResult small_v_slope(const CellDomain& dom, double h,
                          std::vector<double> vList = {},
                          const SolveOptions& opts = {});

}  // namespace tube
