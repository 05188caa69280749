#pragma once
// Direct check of the homogenization limit: evolve the parabolic problem on
// a long strip of periods and compare cross-section averages against the 1-d
// effective solution built from the cell constants.

#include <vector>

#include "tube/effective.hpp"
#include "tube/grid.hpp"

namespace tube {

// The period grid replicated nPeriods times along s. Periodic seam faces
// become inter-period couplings; the outermost pair is dropped, closing the
// ends with zero flux.
struct Strip {
  int dim = 2;
  double h = 0.0;
  int ns = 0;
  int nPeriods = 0;
  int64_t perPeriod = 0;
  std::vector<int> slot;                        // s-slot of each source cell
  std::vector<std::array<double, 2>> zc;        // transverse centers, source cells
  struct Face {
    int64_t a, b;
    uint8_t axis;
  };
  std::vector<Face> faces;

  int64_t nCells() const { return perPeriod * nPeriods; }
  int nLayers() const { return ns * nPeriods; }
  int64_t source(int64_t c) const { return c % perPeriod; }
  int layerOf(int64_t c) const {
    return int(c / perPeriod) * ns + slot[size_t(c % perPeriod)];
  }
  double sCenter(int64_t c) const { return (layerOf(c) + 0.5) * h; }
};

Strip build_strip(const Grid& g, int nPeriods);

// Compactly supported initial envelope: exp(-y^2 / (2 width^2)) for
// |y| <= cut*width, else 0.
struct Envelope {
  double width = 0.5;
  double cut = 3.0;
  double operator()(double y) const;
};

// Initial field u(0, x) = phi(eps (s - s0)).
Eigen::VectorXd strip_initial(const Strip& strip, const Envelope& phi,
                              double eps, double s0);

// Averaged initial line: per s-layer the z-integral of (replicated cell
// density) times the envelope, i.e. the 1-d initial data of the effective
// equation.
std::vector<double> homogenized_initial_line(const Strip& strip,
                                             const Eigen::VectorXd& piCell,
                                             const Envelope& phi, double eps,
                                             double s0);

// Generator (backward operator) of the drift-diffusion on the strip.
SpMatR strip_generator(const Strip& strip, double V);

struct EvolveReport {
  double massDrift = 0.0;        // relative drift of <weight, u> per unit time
  double endMassFraction = 0.0;  // worst fraction within 2 periods of an end
  int64_t steps = 0;
};

// Implicit Euler march to tFinal. weight is the conserved adjoint density
// (replicated pi). Throws BoundaryContaminated when more than 1e-6 of the
// mass reaches the closed ends, SolverDiverged on factorization failure.
Eigen::VectorXd evolve_strip(const Strip& strip, double V,
                             const Eigen::VectorXd& u0, double tFinal,
                             double dt, const Eigen::VectorXd& weight,
                             EvolveReport* report = nullptr);

// Heat-kernel solution of the effective equation on the layer lattice:
// w(t, s) = sum_k G(s + veff t - s_k) w0_k h with G of variance 2 sigma2 t.
std::vector<double> effective_1d_solution(const std::vector<double>& w0,
                                          double h, double veff, double sigma2,
                                          double t);

// Plain cross-section average of u per s-layer.
std::vector<double> layer_means(const Strip& strip, const Eigen::VectorXd& u);

struct HomogComparison {
  double supError = 0.0;
  double l2Error = 0.0;
  int regionLo = 0, regionHi = 0;  // layer range where w exceeds 1e-6 max
};

HomogComparison compare_profiles(const std::vector<double>& ubar,
                                 const std::vector<double>& w, double h);

struct HomogConfig {
  double V = 0.0;
  double eps = 0.125;
  double h = 1.0 / 16;
  double tFinal = -1.0;  // <0: 1/eps^2
  double dt = -1.0;      // <0: h^2
  Envelope phi;
};

struct HomogResult {
  double eps = 0.0, h = 0.0, tFinal = 0.0, dt = 0.0;
  int nPeriods = 0;
  int64_t cells = 0;
  double veff = 0.0, sigma2 = 0.0;
  HomogComparison cmp;
  EvolveReport evolve;
};

HomogResult homog_run(const CellDomain& dom, const HomogConfig& cfg);

}  // namespace tube
