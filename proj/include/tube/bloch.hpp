#pragma once
// Principal eigenvalue branch of the twisted cell operator and its Taylor
// coefficients: lambda0(theta) = i*veff*theta - sigma2*theta^2 + O(theta^3).

#include <vector>

#include "tube/grid.hpp"
#include "tube/linsolve.hpp"

namespace tube {

struct BlochSample {
  double theta = 0.0;
  cplx lambda{0.0, 0.0};
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct BlochScan {
  double V = 0.0;
  double thetaMax = 0.0;
  std::vector<BlochSample> samples;  // sorted by theta
};

struct BlochFit {
  double veff = 0.0;    // odd linear coefficient of Im lambda0
  double sigma2 = 0.0;  // minus the quadratic coefficient of Re lambda0
  double c3 = 0.0;      // cubic (Im) coefficient, diagnostic
  double d4 = 0.0;      // quartic (Re) coefficient, diagnostic
  double fitResidual = 0.0;
  double thetaMax = 0.0;
};

struct NegativityReport {
  double minMargin = 0.0;  // smallest -Re lambda0 over the scanned thetas
  double worstTheta = 0.0;
};

// {0, +-max/4, +-max/2, +-3max/4, +-max}
std::vector<double> default_theta_list(double thetaMax = 0.1);

// Tracks the branch through lambda0(0) = 0 by warm-started shift-invert
// continuation, separately toward positive and negative theta. The list must
// contain 0. Throws ContinuationBroken when the eigenvalue moves more than
// the branch-gap heuristic allows between neighbouring samples.
BlochScan bloch_scan(const Grid& g, double V,
                     std::vector<double> thetaList = {},
                     const SolveOptions& opts = {});

// Least-squares fit of Im lambda to a*theta + c*theta^3 and Re lambda to
// -b*theta^2 + d*theta^4. Throws PoorFit when the residual exceeds
// 1e-3 * max |lambda| or the fitted sigma2 is not positive.
BlochFit taylor_fit(const BlochScan& scan);

// Continues the branch over the given nonzero thetas and asserts
// Re lambda0 < 0 on each; throws NonNegativeRealPart otherwise.
NegativityReport negativity_scan(const Grid& g, double V,
                                 const std::vector<double>& thetaList,
                                 const SolveOptions& opts = {});

}  // namespace tube
