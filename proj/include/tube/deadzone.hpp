#pragma once
// Dead-zone family: a 3-d straight tube with a cavity attached through a
// narrow channel of width eps. Effective diffusivity dilutes toward
// vol0*sigma0^2/(vol0+vol1), and the scan measures the remaining gap and
// extrapolates it away. For a square point-attached channel the gap decays
// much faster than the eps^(d-2) worst-case bound because the cavity is
// free to equilibrate at the wall value of the harmonic coordinate.

#include <vector>

#include "tube/geometry.hpp"
#include "tube/linsolve.hpp"

namespace tube {

struct DeadZoneRow {
  double eps = 0.0;
  double h = 0.0;
  double sigma2 = 0.0;
  double vol0 = 0.0;     // main tube volume
  double vol1 = 0.0;     // cavity + channel volume
  double leading = 0.0;  // vol0*sigma0^2/(vol0+vol1)
  double gap = 0.0;      // sigma2 - leading
  int64_t cells = 0;
};

struct DeadZoneFit {
  double limit = 0.0;  // extrapolated sigma2 at eps -> 0
  double rate = 0.0;   // fitted exponent p of gap ~ C eps^p
  double coeff = 0.0;
};

// Unit cube tube with a 0.5 x 0.5 x 1.0 cavity hung 0.25 above its top,
// connected by an eps x eps channel centered at (s, x2) = (0.5, 0.5).
TubeSpec deadzone3_spec(double eps);

// sigma^2 of the drift-free base tube alone.
double base_diffusivity(const TubeSpec& base, double h,
                        const SolveOptions& opts = {});

// One row per eps, each on its own grid with h = hFactor * eps (so the
// channel is always resolved by the same number of cells). Throws
// UnresolvedChannel when the channel would be thinner than two cells.
std::vector<DeadZoneRow> sigma_scan(const std::vector<double>& epsList,
                                    double hFactor = 0.5,
                                    const SolveOptions& opts = {});

// Fits gap ~ C eps^p by least squares in log-log across all rows, then
// Richardson-extrapolates sigma2 to eps -> 0 at that rate using the two
// finest rows. Throws PoorFit when the gaps are not one-signed (no power
// law can be fitted).
DeadZoneFit extrapolate_limit(const std::vector<DeadZoneRow>& rows);

}  // namespace tube
