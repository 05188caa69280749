#include "tube/deadzone.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tube/effective.hpp"
#include "tube/errors.hpp"

namespace tube {

TubeSpec deadzone3_spec(double eps) {
  TubeSpec base = preset_spec("straight3");
  Box cavity;
  cavity.lo = {0.25, 0.25, 1.25};
  cavity.hi = {0.75, 0.75, 2.25};
  TubeSpec spec = attach_cavity(base, cavity, eps, {0.5, 0.5});
  spec.label = "deadzone3";
  return spec;
}

double base_diffusivity(const TubeSpec& base, double h,
                        const SolveOptions& opts) {
  const Grid g = rasterize(build_cell(base), h);
  return compute_effective(g, 0.0, opts).sigma2;
}

std::vector<DeadZoneRow> sigma_scan(const std::vector<double>& epsList,
                                    double hFactor, const SolveOptions& opts) {
  if (epsList.empty()) throw BadSpec("need at least one eps");
  if (hFactor > 0.5 + 1e-12)
    throw UnresolvedChannel("channel needs at least two cells across (h <= eps/2)");

  const TubeSpec base = preset_spec("straight3");
  const double vol0 = build_cell(base).cellVolume;
  const double sigma0 = base_diffusivity(base, 0.25, opts);  // exact: 1

  std::vector<double> eps = epsList;
  std::sort(eps.begin(), eps.end(), std::greater<double>());

  std::vector<DeadZoneRow> rows;
  for (double e : eps) {
    DeadZoneRow row;
    row.eps = e;
    row.h = hFactor * e;
    const CellDomain dom = build_cell(deadzone3_spec(e));
    const Grid g = rasterize(dom, row.h);
    row.cells = g.nCells();
    row.vol0 = vol0;
    row.vol1 = dom.cellVolume - vol0;
    row.leading = vol0 * sigma0 / (vol0 + row.vol1);
    row.sigma2 = compute_effective(g, 0.0, opts).sigma2;
    row.gap = row.sigma2 - row.leading;
    rows.push_back(row);
  }
  return rows;
}

DeadZoneFit extrapolate_limit(const std::vector<DeadZoneRow>& rows) {
  if (rows.size() < 3) throw BadSpec("extrapolation needs at least 3 rows");
  std::vector<DeadZoneRow> r = rows;
  std::sort(r.begin(), r.end(), [](const DeadZoneRow& a, const DeadZoneRow& b) {
    return a.eps > b.eps;
  });

  // Fit gap ~ C eps^p: least squares of log|gap| against log(eps). Needs
  // every gap nonzero and of one sign, otherwise no power law exists.
  const double sign = r.front().gap > 0 ? 1.0 : -1.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const DeadZoneRow& row : r) {
    if (row.gap == 0.0 || (row.gap > 0 ? 1.0 : -1.0) != sign)
      throw PoorFit("gaps are not one-signed; no power law fits");
    const double x = std::log(row.eps);
    const double y = std::log(std::abs(row.gap));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(r.size());
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-12 * n * sxx)
    throw PoorFit("eps values too close together to fit a rate");

  DeadZoneFit fit;
  fit.rate = (n * sxy - sx * sy) / det;
  fit.coeff = sign * std::exp((sy * sxx - sx * sxy) / det);

  // Richardson extrapolation of sigma2 at the fitted rate, two finest rows.
  const DeadZoneRow& coarse = r[r.size() - 2];
  const DeadZoneRow& fine = r[r.size() - 1];
  const double ratio = std::pow(coarse.eps / fine.eps, fit.rate);
  if (!(ratio > 1.0))
    throw PoorFit("fitted rate does not separate the two finest rows");
  fit.limit = fine.sigma2 + (fine.sigma2 - coarse.sigma2) / (ratio - 1.0);
  return fit;
}

}  // namespace tube
