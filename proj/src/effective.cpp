#include "tube/effective.hpp"

#include <algorithm>
#include <cmath>

#include "tube/errors.hpp"

namespace tube {

double DriftRoutes::spread() const {
  const double lo = std::min({cut, vol, lat});
  const double hi = std::max({cut, vol, lat});
  return hi - lo;
}

Eigen::VectorXd invariant_density(const Grid& g, double V, SolveReport* report,
                                  const SolveOptions& opts) {
  SparseOperator fp = assemble_fokker_planck(g, V);
  Nullvector nv = nullvector(fp, g, opts);
  if (report) *report = nv.report;
  return nv.pi;
}

double cut_flux_at_layer(const Grid& g, const Eigen::VectorXd& pi, double V,
                         int plane) {
  if (plane < 0 || plane >= g.ns) throw BadSpec("cut layer out of range");
  const double q = V * g.h;
  const double bm = bernoulli(-q);
  const double bp = bernoulli(q);
  const double hA = std::pow(g.h, g.dim - 1);
  double flux = 0.0;
  for (const auto& f : g.faces) {
    if (f.axis != 0 || f.kind == FaceKind::Wall || f.plane != plane) continue;
    flux += (bm * pi[f.a] - bp * pi[f.b]) / g.h * hA;
  }
  return flux;
}

DriftRoutes effective_drift(const Grid& g, const Eigen::VectorXd& pi,
                            double V) {
  const double q = V * g.h;
  const double bm = bernoulli(-q);
  const double bp = bernoulli(q);
  const double mq = 0.5 * (bm + bp);  // symmetric part of the flux weights
  const double hd = g.cellMeasure();
  const double hA = std::pow(g.h, g.dim - 1);

  DriftRoutes r;
  r.cut = cut_flux_at_layer(g, pi, V, 0);

  // Volume form: the same face fluxes split into drift and diffusion parts,
  // integrated over the cell (each layer carries the identical total flux).
  double vol = 0.0;
  double wallDeficit = 0.0;
  for (const auto& f : g.faces) {
    if (f.axis != 0) continue;
    if (f.kind == FaceKind::Wall) {
      // n1 B(-n1 q) pi_owner is the flux the owner cell would push through
      // the missing face; it is what the boundary form subtracts from V.
      const double s = f.nsign;
      wallDeficit += s * bernoulli(-s * q) * pi[f.a] * hA;
      continue;
    }
    vol += (V * 0.5 * (pi[f.a] + pi[f.b]) +
            mq * (pi[f.a] - pi[f.b]) / g.h) *
           hd;
  }
  r.vol = vol;
  r.lat = V * pi.sum() * hd - wallDeficit;
  return r;
}

Eigen::VectorXd corrector(const Grid& g, const SparseOperator& fp,
                          const Eigen::VectorXd& pi, double V, double veff,
                          double* compatResidual, SolveReport* report,
                          const SolveOptions& opts) {
  SparseOperator gen = generator_from_adjoint(fp);
  const std::vector<double> Ms = generator_applied_to_s(g, V);
  Eigen::VectorXd rhs(g.nCells());
  for (int64_t i = 0; i < g.nCells(); ++i) rhs[i] = veff - Ms[size_t(i)];
  if (compatResidual)
    *compatResidual = std::abs(pi.dot(rhs)) * g.cellMeasure();

  Eigen::VectorXd psi;
  SolveReport rep = solve_singular_compatible(gen.MR, rhs, pi, psi, opts);
  if (report) *report = rep;
  return psi;
}

double effective_diffusivity(const Grid& g, const Eigen::VectorXd& pi,
                             const Eigen::VectorXd& psi) {
  const double hd = g.cellMeasure();
  double sum = 0.0;
  for (const auto& f : g.faces) {
    if (f.kind == FaceKind::Wall) continue;
    // face difference of v1 = s + psi; the s part contributes 1 on s-faces
    // (the +1 also encodes the unwrapped jump across the seam)
    const double dv = (psi[f.b] - psi[f.a]) / g.h + (f.axis == 0 ? 1.0 : 0.0);
    sum += dv * dv * 0.5 * (pi[f.a] + pi[f.b]) * hd;
  }
  return sum;
}

double diffusivity_defect_v0(const Grid& g, const Eigen::VectorXd& psi,
                             double V) {
  if (V != 0.0)
    throw InvalidForNonzeroV("defect formula requires zero drift");
  const double hd = g.cellMeasure();
  const double hA = std::pow(g.h, g.dim - 1);
  double energy = 0.0;
  int64_t sWalls = 0;
  for (const auto& f : g.faces) {
    if (f.kind == FaceKind::Wall) {
      if (f.axis == 0) ++sWalls;
      continue;
    }
    const double dpsi = (psi[f.b] - psi[f.a]) / g.h;
    energy += dpsi * dpsi * hd;
  }
  // The unit Neumann datum on s-walls carries a boundary energy of h/2 per
  // face area; with it the defect form matches the face quadrature exactly.
  energy += 0.5 * g.h * double(sWalls) * hA;
  return 1.0 - energy / g.volume();
}

EffectiveResult compute_effective(const Grid& g, double V,
                                  const SolveOptions& opts) {
  EffectiveResult res;
  res.V = V;
  res.h = g.h;

  SparseOperator fp = assemble_fokker_planck(g, V);
  Nullvector nv = nullvector(fp, g, opts);
  res.pi = nv.pi;
  res.piReport = nv.report;

  res.drift = effective_drift(g, res.pi, V);
  res.veff = res.drift.lat;

  res.psi = corrector(g, fp, res.pi, V, res.veff, &res.compatResidual,
                      &res.psiReport, opts);
  res.sigma2 = effective_diffusivity(g, res.pi, res.psi);
  return res;
}

SlopeResult small_v_slope(const CellDomain& dom, double h,
                          std::vector<double> vList,
                          const SolveOptions& opts) {
  if (vList.empty()) vList = {-0.1, -0.05, 0.05, 0.1};
  std::vector<double> sorted = vList;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (std::abs(sorted[i]) > 0.2 + 1e-12)
      throw BadSpec("slope test drifts must satisfy |V| <= 0.2");
    if (std::abs(sorted[i] + sorted[sorted.size() - 1 - i]) > 1e-12)
      throw BadSpec("slope test drift list must be symmetric around 0");
  }

  const Grid g = rasterize(dom, h);
  SlopeResult out;
  out.vList = sorted;
  for (double v : sorted)
    out.veffList.push_back(compute_effective(g, v, opts).veff);
  out.sigma0 = compute_effective(g, 0.0, opts).sigma2;

  // least squares for veff ~ a V + c V^3 (even terms cancel by symmetry)
  double s11 = 0, s13 = 0, s33 = 0, b1 = 0, b3 = 0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    const double v = sorted[i], v3 = v * v * v, y = out.veffList[i];
    s11 += v * v;
    s13 += v * v3;
    s33 += v3 * v3;
    b1 += v * y;
    b3 += v3 * y;
  }
  const double det = s11 * s33 - s13 * s13;
  out.slope = det != 0.0 ? (s33 * b1 - s13 * b3) / det : b1 / s11;
  out.relDeviation = std::abs(out.slope - out.sigma0) / out.sigma0;
  for (size_t i = 1; i < out.veffList.size(); ++i)
    if (!(out.veffList[i] > out.veffList[i - 1])) out.monotone = false;
  return out;
}

}  // namespace tube
