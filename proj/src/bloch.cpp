#include "tube/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "tube/errors.hpp"
#include "tube/operators.hpp"

namespace tube {

namespace {

BlochSample solve_at(const Grid& g, double V, double theta, cplx shift,
                     const Eigen::VectorXcd& v0, Eigen::VectorXcd& vOut,
                     const SolveOptions& opts) {
  SparseOperator fp = assemble_fokker_planck(g, V, theta);
  SparseOperator gen = generator_from_adjoint(fp);
  SpMatC M = gen.real ? SpMatC(gen.MR.cast<cplx>()) : gen.MC;
  EigenPair ep = eigen_shift_invert(M, shift, v0, fp.scale(), opts);
  vOut = ep.vec;
  BlochSample s;
  s.theta = theta;
  s.lambda = ep.lambda;
  s.residual = ep.residual;
  s.iterations = ep.iterations;
  s.converged = true;
  return s;
}

}  // namespace

std::vector<double> default_theta_list(double thetaMax) {
  std::vector<double> t = {0.0};
  for (int k = 1; k <= 4; ++k) {
    t.push_back(k * thetaMax / 4.0);
    t.push_back(-k * thetaMax / 4.0);
  }
  return t;
}

BlochScan bloch_scan(const Grid& g, double V, std::vector<double> thetaList,
                     const SolveOptions& opts) {
  if (thetaList.empty()) thetaList = default_theta_list();
  std::sort(thetaList.begin(), thetaList.end());
  thetaList.erase(std::unique(thetaList.begin(), thetaList.end()),
                  thetaList.end());
  if (std::none_of(thetaList.begin(), thetaList.end(),
                   [](double t) { return t == 0.0; }))
    throw BadSpec("theta list must contain 0 to anchor the branch");

  BlochScan scan;
  scan.V = V;
  scan.thetaMax = std::max(std::abs(thetaList.front()), std::abs(thetaList.back()));

  // Anchor: at theta = 0 the constant vector is the exact eigenvector of the
  // generator with eigenvalue 0, so a real positive shift is safe.
  Eigen::VectorXcd vZero;
  BlochSample zero = solve_at(g, V, 0.0, cplx(0.1 * (1.0 + std::abs(V)), 0.0),
                              Eigen::VectorXcd(), vZero, opts);
  scan.samples.push_back(zero);

  const double offset = 0.05 * (1.0 + std::abs(V));
  for (int dir = 0; dir < 2; ++dir) {
    // walk outward in |theta| on each side of 0
    std::vector<double> branch;
    for (double t : thetaList)
      if ((dir == 0 && t > 0.0) || (dir == 1 && t < 0.0)) branch.push_back(t);
    if (dir == 0)
      std::sort(branch.begin(), branch.end());
    else
      std::sort(branch.begin(), branch.end(), std::greater<double>());

    cplx lambdaPrev = zero.lambda;
    double thetaPrev = 0.0;
    Eigen::VectorXcd vPrev = vZero;
    for (double t : branch) {
      Eigen::VectorXcd vNext;
      BlochSample s =
          solve_at(g, V, t, lambdaPrev + offset, vPrev, vNext, opts);
      const double allowed =
          10.0 * std::abs(t - thetaPrev) * (std::abs(V) + 1.0);
      if (std::abs(s.lambda - lambdaPrev) > allowed)
        throw ContinuationBroken(
            "eigenvalue moved " + std::to_string(std::abs(s.lambda - lambdaPrev)) +
            " between theta=" + std::to_string(thetaPrev) + " and " +
            std::to_string(t) + " (allowed " + std::to_string(allowed) + ")");
      scan.samples.push_back(s);
      lambdaPrev = s.lambda;
      thetaPrev = t;
      vPrev = vNext;
    }
  }

  std::sort(scan.samples.begin(), scan.samples.end(),
            [](const BlochSample& a, const BlochSample& b) {
              return a.theta < b.theta;
            });
  return scan;
}

BlochFit taylor_fit(const BlochScan& scan) {
  if (scan.samples.size() < 5)
    throw BadSpec("taylor fit needs at least 5 samples");
  bool hasZero = false;
  double maxAbs = 0.0;
  for (const auto& s : scan.samples) {
    hasZero = hasZero || s.theta == 0.0;
    maxAbs = std::max(maxAbs, std::abs(s.lambda));
  }
  if (!hasZero) throw BadSpec("taylor fit needs the theta = 0 sample");

  BlochFit fit;
  fit.thetaMax = scan.thetaMax;
  {
    // Im lambda ~ a*theta + c*theta^3, normal equations on {theta, theta^3}
    double s22 = 0, s24 = 0, s44 = 0, b1 = 0, b3 = 0;
    for (const auto& s : scan.samples) {
      const double t = s.theta, t2 = t * t;
      s22 += t2;
      s24 += t2 * t2;
      s44 += t2 * t2 * t2;
      b1 += t * s.lambda.imag();
      b3 += t * t2 * s.lambda.imag();
    }
    const double det = s22 * s44 - s24 * s24;
    fit.veff = det != 0.0 ? (s44 * b1 - s24 * b3) / det : b1 / s22;
    fit.c3 = det != 0.0 ? (s22 * b3 - s24 * b1) / det : 0.0;
  }
  {
    // Re lambda ~ -b*theta^2 + d*theta^4, normal equations on {-t^2, t^4}
    double g11 = 0, g12 = 0, g22 = 0, r1 = 0, r2 = 0;
    for (const auto& s : scan.samples) {
      const double t2 = s.theta * s.theta, t4 = t2 * t2;
      g11 += t4;
      g12 += -t2 * t4;
      g22 += t4 * t4;
      r1 += -t2 * s.lambda.real();
      r2 += t4 * s.lambda.real();
    }
    const double det = g11 * g22 - g12 * g12;
    fit.sigma2 = det != 0.0 ? (g22 * r1 - g12 * r2) / det
                            : (g11 != 0.0 ? r1 / g11 : 0.0);
    fit.d4 = det != 0.0 ? (g11 * r2 - g12 * r1) / det : 0.0;
  }

  for (const auto& s : scan.samples) {
    const double t = s.theta;
    const cplx model(-fit.sigma2 * t * t + fit.d4 * t * t * t * t,
                     fit.veff * t + fit.c3 * t * t * t);
    fit.fitResidual = std::max(fit.fitResidual, std::abs(s.lambda - model));
  }
  if (fit.fitResidual > 1e-3 * std::max(maxAbs, 1e-12))
    throw PoorFit("taylor model misses samples by " +
                  std::to_string(fit.fitResidual) + " (max |lambda| " +
                  std::to_string(maxAbs) + ")");
  if (!(fit.sigma2 > 0.0))
    throw PoorFit("fitted sigma2 is not positive");
  return fit;
}

NegativityReport negativity_scan(const Grid& g, double V,
                                 const std::vector<double>& thetaList,
                                 const SolveOptions& opts) {
  if (thetaList.empty()) throw BadSpec("negativity scan needs thetas");
  for (double t : thetaList)
    if (t == 0.0) throw BadSpec("negativity scan excludes theta = 0");

  std::vector<double> withZero = thetaList;
  withZero.push_back(0.0);
  BlochScan scan = bloch_scan(g, V, withZero, opts);

  NegativityReport rep;
  rep.minMargin = std::numeric_limits<double>::infinity();
  for (const auto& s : scan.samples) {
    if (s.theta == 0.0) continue;
    const double margin = -s.lambda.real();
    if (margin < rep.minMargin) {
      rep.minMargin = margin;
      rep.worstTheta = s.theta;
    }
    if (!(margin > 0.0))
      throw NonNegativeRealPart("Re lambda0 = " +
                                std::to_string(s.lambda.real()) +
                                " at theta = " + std::to_string(s.theta));
  }
  return rep;
}

}  // namespace tube
