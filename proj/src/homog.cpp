#include "tube/homog.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "tube/errors.hpp"

namespace tube {

Strip build_strip(const Grid& g, int nPeriods) {
  if (nPeriods < 3) throw BadSpec("strip needs at least 3 periods");
  Strip s;
  s.dim = g.dim;
  s.h = g.h;
  s.ns = g.ns;
  s.nPeriods = nPeriods;
  s.perPeriod = g.nCells();
  s.slot.resize(size_t(s.perPeriod));
  s.zc.resize(size_t(s.perPeriod));
  for (int64_t c = 0; c < s.perPeriod; ++c) {
    s.slot[size_t(c)] = g.coord[size_t(c)][0];
    const auto ctr = g.center(int32_t(c));
    s.zc[size_t(c)] = {ctr[1], ctr[2]};
  }
  for (int p = 0; p < nPeriods; ++p) {
    const int64_t off = int64_t(p) * s.perPeriod;
    for (const auto& f : g.faces) {
      if (f.kind == FaceKind::Interior)
        s.faces.push_back({off + f.a, off + f.b, f.axis});
      else if (f.kind == FaceKind::Seam && p + 1 < nPeriods)
        s.faces.push_back({off + f.a, off + s.perPeriod + f.b, f.axis});
    }
  }
  return s;
}

double Envelope::operator()(double y) const {
  if (std::abs(y) > cut * width) return 0.0;
  return std::exp(-y * y / (2.0 * width * width));
}

Eigen::VectorXd strip_initial(const Strip& strip, const Envelope& phi,
                              double eps, double s0) {
  Eigen::VectorXd u0(strip.nCells());
  for (int64_t c = 0; c < strip.nCells(); ++c)
    u0[c] = phi(eps * (strip.sCenter(c) - s0));
  return u0;
}

std::vector<double> homogenized_initial_line(const Strip& strip,
                                             const Eigen::VectorXd& piCell,
                                             const Envelope& phi, double eps,
                                             double s0) {
  const double hA = std::pow(strip.h, strip.dim - 1);
  std::vector<double> w0(size_t(strip.nLayers()), 0.0);
  for (int64_t c = 0; c < strip.nCells(); ++c) {
    const int layer = strip.layerOf(c);
    w0[size_t(layer)] +=
        piCell[strip.source(c)] * phi(eps * ((layer + 0.5) * strip.h - s0)) * hA;
  }
  return w0;
}

SpMatR strip_generator(const Strip& strip, double V) {
  const double ih2 = 1.0 / (strip.h * strip.h);
  const double q = V * strip.h;
  const double bm = bernoulli(-q);
  const double bp = bernoulli(q);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(strip.faces.size() * 4);
  // backward operator: row a couples to b with the weight of the a-side flux
  for (const auto& f : strip.faces) {
    const double wa = f.axis == 0 ? bm : 1.0;
    const double wb = f.axis == 0 ? bp : 1.0;
    trip.emplace_back(int(f.a), int(f.a), -wa * ih2);
    trip.emplace_back(int(f.a), int(f.b), wa * ih2);
    trip.emplace_back(int(f.b), int(f.a), wb * ih2);
    trip.emplace_back(int(f.b), int(f.b), -wb * ih2);
  }
  SpMatR A(int(strip.nCells()), int(strip.nCells()));
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

namespace {

double end_mass_fraction(const Strip& strip, const Eigen::VectorXd& u) {
  double ends = 0.0, total = 0.0;
  for (int64_t c = 0; c < strip.nCells(); ++c) {
    const int period = int(c / strip.perPeriod);
    const double m = std::abs(u[c]);
    total += m;
    if (period < 2 || period >= strip.nPeriods - 2) ends += m;
  }
  return total > 0.0 ? ends / total : 0.0;
}

}  // namespace

Eigen::VectorXd evolve_strip(const Strip& strip, double V,
                             const Eigen::VectorXd& u0, double tFinal,
                             double dt, const Eigen::VectorXd& weight,
                             EvolveReport* report) {
  if (u0.size() != strip.nCells() || weight.size() != strip.nCells())
    throw BadSpec("strip field sizes disagree");
  if (!(dt > 0.0) || !(tFinal > 0.0)) throw BadSpec("need positive dt, tFinal");

  const SpMatR A = strip_generator(strip, V);
  SpMatR S(A.rows(), A.cols());
  S.setIdentity();
  S = S - dt * A;
  S.makeCompressed();

  const int64_t nSteps = std::llround(tFinal / dt);
  const int64_t checkEvery = std::max<int64_t>(1, nSteps / 16);
  const double mass0 = weight.dot(u0);

  Eigen::VectorXd u = u0;
  EvolveReport rep;
  rep.steps = nSteps;

  auto run = [&](auto& solver) {
    if (solver.info() != Eigen::Success)
      throw SolverDiverged("strip time-step factorization failed");
    for (int64_t k = 1; k <= nSteps; ++k) {
      u = solver.solve(u);
      if (k % checkEvery == 0 || k == nSteps) {
        const double frac = end_mass_fraction(strip, u);
        rep.endMassFraction = std::max(rep.endMassFraction, frac);
        if (frac > 1e-6)
          throw BoundaryContaminated(
              "end periods hold mass fraction " + std::to_string(frac) +
              " at t = " + std::to_string(double(k) * dt));
      }
    }
  };

  if (V == 0.0) {
    Eigen::SimplicialLDLT<SpMatR> ldlt(S);
    run(ldlt);
  } else {
    Eigen::SparseLU<SpMatR> lu(S);
    run(lu);
  }

  const double mass1 = weight.dot(u);
  rep.massDrift = std::abs(mass1 - mass0) /
                  (std::max(std::abs(mass0), 1e-300) * tFinal);
  if (report) *report = rep;
  return u;
}

std::vector<double> effective_1d_solution(const std::vector<double>& w0,
                                          double h, double veff, double sigma2,
                                          double t) {
  if (!(sigma2 > 0.0) || !(t > 0.0)) throw BadSpec("need sigma2 > 0, t > 0");
  const size_t n = w0.size();
  std::vector<double> w(n, 0.0);
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const double var = 2.0 * sigma2 * t;
  const double norm = 1.0 / std::sqrt(kTwoPi * var);
  for (size_t j = 0; j < n; ++j) {
    const double sj = (double(j) + 0.5) * h + veff * t;
    double acc = 0.0;
    for (size_t k = 0; k < n; ++k) {
      if (w0[k] == 0.0) continue;
      const double d = sj - (double(k) + 0.5) * h;
      acc += std::exp(-d * d / (2.0 * var)) * w0[k];
    }
    w[j] = acc * norm * h;
  }
  return w;
}

std::vector<double> layer_means(const Strip& strip, const Eigen::VectorXd& u) {
  std::vector<double> sum(size_t(strip.nLayers()), 0.0);
  std::vector<int64_t> count(size_t(strip.nLayers()), 0);
  for (int64_t c = 0; c < strip.nCells(); ++c) {
    sum[size_t(strip.layerOf(c))] += u[c];
    count[size_t(strip.layerOf(c))] += 1;
  }
  for (size_t j = 0; j < sum.size(); ++j)
    if (count[j] > 0) sum[j] /= double(count[j]);
  return sum;
}

HomogComparison compare_profiles(const std::vector<double>& ubar,
                                 const std::vector<double>& w, double h) {
  if (ubar.size() != w.size()) throw BadSpec("profile lengths disagree");
  double wmax = 0.0;
  for (double x : w) wmax = std::max(wmax, std::abs(x));
  const double floor = 1e-6 * wmax;

  HomogComparison cmp;
  cmp.regionLo = int(w.size());
  cmp.regionHi = -1;
  double l2 = 0.0;
  for (size_t j = 0; j < w.size(); ++j) {
    if (std::abs(w[j]) <= floor) continue;
    cmp.regionLo = std::min(cmp.regionLo, int(j));
    cmp.regionHi = std::max(cmp.regionHi, int(j));
    const double e = std::abs(ubar[j] - w[j]);
    cmp.supError = std::max(cmp.supError, e);
    l2 += e * e * h;
  }
  cmp.l2Error = std::sqrt(l2);
  return cmp;
}

HomogResult homog_run(const CellDomain& dom, const HomogConfig& cfg) {
  HomogResult res;
  res.eps = cfg.eps;
  res.h = cfg.h;
  res.tFinal = cfg.tFinal > 0.0 ? cfg.tFinal : 1.0 / (cfg.eps * cfg.eps);
  res.dt = cfg.dt > 0.0 ? cfg.dt : cfg.h * cfg.h;

  const Grid g = rasterize(dom, cfg.h);
  const EffectiveResult eff = compute_effective(g, cfg.V);
  res.veff = eff.veff;
  res.sigma2 = eff.sigma2;

  // strip long enough that the support plus five standard deviations of the
  // evolved profile stay clear of the closed ends
  const double spread = std::sqrt(2.0 * eff.sigma2 * res.tFinal);
  const double drift = std::abs(eff.veff) * res.tFinal;
  const double half =
      cfg.phi.cut * cfg.phi.width / cfg.eps + 5.0 * spread + drift + 4.0;
  int nP = int(std::ceil(2.0 * half));
  nP += nP % 2;
  res.nPeriods = nP;

  const Strip strip = build_strip(g, nP);
  res.cells = strip.nCells();
  const double s0 = double(nP) / 2.0;

  const Eigen::VectorXd u0 = strip_initial(strip, cfg.phi, cfg.eps, s0);
  Eigen::VectorXd weight(strip.nCells());
  for (int64_t c = 0; c < strip.nCells(); ++c)
    weight[c] = eff.pi[strip.source(c)];

  const Eigen::VectorXd u =
      evolve_strip(strip, cfg.V, u0, res.tFinal, res.dt, weight, &res.evolve);

  const std::vector<double> w0 =
      homogenized_initial_line(strip, eff.pi, cfg.phi, cfg.eps, s0);
  const std::vector<double> w =
      effective_1d_solution(w0, cfg.h, eff.veff, eff.sigma2, res.tFinal);
  res.cmp = compare_profiles(layer_means(strip, u), w, cfg.h);
  return res;
}

}  // namespace tube
