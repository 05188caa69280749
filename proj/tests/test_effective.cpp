#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tube/effective.hpp"

using namespace tube;

namespace {

Grid make_grid(const char* preset, double h) {
  return rasterize(build_cell(preset_spec(preset)), h);
}

}  // namespace

TEST_CASE("cylinder has veff = V and sigma2 = 1 for any drift") {
  const Grid g = make_grid("straight", 1.0 / 16);
  for (double V : {0.0, 3.0, -1.5}) {
    const EffectiveResult r = compute_effective(g, V);
    CHECK(std::abs(r.drift.cut - V) <= 1e-12 * std::max(1.0, std::abs(V)));
    CHECK(std::abs(r.drift.vol - V) <= 1e-12 * std::max(1.0, std::abs(V)));
    CHECK(std::abs(r.drift.lat - V) <= 1e-12 * std::max(1.0, std::abs(V)));
    CHECK(std::abs(r.sigma2 - 1.0) <= 1e-10);
    // density is constant
    CHECK((r.pi.array() - r.pi[0]).abs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("regression: finger geometry at V = 2") {
  // Values frozen from this code at h = 1/10; the continuum limit of this
  // veff (~1.3955) was cross-checked against an independent piecewise-linear
  // finite-element discretization of the same cell problem.
  const Grid g = make_grid("finger", 1.0 / 10);
  const EffectiveResult r = compute_effective(g, 2.0);
  CHECK(r.veff == doctest::Approx(1.3783045945639005).epsilon(1e-10));
  CHECK(r.sigma2 == doctest::Approx(0.8391366996717509).epsilon(1e-10));
  CHECK(r.drift.spread() <= 1e-12);
}

TEST_CASE("regression: ratchet geometry at V = 2") {
  const Grid g = make_grid("ratchet", 1.0 / 32);
  const EffectiveResult r = compute_effective(g, 2.0);
  CHECK(r.veff == doctest::Approx(0.9422514648519982).epsilon(1e-10));
  CHECK(r.sigma2 == doctest::Approx(0.7080296174206704).epsilon(1e-10));
  CHECK(r.drift.spread() <= 1e-12);
  CHECK(r.compatResidual <= 1e-10);
}

TEST_CASE("the cut flux does not depend on which layer is cut") {
  const Grid g = make_grid("ratchet", 1.0 / 16);
  const Eigen::VectorXd pi = invariant_density(g, 2.0);
  const double f0 = cut_flux_at_layer(g, pi, 2.0, 0);
  for (int plane = 1; plane < g.ns; ++plane)
    CHECK(std::abs(cut_flux_at_layer(g, pi, 2.0, plane) - f0) <= 1e-13);
}

TEST_CASE("density normalization: sum(pi) h^d = 1") {
  const std::pair<const char*, double> cases[] = {
      {"straight", 1.0 / 10}, {"finger", 1.0 / 10}, {"ratchet", 1.0 / 16}};
  for (const auto& [preset, h] : cases) {
    const Grid g = make_grid(preset, h);
    const Eigen::VectorXd pi = invariant_density(g, 2.0);
    CHECK(pi.sum() * g.cellMeasure() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(pi.minCoeff() > 0.0);
  }
}

TEST_CASE("drift-free diffusivity: defect identity and trapping bound") {
  const std::pair<const char*, double> cases[] = {{"finger", 1.0 / 10},
                                                  {"ratchet", 1.0 / 16}};
  for (const auto& [preset, h] : cases) {
    const Grid g = make_grid(preset, h);
    const EffectiveResult r = compute_effective(g, 0.0);
    CHECK(std::abs(r.veff) <= 1e-12);
    // non-cylinders trap: strictly below the free value 1
    CHECK(r.sigma2 > 0.0);
    CHECK(r.sigma2 < 1.0);
    // face quadrature and Dirichlet-defect form are the same number at V = 0
    const double defect = diffusivity_defect_v0(g, r.psi, 0.0);
    CHECK(std::abs(r.sigma2 - defect) <= 1e-12);
  }
}

TEST_CASE("the defect form refuses a nonzero drift") {
  const Grid g = make_grid("finger", 1.0 / 10);
  const EffectiveResult r = compute_effective(g, 0.0);
  CHECK_THROWS_AS((void)diffusivity_defect_v0(g, r.psi, 0.5),
                  InvalidForNonzeroV);
}

TEST_CASE("mirroring the geometry flips the sign of the effective drift") {
  const TubeSpec spec = preset_spec("ratchet");
  const Grid g = rasterize(build_cell(spec), 1.0 / 16);
  const Grid gm = rasterize(build_cell(mirror(spec)), 1.0 / 16);
  const double vp = compute_effective(gm, 2.0).veff;
  const double vm = compute_effective(g, -2.0).veff;
  CHECK(std::abs(vp + vm) <= 1e-12 * std::max(1.0, std::abs(vm)));
}

TEST_CASE("small-drift slope of veff reproduces sigma2(0)") {
  const CellDomain dom = build_cell(preset_spec("finger"));
  const SlopeResult s = small_v_slope(dom, 1.0 / 10);
  CHECK(s.relDeviation < 0.02);
  CHECK(s.monotone);
  const Grid g = rasterize(dom, 1.0 / 10);
  CHECK(s.sigma0 == doctest::Approx(compute_effective(g, 0.0).sigma2)
                        .epsilon(1e-12));
  // veff is odd in V for this mirror-symmetric geometry
  REQUIRE(s.veffList.size() == 4);
  CHECK(std::abs(s.veffList[0] + s.veffList[3]) <= 1e-10);
  CHECK(std::abs(s.veffList[1] + s.veffList[2]) <= 1e-10);
}

TEST_CASE("slope scan rejects bad drift lists") {
  const CellDomain dom = build_cell(preset_spec("finger"));
  CHECK_THROWS_AS((void)small_v_slope(dom, 1.0 / 10, {0.05, 0.1}), BadSpec);
  CHECK_THROWS_AS((void)small_v_slope(dom, 1.0 / 10, {-0.5, -0.25, 0.25, 0.5}),
                  BadSpec);
}
