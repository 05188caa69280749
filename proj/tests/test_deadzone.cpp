#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tube/deadzone.hpp"
#include "tube/effective.hpp"

using namespace tube;

TEST_CASE("family volumes are exact: 1 + 1/4 + eps^2/4") {
  for (double eps : {1.0 / 6, 1.0 / 12, 1.0 / 24}) {
    const CellDomain dom = build_cell(deadzone3_spec(eps));
    CHECK(dom.cellVolume ==
          doctest::Approx(1.25 + 0.25 * eps * eps).epsilon(1e-12));
  }
}

TEST_CASE("the base tube is a free cylinder: sigma0^2 = 1") {
  CHECK(base_diffusivity(preset_spec("straight3"), 0.25) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("scan rows: dilution leading term and positive decreasing gaps") {
  const std::vector<DeadZoneRow> rows = sigma_scan({1.0 / 4, 1.0 / 8, 1.0 / 16});
  REQUIRE(rows.size() == 3);
  for (size_t i = 0; i < rows.size(); ++i) {
    const DeadZoneRow& r = rows[i];
    CHECK(r.h == doctest::Approx(0.5 * r.eps).epsilon(1e-15));
    CHECK(r.vol0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.vol1 ==
          doctest::Approx(0.25 + 0.25 * r.eps * r.eps).epsilon(1e-12));
    CHECK(r.leading ==
          doctest::Approx(r.vol0 / (r.vol0 + r.vol1)).epsilon(1e-12));
    CHECK(r.gap == doctest::Approx(r.sigma2 - r.leading).epsilon(1e-15));
    // the cavity only slows the tracer: below the free value, above dilution
    CHECK(r.sigma2 < 1.0);
    CHECK(r.gap > 0.0);
    if (i > 0) {
      CHECK(rows[i].eps < rows[i - 1].eps);   // sorted coarse to fine
      CHECK(rows[i].gap < rows[i - 1].gap);   // narrower channel, less leakage
    }
  }
}

TEST_CASE("scan refuses an unresolved or empty configuration") {
  CHECK_THROWS_AS((void)sigma_scan({}), BadSpec);
  CHECK_THROWS_AS((void)sigma_scan({0.25}, 0.6), UnresolvedChannel);
}

TEST_CASE("extrapolation recovers an exact synthetic power law") {
  std::vector<DeadZoneRow> rows;
  for (double eps : {1.0 / 4, 1.0 / 8, 1.0 / 16}) {
    DeadZoneRow r;
    r.eps = eps;
    r.leading = 0.8;
    r.gap = 0.1 * eps;
    r.sigma2 = r.leading + r.gap;
    rows.push_back(r);
  }
  const DeadZoneFit fit = extrapolate_limit(rows);
  CHECK(fit.rate == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.limit == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(fit.coeff == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("extrapolation needs three rows and one-signed gaps") {
  std::vector<DeadZoneRow> rows(2);
  CHECK_THROWS_AS((void)extrapolate_limit(rows), BadSpec);

  rows.resize(3);
  double sign = 1.0;
  for (size_t i = 0; i < rows.size(); ++i) {
    rows[i].eps = 0.25 / double(1 << i);
    rows[i].leading = 0.8;
    rows[i].gap = sign * 0.01;
    rows[i].sigma2 = rows[i].leading + rows[i].gap;
    sign = -sign;
  }
  CHECK_THROWS_AS((void)extrapolate_limit(rows), PoorFit);
}

TEST_CASE("a larger cavity dilutes the diffusivity further") {
  const double eps = 0.25, h = 0.125;
  const TubeSpec small = deadzone3_spec(eps);
  TubeSpec big = attach_cavity(preset_spec("straight3"),
                               Box{{0.25, 0.25, 1.25}, {0.75, 0.75, 2.75}},
                               eps, {0.5, 0.5});
  const double s2small =
      compute_effective(rasterize(build_cell(small), h), 0.0).sigma2;
  const double s2big =
      compute_effective(rasterize(build_cell(big), h), 0.0).sigma2;
  CHECK(s2big < s2small);
  // both sit near their dilution values
  CHECK(s2small == doctest::Approx(1.0 / (1.25 + 0.25 * eps * eps)).epsilon(0.02));
  CHECK(s2big == doctest::Approx(1.0 / (1.375 + 0.25 * eps * eps)).epsilon(0.02));
}
