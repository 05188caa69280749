#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>

#include "tube/montecarlo.hpp"

using namespace tube;

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

McEstimate run_small(uint64_t seed) {
  McConfig cfg;
  cfg.nPaths = 200;
  cfg.T = 1.0;
  cfg.dt = 1e-3;
  cfg.seed = seed;
  return estimate_effective(build_cell(preset_spec("finger")), 1.0, cfg);
}

}  // namespace

TEST_CASE("normal sampler moments against the standard distribution") {
  Xoshiro256pp rng(42, 0);
  const int64_t n = 4'000'000;
  double s1 = 0, s2 = 0, s4 = 0;
  int64_t tail = 0;
  for (int64_t i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
    if (z > 1.96) ++tail;
  }
  const double mean = s1 / n, var = s2 / n, kurt = s4 / n;
  // three-sigma windows for n = 4e6 draws
  CHECK(std::abs(mean) <= 3.0 / std::sqrt((double)n));           // sd 1
  CHECK(std::abs(var - 1.0) <= 3.0 * kSqrt2 / std::sqrt((double)n));
  CHECK(std::abs(kurt - 3.0) <= 3.0 * std::sqrt(96.0 / (double)n));
  const double p = 0.024997895148220428;  // P(Z > 1.96)
  CHECK(std::abs((double)tail / n - p) <=
        3.0 * std::sqrt(p * (1 - p) / (double)n));
}

TEST_CASE("interior step is plain Euler-Maruyama") {
  const CellDomain dom = build_cell(preset_spec("straight"));
  const std::array<double, 3> x{0.5, 0.5, 0.0};
  const std::array<double, 3> noise{0.25, -0.5, 0.0};
  const double V = 2.0, dt = 1e-3, g = std::sqrt(2.0 * dt);
  const auto y = step_reflect(dom, x, V, dt, noise);
  CHECK(y[0] == doctest::Approx(x[0] + V * dt + g * noise[0]).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(x[1] + g * noise[1]).epsilon(1e-15));
  CHECK(y[2] == 0.0);
}

TEST_CASE("a proposal through a wall is folded back") {
  const CellDomain dom = build_cell(preset_spec("straight"));
  const double dt = 1e-3, g = std::sqrt(2.0 * dt);
  // choose noise so the unconstrained z-proposal is 1.1: folds to 0.9
  const std::array<double, 3> x{0.5, 0.99, 0.0};
  const double want = (1.1 - 0.99) / g;
  const auto y = step_reflect(dom, x, 0.0, dt, {0.0, want, 0.0});
  CHECK(y[1] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(y[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("the axial coordinate is never wrapped by the stepper") {
  const CellDomain dom = build_cell(preset_spec("straight"));
  std::array<double, 3> x{0.97, 0.5, 0.0};
  x = step_reflect(dom, x, 0.0, 1e-3, {2.0, 0.0, 0.0});
  CHECK(x[0] > 1.0);  // periodic direction: no wall, no wrap
}

TEST_CASE("a corner proposal folds across both planes") {
  const CellDomain dom = build_cell(preset_spec("straight3"));
  const double dt = 1e-3, g = std::sqrt(2.0 * dt);
  const std::array<double, 3> x{0.5, 0.98, 0.97};
  const std::array<double, 3> noise{0.0, (1.06 - 0.98) / g, (1.08 - 0.97) / g};
  const auto y = step_reflect(dom, x, 0.0, dt, noise);
  CHECK(y[1] == doctest::Approx(0.94).epsilon(1e-12));
  CHECK(y[2] == doctest::Approx(0.92).epsilon(1e-12));
}

TEST_CASE("the open mouth is not a wall, the overhang next to it is") {
  const CellDomain dom = build_cell(preset_spec("finger"));
  const double dt = 1e-4, g = std::sqrt(2.0 * dt);

  // through the mouth: stem -> duct with no reflection
  std::array<double, 3> x{0.5, 0.29, 0.0};
  double rise = (0.32 - 0.29) / g;
  auto y = step_reflect(dom, x, 0.0, dt, {0.0, rise, 0.0});
  CHECK(y[1] == doctest::Approx(0.32).epsilon(1e-12));

  // same rise under the overhang at s = 0.35: ceiling at 0.3 reflects
  x = {0.35, 0.29, 0.0};
  y = step_reflect(dom, x, 0.0, dt, {0.0, rise, 0.0});
  CHECK(y[1] == doctest::Approx(0.28).epsilon(1e-12));
  CHECK(y[0] == doctest::Approx(0.35).epsilon(1e-15));
}

TEST_CASE("estimates are deterministic for a fixed seed") {
  const McEstimate a = run_small(7);
  const McEstimate b = run_small(7);
  CHECK(std::memcmp(&a, &b, sizeof(McEstimate)) == 0);
  const McEstimate c = run_small(8);
  CHECK(c.veff != a.veff);  // different seed actually changes the draw
}

TEST_CASE("cylinder statistics reproduce veff = V and sigma2 = 1") {
  McConfig cfg;
  cfg.nPaths = 4000;
  cfg.T = 2.0;
  cfg.dt = 1e-3;
  cfg.seed = 12345;
  const McEstimate est =
      estimate_effective(build_cell(preset_spec("straight")), 3.0, cfg);
  CHECK(std::abs(est.veff - 3.0) <= 4.0 * est.veffSe);
  CHECK(std::abs(est.sigma2 - 1.0) <= 4.0 * est.sigma2Se);
  CHECK(est.veffSe > 0.0);
  CHECK(est.sigma2Se > 0.0);
  CHECK(est.burnIn == doctest::Approx(std::min(2.0, cfg.T / 10)));
  CHECK(est.totalSteps ==
        cfg.nPaths * (int64_t)std::llround((cfg.T + est.burnIn) / cfg.dt));
}

TEST_CASE("configurations that cannot be simulated are refused") {
  const CellDomain dom = build_cell(preset_spec("finger"));
  McConfig cfg;
  cfg.nPaths = 1;  // need at least 2 for a standard error
  CHECK_THROWS_AS((void)estimate_effective(dom, 0.0, cfg), BadSpec);
  cfg.nPaths = 10;
  cfg.dt = 0.5;  // step noise wider than the narrowest extent
  CHECK_THROWS_AS((void)estimate_effective(dom, 0.0, cfg), BadSpec);
  cfg.dt = 1e-3;
  cfg.T = 0.0;
  CHECK_THROWS_AS((void)estimate_effective(dom, 0.0, cfg), BadSpec);
}

TEST_CASE("an unresolvable step without a fallback source reports itself") {
  const CellDomain dom = build_cell(preset_spec("finger"));
  // enormous noise from deep inside the stem cannot be folded into place
  const std::array<double, 3> x{0.5, 0.15, 0.0};
  CHECK_THROWS_AS(
      (void)step_reflect(dom, x, 0.0, 0.04, {0.0, 200.0, 0.0}),
      ReflectionStuck);
}
