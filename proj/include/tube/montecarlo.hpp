#pragma once
// Euler-Maruyama simulation of the reflected drift-diffusion (generator
// Laplacian + V d/ds) in the periodic tube; estimates the effective drift
// and diffusivity from long-time axial displacements.

#include <array>
#include <cstdint>

#include "tube/geometry.hpp"
#include "tube/rng.hpp"

namespace tube {

struct McConfig {
  int64_t nPaths = 20000;
  double T = 50.0;      // measurement window per path
  double dt = 1e-4;
  double burnIn = -1.0;  // <0 = auto: min(2, T/10); lets paths forget the start
  uint64_t seed = 12345;
};

struct McEstimate {
  double veff = 0.0;
  double veffSe = 0.0;
  double sigma2 = 0.0;
  double sigma2Se = 0.0;
  int64_t nPaths = 0;
  double T = 0.0;
  double dt = 0.0;
  double burnIn = 0.0;
  int64_t totalSteps = 0;
  int64_t halfStepRetries = 0;  // rare-event fallbacks taken
};

// One Euler step from x with the given standard-normal noise vector;
// proposals leaving the domain are folded back across the violated wall
// planes (specular reflection; exact for a single axis-aligned wall). If
// folding cannot resolve the step, it is retried as two half steps with
// fresh noise from rng; without an rng that case throws ReflectionStuck.
// The s-coordinate stays unwrapped so displacement statistics accumulate.
std::array<double, 3> step_reflect(const CellDomain& dom,
                                   const std::array<double, 3>& x, double V,
                                   double dt,
                                   const std::array<double, 3>& noise,
                                   Xoshiro256pp* rng = nullptr);

McEstimate estimate_effective(const CellDomain& dom, double V,
                              const McConfig& cfg);

}  // namespace tube
