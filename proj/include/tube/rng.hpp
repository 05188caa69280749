#pragma once
// Counter-seeded xoshiro256++ streams. Each Monte Carlo path gets its own
// stream derived from (seed, pathIndex) through splitmix64, so results are
// reproducible regardless of scheduling and paths never share state.

#include <cmath>
#include <cstdint>

namespace tube {

struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t s) : state(s) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

class Xoshiro256pp {
 public:
  Xoshiro256pp(uint64_t seed, uint64_t stream) {
    SplitMix64 mix(seed ^ (stream * 0x9e3779b97f4a7c15ULL + 0x853c49e6748fea9bULL));
    for (auto& w : s_) w = mix.next();
    // An all-zero state is a fixed point; splitmix64 output makes it
    // astronomically unlikely, but guard anyway.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0,1) with 53 random bits.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // One standard normal via a 256-layer ziggurat with the exact Marsaglia
  // tail. The common path is one u64 draw, one multiply and one compare.
  double normal() {
    const ZigTable& z = kZigTable;
    for (;;) {
      const uint64_t u = next_u64();
      const int i = int(u & 255);
      const double x = double(u >> 11) * 0x1.0p-53 * z.X[i];
      if (x < z.X[i + 1]) return (u & 256) ? -x : x;
      if (i == 0) {  // tail beyond X[1] = r, sampled exactly
        double xx, yy;
        do {
          xx = -std::log1p(-uniform()) / z.X[1];
          yy = -std::log1p(-uniform());
        } while (2.0 * yy < xx * xx);
        const double t = z.X[1] + xx;
        return (u & 256) ? -t : t;
      }
      const double y = z.F[i] + uniform() * (z.F[i + 1] - z.F[i]);
      if (y < std::exp(-0.5 * x * x)) return (u & 256) ? -x : x;
    }
  }

 public:
  // Layer edges of the ziggurat for f(x) = exp(-x^2/2): X[1] = r down to
  // X[256] = 0 with F[i] = f(X[i]); X[0] = v/f(r) is the widened base that
  // folds the tail probability into the uniform draw. r is found by
  // bisection so the 256 equal-area layers close exactly at f = 1.
  struct ZigTable {
    double X[257];
    double F[257];
    ZigTable() {
      auto closure = [](double r, double* XX, double* FF) {
        const double fr = std::exp(-0.5 * r * r);
        const double sqrtHalfPi = 1.2533141373155003;  // sqrt(pi/2)
        const double v = r * fr + sqrtHalfPi * std::erfc(r / 1.4142135623730951);
        XX[1] = r;
        FF[1] = fr;
        XX[0] = v / fr;
        double fi = fr;
        for (int i = 1; i < 256; ++i) {
          fi += v / XX[i];
          if (fi >= 1.0) {  // layers overshoot the mode: r too large
            for (int k = i + 1; k <= 256; ++k) {
              XX[k] = 0.0;
              FF[k] = 1.0;
            }
            return double(256 - i);
          }
          XX[i + 1] = std::sqrt(-2.0 * std::log(fi));
          FF[i + 1] = fi;
        }
        return fi - 1.0;
      };
      // closure > 0 means the stack overshoots f = 1, i.e. r is too small.
      double lo = 3.0, hi = 4.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (closure(mid, X, F) > 0.0 ? lo : hi) = mid;
      }
      closure(lo, X, F);
      X[256] = 0.0;
      F[256] = 1.0;
    }
  };
  static const ZigTable kZigTable;

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

inline const Xoshiro256pp::ZigTable Xoshiro256pp::kZigTable;

}  // namespace tube
