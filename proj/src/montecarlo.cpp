#include "tube/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tube/errors.hpp"

namespace tube {

namespace {

constexpr int kMaxBoxes = 16;
constexpr int kMaxFolds = 8;
constexpr int kMaxDepth = 4;
constexpr double kProbe = 1e-9;  // offset for the wall-vs-interface probe

// Flat copy of the domain boxes so the per-step containment test stays in
// this translation unit and free of indirection.
struct FastDom {
  int dim = 2;
  int n = 0;
  double lo[kMaxBoxes][3];
  double hi[kMaxBoxes][3];

  static FastDom from(const CellDomain& dom) {
    FastDom f;
    f.dim = dom.dim;
    // split seam-wrapping boxes so every stored piece has an s-range inside
    // [0,1]; the probe logic then sees the seam as an ordinary interface
    std::vector<Box> pieces;
    for (const Box& b : dom.boxes) {
      if (b.hi[0] > 1.0) {
        Box left = b, right = b;
        left.hi[0] = 1.0;
        right.lo[0] = 0.0;
        right.hi[0] = b.hi[0] - 1.0;
        pieces.push_back(left);
        pieces.push_back(right);
      } else {
        pieces.push_back(b);
      }
    }
    if (int(pieces.size()) > kMaxBoxes)
      throw BadSpec("too many boxes for the simulator");
    f.n = int(pieces.size());
    for (int b = 0; b < f.n; ++b)
      for (int a = 0; a < 3; ++a) {
        f.lo[b][a] = pieces[size_t(b)].lo[a];
        f.hi[b][a] = pieces[size_t(b)].hi[a];
      }
    return f;
  }

  // x has unwrapped s in slot 0; unused slots must be 0.
  bool contains(const double* x, int& hint) const {
    const double w = x[0] - std::floor(x[0]);
    for (int k = 0; k < n; ++k) {
      const int b = k == 0 ? hint : (k <= hint ? k - 1 : k);
      if (w >= lo[b][0] && w <= hi[b][0] && x[1] >= lo[b][1] &&
          x[1] <= hi[b][1] && (dim < 3 || (x[2] >= lo[b][2] && x[2] <= hi[b][2]))) {
        hint = b;
        return true;
      }
    }
    return false;
  }
};

// Specular folding of one proposal. pos must be inside; hint indexes its
// containing box. Returns false when the step needs the half-step fallback.
bool fold_step(const FastDom& dom, double* pos, const double* disp,
               int& hint) {
  double p[3] = {pos[0] + disp[0], pos[1] + disp[1], pos[2] + disp[2]};
  int ph = hint;
  if (dom.contains(p, ph)) {
    pos[0] = p[0];
    pos[1] = p[1];
    pos[2] = p[2];
    hint = ph;
    return true;
  }

  // chart of the starting box: shift its s-range next to the unwrapped pos
  const int b = hint;
  const double base = std::floor(pos[0]);
  double blo[3] = {base + dom.lo[b][0], dom.lo[b][1], dom.lo[b][2]};
  double bhi[3] = {base + dom.hi[b][0], dom.hi[b][1], dom.hi[b][2]};

  for (int fold = 0; fold < kMaxFolds; ++fold) {
    // violated planes of the chart box, deepest first
    int order[3] = {-1, -1, -1};
    double depth[3] = {0, 0, 0};
    int nv = 0;
    for (int a = 0; a < dom.dim; ++a) {
      const double d = std::max(blo[a] - p[a], p[a] - bhi[a]);
      if (d > 0.0) {
        order[nv] = a;
        depth[nv] = d;
        ++nv;
      }
    }
    if (nv == 0) return false;  // inside the box yet contains() said no
    for (int i = 1; i < nv; ++i)
      for (int j = i; j > 0 && depth[j] > depth[j - 1]; --j) {
        std::swap(depth[j], depth[j - 1]);
        std::swap(order[j], order[j - 1]);
      }

    bool folded = false;
    for (int i = 0; i < nv && !folded; ++i) {
      const int a = order[i];
      const bool low = p[a] < blo[a];
      const double plane = low ? blo[a] : bhi[a];
      // probe just past the plane, other coordinates clamped to the box:
      // inside means shared interface (keep going), outside means wall
      double q[3] = {std::clamp(p[0], blo[0], bhi[0]),
                     std::clamp(p[1], blo[1], bhi[1]),
                     dom.dim < 3 ? 0.0 : std::clamp(p[2], blo[2], bhi[2])};
      q[a] = plane + (low ? -kProbe : kProbe);
      int qh = hint;
      if (!dom.contains(q, qh)) {
        p[a] = 2.0 * plane - p[a];
        folded = true;
      }
    }
    if (!folded) return false;  // proposal escaped through an interface

    ph = hint;
    if (dom.contains(p, ph)) {
      pos[0] = p[0];
      pos[1] = p[1];
      pos[2] = p[2];
      hint = ph;
      return true;
    }
  }
  return false;
}

void do_step(const FastDom& dom, double* pos, double V, double dt,
             const double* noise, Xoshiro256pp* rng, int& hint,
             int64_t& retries, int depth) {
  const double amp = std::sqrt(2.0 * dt);
  double disp[3] = {V * dt + amp * noise[0], amp * noise[1],
                    dom.dim < 3 ? 0.0 : amp * noise[2]};
  if (fold_step(dom, pos, disp, hint)) return;
  if (depth >= kMaxDepth || !rng)
    throw ReflectionStuck("reflection unresolved at dt = " + std::to_string(dt));
  ++retries;
  for (int half = 0; half < 2; ++half) {
    double n2[3] = {rng->normal(), rng->normal(),
                    dom.dim < 3 ? 0.0 : rng->normal()};
    do_step(dom, pos, V, 0.5 * dt, n2, rng, hint, retries, depth + 1);
  }
}

}  // namespace

std::array<double, 3> step_reflect(const CellDomain& dom,
                                   const std::array<double, 3>& x, double V,
                                   double dt,
                                   const std::array<double, 3>& noise,
                                   Xoshiro256pp* rng) {
  const FastDom f = FastDom::from(dom);
  double pos[3] = {x[0], x[1], dom.dim < 3 ? 0.0 : x[2]};
  int hint = 0;
  if (!f.contains(pos, hint))
    throw BadSpec("step_reflect start point lies outside the domain");
  int64_t retries = 0;
  do_step(f, pos, V, dt, noise.data(), rng, hint, retries, 0);
  return {pos[0], pos[1], pos[2]};
}

McEstimate estimate_effective(const CellDomain& dom, double V,
                              const McConfig& cfg) {
  if (cfg.nPaths < 2) throw BadSpec("need at least two paths");
  if (!(cfg.dt > 0.0) || !(cfg.T > 0.0)) throw BadSpec("T and dt must be positive");
  const FastDom f = FastDom::from(dom);

  double minExtent = std::numeric_limits<double>::infinity();
  for (int b = 0; b < f.n; ++b)
    for (int a = 0; a < f.dim; ++a)
      minExtent = std::min(minExtent, f.hi[b][a] - f.lo[b][a]);
  if (std::sqrt(2.0 * cfg.dt) > 0.25 * minExtent)
    throw BadSpec("step length sqrt(2 dt) exceeds a quarter of the smallest "
                  "box extent");

  const double burn = cfg.burnIn < 0.0 ? std::min(2.0, cfg.T / 10.0) : cfg.burnIn;
  const int64_t burnSteps = std::llround(burn / cfg.dt);
  const int64_t mainSteps = std::llround(cfg.T / cfg.dt);
  const double zlo[2] = {dom.zmin[0], f.dim < 3 ? 0.0 : dom.zmin[1]};
  const double zhi[2] = {dom.zmax[0], f.dim < 3 ? 0.0 : dom.zmax[1]};

  std::vector<double> ds(size_t(cfg.nPaths));
  int64_t retries = 0;
  for (int64_t path = 0; path < cfg.nPaths; ++path) {
    Xoshiro256pp rng(cfg.seed, uint64_t(path));
    double pos[3] = {0, 0, 0};
    int hint = 0;
    do {  // uniform start inside one period
      pos[0] = rng.uniform();
      pos[1] = zlo[0] + (zhi[0] - zlo[0]) * rng.uniform();
      if (f.dim == 3) pos[2] = zlo[1] + (zhi[1] - zlo[1]) * rng.uniform();
    } while (!f.contains(pos, hint));

    for (int64_t k = 0; k < burnSteps; ++k) {
      double n[3] = {rng.normal(), rng.normal(),
                     f.dim < 3 ? 0.0 : rng.normal()};
      do_step(f, pos, V, cfg.dt, n, &rng, hint, retries, 0);
    }
    const double sRef = pos[0];
    for (int64_t k = 0; k < mainSteps; ++k) {
      double n[3] = {rng.normal(), rng.normal(),
                     f.dim < 3 ? 0.0 : rng.normal()};
      do_step(f, pos, V, cfg.dt, n, &rng, hint, retries, 0);
    }
    ds[size_t(path)] = pos[0] - sRef;
  }

  const double n = double(cfg.nPaths);
  double mean = 0.0;
  for (double d : ds) mean += d;
  mean /= n;
  double var = 0.0, mu4 = 0.0;
  for (double d : ds) {
    const double c = d - mean;
    var += c * c;
    mu4 += c * c * c * c;
  }
  var /= (n - 1.0);
  mu4 /= n;

  McEstimate est;
  est.nPaths = cfg.nPaths;
  est.T = cfg.T;
  est.dt = cfg.dt;
  est.burnIn = burn;
  est.totalSteps = (burnSteps + mainSteps) * cfg.nPaths;
  est.halfStepRetries = retries;
  est.veff = mean / cfg.T;
  est.veffSe = std::sqrt(var / n) / cfg.T;
  est.sigma2 = var / (2.0 * cfg.T);
  est.sigma2Se = std::sqrt(std::max(mu4 - var * var, 0.0) / n) / (2.0 * cfg.T);
  return est;
}

}  // namespace tube
