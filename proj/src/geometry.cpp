#include "tube/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tube {

namespace {

constexpr double kCoordTol = 1e-12;

double wrap01(double s) {
  double r = s - std::floor(s);
  if (r >= 1.0) r -= 1.0;  // guards s = -0.0 and exact negatives
  return r;
}

// s-interval membership for a canonical box (lo in [0,1), hi <= lo + 1).
bool s_in_box(const Box& b, double s) {
  if (b.hi[0] <= 1.0 + kCoordTol) return s >= b.lo[0] && s <= b.hi[0];
  return s >= b.lo[0] || s <= b.hi[0] - 1.0;
}

void validate_box(const Box& b, int dim) {
  for (int a = 0; a < dim; ++a) {
    if (!(b.extent(a) > kCoordTol))
      throw DegenerateBox("box has nonpositive extent on axis " + std::to_string(a));
  }
  if (b.lo[0] < -kCoordTol || b.hi[0] > 2.0 + kCoordTol)
    throw BadSpec("box s-range must lie within [0,2)");
  if (b.extent(0) > 1.0 + kCoordTol)
    throw BadSpec("box s-extent exceeds one period");
}

Box canonical_box(Box b) {
  if (b.lo[0] >= 1.0 - kCoordTol && b.hi[0] >= 1.0) {
    b.lo[0] -= 1.0;
    b.hi[0] -= 1.0;
  }
  if (b.lo[0] < 0) b.lo[0] = 0;
  // A full-period box is stored as exactly [0,1].
  if (b.extent(0) >= 1.0 - kCoordTol) {
    b.lo[0] = 0.0;
    b.hi[0] = 1.0;
  }
  return b;
}

// Splits a wrapping box into its [lo,1] and [0,hi-1] pieces.
std::vector<Box> split_at_seam(const Box& b) {
  if (b.hi[0] <= 1.0 + kCoordTol) return {b};
  Box left = b, right = b;
  left.hi[0] = 1.0;
  right.lo[0] = 0.0;
  right.hi[0] = b.hi[0] - 1.0;
  return {left, right};
}

std::vector<double> dedup_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > kCoordTol) out.push_back(x);
  return out;
}

}  // namespace

bool CellDomain::contains(const std::array<double, 3>& p) const {
  double s = wrap01(p[0]);
  for (const Box& b : boxes) {
    if (!s_in_box(b, s)) continue;
    bool in = true;
    for (int a = 1; a < dim; ++a)
      if (p[a] < b.lo[a] || p[a] > b.hi[a]) { in = false; break; }
    if (in) return true;
  }
  return false;
}

FaceClass CellDomain::classify_face(const std::array<double, 3>& center, int axis,
                                    double delta) const {
  std::array<double, 3> plus = center, minus = center;
  plus[axis] += delta;
  minus[axis] -= delta;
  bool inPlus = contains(plus), inMinus = contains(minus);
  if (!inPlus && !inMinus) return FaceClass::Outside;
  if (inPlus != inMinus) return FaceClass::Lateral;
  if (axis == 0) {
    double s = wrap01(center[0]);
    if (s < kCoordTol || 1.0 - s < kCoordTol) return FaceClass::Seam;
  }
  return FaceClass::Interior;
}

CellDomain build_cell(const TubeSpec& spec) {
  if (spec.dim != 2 && spec.dim != 3) throw BadSpec("dim must be 2 or 3");
  if (spec.boxes.empty()) throw BadSpec("spec has no boxes");

  CellDomain dom;
  dom.dim = spec.dim;
  dom.drift = spec.drift;
  dom.label = spec.label;
  for (const Box& b : spec.boxes) {
    validate_box(b, spec.dim);
    dom.boxes.push_back(canonical_box(b));
  }

  for (int a = 1; a < dom.dim; ++a) {
    dom.zmin[a - 1] = dom.boxes[0].lo[a];
    dom.zmax[a - 1] = dom.boxes[0].hi[a];
    for (const Box& b : dom.boxes) {
      dom.zmin[a - 1] = std::min(dom.zmin[a - 1], b.lo[a]);
      dom.zmax[a - 1] = std::max(dom.zmax[a - 1], b.hi[a]);
    }
  }

  // Coordinate-compressed partition: exact union volume plus connectivity
  // of the glued cell, independent of any grid spacing.
  std::vector<double> scuts{0.0, 1.0};
  std::array<std::vector<double>, 2> zcuts;
  for (const Box& b : dom.boxes)
    for (const Box& piece : split_at_seam(b)) {
      scuts.push_back(piece.lo[0]);
      scuts.push_back(piece.hi[0]);
      for (int a = 1; a < dom.dim; ++a) {
        zcuts[a - 1].push_back(piece.lo[a]);
        zcuts[a - 1].push_back(piece.hi[a]);
      }
    }
  scuts = dedup_sorted(scuts);
  int nzAxes = dom.dim - 1;
  std::array<std::vector<double>, 2> zc;
  for (int a = 0; a < nzAxes; ++a) zc[a] = dedup_sorted(zcuts[a]);

  int ns = (int)scuts.size() - 1;
  int n1 = (int)zc[0].size() - 1;
  int n2 = nzAxes == 2 ? (int)zc[1].size() - 1 : 1;
  auto idx = [&](int i, int j, int k) { return (k * n1 + j) * ns + i; };

  std::vector<char> covered((size_t)ns * n1 * n2, 0);
  double volume = 0.0;
  int nCovered = 0;
  for (int k = 0; k < n2; ++k)
    for (int j = 0; j < n1; ++j)
      for (int i = 0; i < ns; ++i) {
        std::array<double, 3> c{};
        c[0] = 0.5 * (scuts[i] + scuts[i + 1]);
        c[1] = 0.5 * (zc[0][j] + zc[0][j + 1]);
        if (nzAxes == 2) c[2] = 0.5 * (zc[1][k] + zc[1][k + 1]);
        if (!dom.contains(c)) continue;
        covered[idx(i, j, k)] = 1;
        ++nCovered;
        double v = (scuts[i + 1] - scuts[i]) * (zc[0][j + 1] - zc[0][j]);
        if (nzAxes == 2) v *= zc[1][k + 1] - zc[1][k];
        volume += v;
      }
  if (nCovered == 0) throw DegenerateBox("union of boxes is empty");
  dom.cellVolume = volume;

  // Flood fill with the seam glued (s column 0 adjacent to s column ns-1).
  std::vector<char> seen((size_t)ns * n1 * n2, 0);
  std::vector<std::array<int, 3>> stack;
  for (int k = 0; k < n2 && stack.empty(); ++k)
    for (int j = 0; j < n1 && stack.empty(); ++j)
      for (int i = 0; i < ns; ++i)
        if (covered[idx(i, j, k)]) {
          stack.push_back({i, j, k});
          seen[idx(i, j, k)] = 1;
          break;
        }
  int reached = 0;
  while (!stack.empty()) {
    auto [i, j, k] = stack.back();
    stack.pop_back();
    ++reached;
    auto visit = [&](int ii, int jj, int kk) {
      if (jj < 0 || jj >= n1 || kk < 0 || kk >= n2) return;
      ii = (ii + ns) % ns;
      if (!covered[idx(ii, jj, kk)] || seen[idx(ii, jj, kk)]) return;
      seen[idx(ii, jj, kk)] = 1;
      stack.push_back({ii, jj, kk});
    };
    visit(i - 1, j, k);
    visit(i + 1, j, k);
    visit(i, j - 1, k);
    visit(i, j + 1, k);
    if (nzAxes == 2) {
      visit(i, j, k - 1);
      visit(i, j, k + 1);
    }
  }
  if (reached != nCovered)
    throw DisconnectedCell("glued cell splits into multiple components");

  return dom;
}

TubeSpec mirror(const TubeSpec& spec) {
  TubeSpec out = spec;
  for (Box& b : out.boxes) {
    double lo = 1.0 - b.hi[0];
    double hi = 1.0 - b.lo[0];
    if (lo < -kCoordTol) {  // wrapped across the seam; shift back into [0,2)
      lo += 1.0;
      hi += 1.0;
    }
    if (std::abs(lo) < kCoordTol) lo = 0.0;
    b.lo[0] = lo;
    b.hi[0] = hi;
  }
  return out;
}

TubeSpec attach_cavity(const TubeSpec& base, const Box& cavity, double eps,
                       const std::array<double, 2>& attach) {
  if (!(eps > 0)) throw BadSpec("channel width must be positive");
  validate_box(cavity, base.dim);
  int zlast = base.dim - 1;

  double top = base.boxes[0].hi[zlast];
  for (const Box& b : base.boxes) top = std::max(top, b.hi[zlast]);
  double gap = cavity.lo[zlast] - top;
  if (!(gap > kCoordTol))
    throw ChannelMismatch("cavity bottom must sit strictly above the base top");

  Box channel{};
  channel.lo[0] = attach[0] - 0.5 * eps;
  channel.hi[0] = attach[0] + 0.5 * eps;
  if (base.dim == 3) {
    channel.lo[1] = attach[1] - 0.5 * eps;
    channel.hi[1] = attach[1] + 0.5 * eps;
  }
  channel.lo[zlast] = top;
  channel.hi[zlast] = cavity.lo[zlast];

  // The channel must open into both the base top and the cavity bottom:
  // its footprint lies inside some base box reaching the top, and inside
  // the cavity footprint.
  auto footprint_in = [&](const Box& host) {
    for (int a = 0; a < zlast; ++a)
      if (channel.lo[a] < host.lo[a] - kCoordTol ||
          channel.hi[a] > host.hi[a] + kCoordTol)
        return false;
    return true;
  };
  bool onBase = false;
  for (const Box& b : base.boxes)
    if (std::abs(b.hi[zlast] - top) < kCoordTol && footprint_in(b)) onBase = true;
  if (!onBase)
    throw ChannelMismatch("channel footprint does not lie in the base top");
  if (!footprint_in(cavity))
    throw ChannelMismatch("channel footprint does not lie in the cavity bottom");

  TubeSpec out = base;
  out.boxes.push_back(channel);
  out.boxes.push_back(cavity);
  return out;
}

TubeSpec preset_spec(const std::string& name) {
  TubeSpec s;
  s.label = name;
  if (name == "straight") {
    s.dim = 2;
    s.boxes = {{{0, 0, 0}, {1, 1, 0}}};
  } else if (name == "finger") {
    s.dim = 2;
    s.boxes = {{{0, 0, 0}, {1, 0.3, 0}}, {{0.4, 0.3, 0}, {0.6, 1.0, 0}}};
  } else if (name == "ratchet") {
    // Chiral finger: stem with a one-sided arm. Conforms to h = 1/8..1/64.
    s.dim = 2;
    s.boxes = {{{0, 0, 0}, {1, 0.25, 0}},
               {{0.25, 0.25, 0}, {0.5, 0.75, 0}},
               {{0.5, 0.5, 0}, {0.875, 0.75, 0}}};
  } else if (name == "straight3") {
    s.dim = 3;
    s.boxes = {{{0, 0, 0}, {1, 1, 1}}};
  } else {
    throw BadSpec("unknown preset: " + name);
  }
  return s;
}

bool same_domain(const TubeSpec& a, const TubeSpec& b) {
  if (a.dim != b.dim) return false;
  auto pieces = [](const TubeSpec& s) {
    std::vector<Box> out;
    for (const Box& b : s.boxes) {
      Box cb = canonical_box(b);
      for (const Box& p : split_at_seam(cb)) out.push_back(p);
    }
    std::sort(out.begin(), out.end(), [](const Box& x, const Box& y) {
      for (int a = 0; a < 3; ++a) {
        if (x.lo[a] != y.lo[a]) return x.lo[a] < y.lo[a];
        if (x.hi[a] != y.hi[a]) return x.hi[a] < y.hi[a];
      }
      return false;
    });
    return out;
  };
  auto pa = pieces(a), pb = pieces(b);
  if (pa.size() != pb.size()) return false;
  for (size_t i = 0; i < pa.size(); ++i)
    for (int ax = 0; ax < a.dim; ++ax)
      if (std::abs(pa[i].lo[ax] - pb[i].lo[ax]) > kCoordTol ||
          std::abs(pa[i].hi[ax] - pb[i].hi[ax]) > kCoordTol)
        return false;
  return true;
}

}  // namespace tube
