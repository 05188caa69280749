#pragma once

#include <array>
#include <string>
#include <vector>

#include "tube/errors.hpp"

namespace tube {

// Axis 0 is the tube axis s; the domain is 1-periodic in s. One period
// ("the cell") is a union of closed axis-aligned boxes. A box may wrap
// around the seam s = 0 == 1, in which case hi[0] exceeds 1; all s
// coordinates stay within [0,2).
struct Box {
  std::array<double, 3> lo{{0, 0, 0}};
  std::array<double, 3> hi{{0, 0, 0}};
  double extent(int axis) const { return hi[axis] - lo[axis]; }
};

struct TubeSpec {
  int dim = 2;          // 2 or 3
  double drift = 0.0;   // axial drift coefficient V
  std::string label;
  std::vector<Box> boxes;
};

enum class FaceClass { Interior, Lateral, Seam, Outside };

// Validated, canonicalized period cell. Canonical boxes have lo[0] in
// [0,1); wrapping boxes keep hi[0] in (1,2). Overlaps are allowed; the
// domain is the union.
class CellDomain {
 public:
  int dim = 2;
  double drift = 0.0;
  std::string label;
  std::vector<Box> boxes;
  double cellVolume = 0.0;                  // |union| in one period, exact
  std::array<double, 2> zmin{{0, 0}};       // transverse bounding range
  std::array<double, 2> zmax{{0, 0}};

  // Point membership; the s coordinate is interpreted mod 1. Boundary
  // points count as inside.
  bool contains(const std::array<double, 3>& p) const;

  // Classify the axis-normal face plane through `center` by probing both
  // sides at distance `delta` along the axis.
  FaceClass classify_face(const std::array<double, 3>& center, int axis,
                          double delta) const;
};

// Validates the spec, canonicalizes boxes, computes the exact union volume,
// and checks connectivity of the glued cell. Throws DegenerateBox,
// BadSpec, DisconnectedCell.
CellDomain build_cell(const TubeSpec& spec);

// Reflection s -> 1 - s (mod 1). Involution up to box representation.
TubeSpec mirror(const TubeSpec& spec);

// Attaches a cavity box above the top of `base` (in the last transverse
// axis) through a channel of cross-section eps per lateral axis, centered
// at `attach` (s, and x2 when dim == 3). The channel spans the gap between
// the base top and the cavity bottom. Throws ChannelMismatch if the channel
// footprint is not contained in both the base top and the cavity bottom,
// or if there is no positive gap.
TubeSpec attach_cavity(const TubeSpec& base, const Box& cavity, double eps,
                       const std::array<double, 2>& attach);

// Built-in geometries: "straight", "finger", "ratchet", "straight3".
TubeSpec preset_spec(const std::string& name);

// Compares two specs as point sets via canonical box decomposition
// (wrapping boxes split at the seam, sorted). Sufficient for specs that
// share a decomposition, e.g. mirror round trips.
bool same_domain(const TubeSpec& a, const TubeSpec& b);

}  // namespace tube
