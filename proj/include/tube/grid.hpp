#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tube/geometry.hpp"

namespace tube {

enum class FaceKind : uint8_t { Interior, Seam, Wall };

// Uniform voxel grid over one period of the cell. A voxel is active when
// its center lies in the domain; with boxes conforming to the h-lattice
// this is exact coverage. Faces are enumerated once, in a fixed order
// (lower cell owns interior faces, the s = 1-h..0 pair owns the seam face,
// wall faces belong to their only cell).
class Grid {
 public:
  struct Face {
    int32_t a = -1;        // owner (lower coordinate side; for seam: s-slot ns-1)
    int32_t b = -1;        // neighbor (upper side / seam s-slot 0); -1 for walls
    uint8_t axis = 0;
    FaceKind kind = FaceKind::Interior;
    int8_t nsign = 0;      // walls only: outward normal sign along axis
    int32_t plane = 0;     // axis-0 faces: lattice plane index in [0, ns)
  };

  int dim = 2;
  double h = 0;
  int ns = 0;                          // cells along s (= 1/h)
  std::array<int, 2> zbase{{0, 0}};    // transverse lattice start index
  std::array<int, 2> znum{{1, 1}};     // transverse lattice extent

  std::vector<int32_t> index;                 // lattice -> active id or -1
  std::vector<std::array<int, 3>> coord;      // active id -> lattice coords
  std::vector<Face> faces;

  int64_t nCells() const { return (int64_t)coord.size(); }
  double cellMeasure() const;                 // h^dim
  double volume() const { return (double)nCells() * cellMeasure(); }
  std::array<double, 3> center(int32_t id) const;
  int32_t at(int i, int j, int k) const;      // -1 when absent / out of range

  int nInterior = 0, nSeam = 0, nWall = 0;
};

// Throws NonconformingSpacing when 1/h is not an integer or a box edge is
// off the h-lattice, DisconnectedGrid when the active set is not
// face-connected after gluing the seam.
Grid rasterize(const CellDomain& dom, double h);

}  // namespace tube
