#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "tube/grid.hpp"

using namespace tube;

TEST_CASE("unit square at h=1/4: cells, measures and face census") {
  const Grid g = rasterize(build_cell(preset_spec("straight")), 0.25);
  CHECK(g.nCells() == 16);
  CHECK(g.ns == 4);
  CHECK(g.cellMeasure() == doctest::Approx(1.0 / 16).epsilon(1e-15));
  CHECK(g.volume() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.nInterior == 24);  // 3 interior s-planes * 4 + 4 columns * 3
  CHECK(g.nSeam == 4);
  CHECK(g.nWall == 8);  // floor and ceiling
  CHECK(int(g.faces.size()) == g.nInterior + g.nSeam + g.nWall);
}

TEST_CASE("every cell accounts for 2*dim face slots") {
  for (const char* name : {"straight", "finger", "ratchet", "straight3"}) {
    const double h = std::string(name) == "finger" ? 0.1 : 0.125;
    const Grid g = rasterize(build_cell(preset_spec(name)), h);
    int64_t slots = 0;
    for (const Grid::Face& f : g.faces)
      slots += (f.kind == FaceKind::Wall) ? 1 : 2;
    CHECK(slots == g.nCells() * 2 * g.dim);
  }
}

TEST_CASE("finger cell count and volume at a conforming spacing") {
  const Grid g = rasterize(build_cell(preset_spec("finger")), 0.1);
  CHECK(g.nCells() == 44);
  CHECK(g.volume() == doctest::Approx(0.44).epsilon(1e-14));
  const Grid g2 = rasterize(build_cell(preset_spec("ratchet")), 1.0 / 32);
  CHECK(g2.nCells() == 480);
}

TEST_CASE("face kinds agree with geometric probing at face centers") {
  const CellDomain dom = build_cell(preset_spec("ratchet"));
  const Grid g = rasterize(dom, 0.125);
  for (const Grid::Face& f : g.faces) {
    // face center: midpoint of the owner cell shifted half a cell
    std::array<double, 3> c = g.center(f.a);
    if (f.kind == FaceKind::Wall) {
      c[f.axis] += 0.5 * g.h * f.nsign;
    } else {
      c[f.axis] += 0.5 * g.h;  // owner lies on the lower side (seam: slot ns-1)
    }
    const FaceClass cls = dom.classify_face(c, f.axis, 0.25 * g.h);
    if (f.kind == FaceKind::Wall) CHECK(cls == FaceClass::Lateral);
    if (f.kind == FaceKind::Seam) CHECK(cls == FaceClass::Seam);
    if (f.kind == FaceKind::Interior) CHECK(cls == FaceClass::Interior);
  }
}

TEST_CASE("seam faces pair the last s-slot with the first") {
  const Grid g = rasterize(build_cell(preset_spec("ratchet")), 0.125);
  int seam = 0;
  for (const Grid::Face& f : g.faces)
    if (f.kind == FaceKind::Seam) {
      ++seam;
      CHECK(g.coord[size_t(f.a)][0] == g.ns - 1);
      CHECK(g.coord[size_t(f.b)][0] == 0);
      CHECK(f.axis == 0);
      CHECK(f.plane == 0);
    }
  CHECK(seam == g.nSeam);
  CHECK(seam == 2);  // only the duct crosses the seam (z in [0, 0.25])
}

TEST_CASE("axis-0 faces carry their lattice plane index") {
  const Grid g = rasterize(build_cell(preset_spec("straight")), 0.25);
  std::set<int> planes;
  for (const Grid::Face& f : g.faces)
    if (f.axis == 0 && f.kind != FaceKind::Wall) {
      CHECK(f.plane >= 0);
      CHECK(f.plane < g.ns);
      planes.insert(f.plane);
    }
  CHECK(int(planes.size()) == g.ns);
}

TEST_CASE("lattice index and coordinates are mutually inverse") {
  const Grid g = rasterize(build_cell(preset_spec("finger")), 0.1);
  const CellDomain dom = build_cell(preset_spec("finger"));
  for (int32_t id = 0; id < g.nCells(); ++id) {
    const auto [i, j, k] = g.coord[size_t(id)];
    CHECK(g.at(i, j, k) == id);
    CHECK(dom.contains(g.center(id)));
  }
  CHECK(g.at(-5, 0, 0) == g.at(5, 0, 0));  // s wraps periodically
  CHECK(g.at(0, 1000, 0) == -1);           // transverse range does not
}

TEST_CASE("non-conforming spacings are rejected") {
  CHECK_THROWS_AS((void)rasterize(build_cell(preset_spec("finger")), 0.125),
                  NonconformingSpacing);  // 0.3 is off the 1/8 lattice
  CHECK_THROWS_AS((void)rasterize(build_cell(preset_spec("straight")), 0.3),
                  NonconformingSpacing);  // 1/h is not an integer
  CHECK_NOTHROW((void)rasterize(build_cell(preset_spec("finger")), 0.05));
}

TEST_CASE("three-dimensional grid has six-sided cells and a cubic measure") {
  const Grid g = rasterize(build_cell(preset_spec("straight3")), 0.25);
  CHECK(g.dim == 3);
  CHECK(g.nCells() == 64);
  CHECK(g.cellMeasure() == doctest::Approx(std::pow(0.25, 3)).epsilon(1e-15));
  CHECK(g.nSeam == 16);
  CHECK(g.nWall == 2 * 16 + 2 * 16);  // four lateral sides
}
