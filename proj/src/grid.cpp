#include "tube/grid.hpp"

#include <cmath>

namespace tube {

namespace {

// Lattice conformity check: x must be an integer multiple of h.
int lattice_index(double x, double h, const char* what) {
  double q = x / h;
  double r = std::round(q);
  if (std::abs(q - r) > 1e-9)
    throw NonconformingSpacing(std::string(what) + " is not on the h-lattice");
  return (int)r;
}

}  // namespace

double Grid::cellMeasure() const {
  double m = h;
  for (int a = 1; a < dim; ++a) m *= h;
  return m;
}

std::array<double, 3> Grid::center(int32_t id) const {
  const auto& c = coord[id];
  std::array<double, 3> x{};
  x[0] = (c[0] + 0.5) * h;
  x[1] = (zbase[0] + c[1] + 0.5) * h;
  if (dim == 3) x[2] = (zbase[1] + c[2] + 0.5) * h;
  return x;
}

int32_t Grid::at(int i, int j, int k) const {
  if (j < 0 || j >= znum[0] || k < 0 || k >= znum[1]) return -1;
  i = (i % ns + ns) % ns;
  return index[((size_t)k * znum[0] + j) * ns + i];
}

Grid rasterize(const CellDomain& dom, double h) {
  Grid g;
  g.dim = dom.dim;
  g.h = h;
  if (!(h > 0)) throw NonconformingSpacing("spacing must be positive");
  {
    double q = 1.0 / h;
    if (std::abs(q - std::round(q)) > 1e-9)
      throw NonconformingSpacing("1/h is not an integer");
    g.ns = (int)std::round(q);
    if (g.ns < 2) throw NonconformingSpacing("need at least two cells along s");
  }
  for (const Box& b : dom.boxes)
    for (int a = 0; a < dom.dim; ++a) {
      lattice_index(b.lo[a], h, "box edge");
      lattice_index(b.hi[a], h, "box edge");
    }
  for (int a = 1; a < dom.dim; ++a) {
    g.zbase[a - 1] = lattice_index(dom.zmin[a - 1], h, "domain bound");
    g.znum[a - 1] = lattice_index(dom.zmax[a - 1], h, "domain bound") - g.zbase[a - 1];
  }

  size_t latticeSize = (size_t)g.ns * g.znum[0] * g.znum[1];
  g.index.assign(latticeSize, -1);
  auto lidx = [&](int i, int j, int k) {
    return ((size_t)k * g.znum[0] + j) * g.ns + i;
  };

  for (int k = 0; k < g.znum[1]; ++k)
    for (int j = 0; j < g.znum[0]; ++j)
      for (int i = 0; i < g.ns; ++i) {
        std::array<double, 3> c{};
        c[0] = (i + 0.5) * h;
        c[1] = (g.zbase[0] + j + 0.5) * h;
        if (g.dim == 3) c[2] = (g.zbase[1] + k + 0.5) * h;
        if (dom.contains(c)) {
          g.index[lidx(i, j, k)] = (int32_t)g.coord.size();
          g.coord.push_back({i, j, k});
        }
      }
  if (g.coord.empty()) throw DisconnectedGrid("no active cells at this spacing");

  // Face enumeration in cell-id order: +s (interior or seam), -s wall,
  // +z/-z per transverse axis.
  for (int32_t id = 0; id < (int32_t)g.coord.size(); ++id) {
    auto [i, j, k] = g.coord[id];
    {
      int32_t nb = g.at(i + 1, j, k);
      bool seam = (i + 1 == g.ns);
      int32_t plane = (i + 1) % g.ns;
      if (nb >= 0) {
        g.faces.push_back({id, nb, 0, seam ? FaceKind::Seam : FaceKind::Interior,
                           0, plane});
      } else {
        g.faces.push_back({id, -1, 0, FaceKind::Wall, +1, plane});
      }
      if (g.at(i - 1, j, k) < 0)
        g.faces.push_back({id, -1, 0, FaceKind::Wall, -1, i});
    }
    for (int a = 1; a < g.dim; ++a) {
      int dj = a == 1 ? 1 : 0, dk = a == 2 ? 1 : 0;
      int32_t up = g.at(i, j + dj, k + dk);
      if (up >= 0) {
        g.faces.push_back({id, up, (uint8_t)a, FaceKind::Interior, 0, 0});
      } else {
        g.faces.push_back({id, -1, (uint8_t)a, FaceKind::Wall, +1, 0});
      }
      if (g.at(i, j - dj, k - dk) < 0)
        g.faces.push_back({id, -1, (uint8_t)a, FaceKind::Wall, -1, 0});
    }
  }
  for (const auto& f : g.faces) {
    if (f.kind == FaceKind::Interior) ++g.nInterior;
    else if (f.kind == FaceKind::Seam) ++g.nSeam;
    else ++g.nWall;
  }

  // Connectivity on the rasterized cell (seam included via at()'s wrap).
  std::vector<char> seen(g.coord.size(), 0);
  std::vector<int32_t> stack{0};
  seen[0] = 1;
  size_t reached = 0;
  std::vector<std::vector<int32_t>> adj(g.coord.size());
  for (const auto& f : g.faces)
    if (f.b >= 0) {
      adj[f.a].push_back(f.b);
      adj[f.b].push_back(f.a);
    }
  while (!stack.empty()) {
    int32_t c = stack.back();
    stack.pop_back();
    ++reached;
    for (int32_t nb : adj[c])
      if (!seen[nb]) {
        seen[nb] = 1;
        stack.push_back(nb);
      }
  }
  if (reached != g.coord.size())
    throw DisconnectedGrid("active cells split into multiple components");

  return g;
}

}  // namespace tube
