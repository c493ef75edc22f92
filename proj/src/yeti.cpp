// Footprint-shaped 84-patch domain.
//
// The layout is a cell mask (heel, sole, four toes) on a grid whose rows and
// columns alternate between narrow and wide, pushed through a smooth
// deformation, so neighbouring patches differ in size and every patch is a
// genuine quadrilateral.
// Neighbouring cells share their corner points exactly, which makes all
// interfaces fully matching.

#include <cmath>
#include <map>

#include "ietidp/geometry.hpp"

namespace ietidp {

namespace {

bool in_footprint(int i, int j) {
  if (j < 0 || i < 0) return false;
  if (j <= 1) return i >= 2 && i <= 5;        // heel, 8 cells
  if (j <= 3) return i >= 1 && i <= 6;        // arch, 12 cells
  if (j <= 9) return i <= 7;                  // ball of the foot, 48 cells
  if (j <= 13) return i <= 6 && i % 2 == 0;   // four toes, 16 cells
  return false;
}

constexpr double kNarrow = 0.4;  // width of odd grid rows/columns; even ones get 2 - kNarrow

double grid_line(int k) { return (k / 2) * 2.0 + (k % 2) * kNarrow; }

Eigen::Vector2d node(int i, int j) {
  const double x = grid_line(i), y = grid_line(j);
  const double toe = y > 10.0 ? (y - 10.0) : 0.0;
  const double X = x + 0.12 * std::sin(0.45 * y) + 0.07 * (x - 4.0) * toe + 0.05 * std::sin(0.9 * x) * y / 14.0;
  const double Y = y + 0.10 * std::sin(0.7 * x) - 0.04 * (x - 4.0) * (x - 4.0) * toe / 4.0;
  return {X / 8.0, Y / 8.0};
}

}  // namespace

MultiPatchDomain build_yeti() {
  constexpr int width = 8, height = 14;
  std::map<std::pair<int, int>, int> cell_id;
  std::vector<NurbsPatchMap> patches;
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      if (!in_footprint(i, j)) continue;
      cell_id[{i, j}] = static_cast<int>(patches.size());
      patches.push_back(bilinear_patch({node(i, j), node(i + 1, j), node(i, j + 1), node(i + 1, j + 1)}));
    }
  }

  std::vector<Interface> interfaces;
  std::vector<BoundarySide> boundary;
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      auto it = cell_id.find({i, j});
      if (it == cell_id.end()) continue;
      const int k = it->second;
      if (in_footprint(i + 1, j))
        interfaces.push_back({k, Side::umax, cell_id.at({i + 1, j}), Side::umin, false});
      else
        boundary.push_back({k, Side::umax});
      if (in_footprint(i, j + 1))
        interfaces.push_back({k, Side::vmax, cell_id.at({i, j + 1}), Side::vmin, false});
      else
        boundary.push_back({k, Side::vmax});
      if (!in_footprint(i - 1, j)) boundary.push_back({k, Side::umin});
      if (!in_footprint(i, j - 1)) boundary.push_back({k, Side::vmin});
    }
  }
  return make_domain(std::move(patches), std::move(interfaces), std::move(boundary));
}

}  // namespace ietidp
