#include "ietidp/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace ietidp {

std::string_view side_name(Side s) {
  switch (s) {
    case Side::umin: return "umin";
    case Side::umax: return "umax";
    case Side::vmin: return "vmin";
    case Side::vmax: return "vmax";
  }
  return "?";
}

std::optional<Side> side_from_name(std::string_view name) {
  for (Side s : kAllSides)
    if (side_name(s) == name) return s;
  return std::nullopt;
}

Eigen::Vector2d side_point(Side s, double t) {
  switch (s) {
    case Side::umin: return {0.0, t};
    case Side::umax: return {1.0, t};
    case Side::vmin: return {t, 0.0};
    case Side::vmax: return {t, 1.0};
  }
  return {0.0, 0.0};
}

Corner side_corner(Side s, int end) {
  static constexpr int table[4][2] = {{0, 2}, {1, 3}, {0, 1}, {2, 3}};
  return table[static_cast<int>(s)][end];
}

int side_direction(Side s) { return (s == Side::umin || s == Side::umax) ? 1 : 0; }

bool corner_on_side(Corner c, Side s) { return side_corner(s, 0) == c || side_corner(s, 1) == c; }

NurbsPatchMap::NurbsPatchMap(TensorSplineSpace space_, std::vector<Eigen::Vector2d> control_points_,
                             std::vector<double> weights_)
    : space(std::move(space_)),
      control_points(std::move(control_points_)),
      weights(std::move(weights_)) {
  const auto n = static_cast<std::size_t>(space.size());
  if (control_points.size() != n || weights.size() != n)
    throw ArgumentError("geometry map: control point / weight count does not match the space");
  for (double w : weights)
    if (!(w > 0.0)) throw ArgumentError("geometry map: weights must be positive");
}

MapValue map_eval_with_jacobian(const NurbsPatchMap& G, double u, double v) {
  const auto& kvu = G.space.kv_u();
  const auto& kvv = G.space.kv_v();
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
    throw ArgumentError("map_eval: parameter outside [0,1]^2");
  const auto bu = eval_basis_derivs(kvu, u, 1);
  const auto bv = eval_basis_derivs(kvv, v, 1);

  Eigen::Vector2d num = Eigen::Vector2d::Zero(), num_u = num, num_v = num;
  double den = 0.0, den_u = 0.0, den_v = 0.0;
  for (int b = 0; b < bv.table.cols(); ++b) {
    for (int a = 0; a < bu.table.cols(); ++a) {
      const int idx = G.space.index(bu.first_active + a, bv.first_active + b);
      const double w = G.weights[idx];
      const double N = bu.table(0, a) * bv.table(0, b) * w;
      const double Nu = bu.table(1, a) * bv.table(0, b) * w;
      const double Nv = bu.table(0, a) * bv.table(1, b) * w;
      num += N * G.control_points[idx];
      num_u += Nu * G.control_points[idx];
      num_v += Nv * G.control_points[idx];
      den += N;
      den_u += Nu;
      den_v += Nv;
    }
  }
  MapValue out;
  out.point = num / den;
  out.jacobian.col(0) = (num_u - out.point * den_u) / den;
  out.jacobian.col(1) = (num_v - out.point * den_v) / den;
  return out;
}

Eigen::Vector2d map_eval(const NurbsPatchMap& G, double u, double v) {
  return map_eval_with_jacobian(G, u, v).point;
}

Eigen::Matrix2d map_jacobian(const NurbsPatchMap& G, double u, double v) {
  return map_eval_with_jacobian(G, u, v).jacobian;
}

NurbsPatchMap bilinear_patch(const std::array<Eigen::Vector2d, 4>& corners) {
  TensorSplineSpace space(open_uniform_knots(1, 1), open_uniform_knots(1, 1));
  return NurbsPatchMap(space, {corners[0], corners[1], corners[2], corners[3]}, {1, 1, 1, 1});
}

NurbsPatchMap quarter_annulus(double r_inner, double r_outer, double angle_start) {
  TensorSplineSpace space(open_uniform_knots(2, 1), open_uniform_knots(2, 1));
  const double w_mid = std::sqrt(0.5);
  const double radii[3] = {r_inner, 0.5 * (r_inner + r_outer), r_outer};
  const Eigen::Vector2d d0(std::cos(angle_start), std::sin(angle_start));
  const Eigen::Vector2d d2(-d0.y(), d0.x());
  const Eigen::Vector2d d1 = d0 + d2;  // tangent intersection of the arc ends
  const Eigen::Vector2d dirs[3] = {d0, d1, d2};
  const double arc_weights[3] = {1.0, w_mid, 1.0};

  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      points.push_back(radii[i] * dirs[j]);
      weights.push_back(arc_weights[j]);
    }
  }
  return NurbsPatchMap(space, std::move(points), std::move(weights));
}

bool MultiPatchDomain::is_dirichlet(int patch, Side s) const {
  return std::any_of(boundary_sides.begin(), boundary_sides.end(),
                     [&](const BoundarySide& b) { return b.patch == patch && b.side == s; });
}

int MultiPatchDomain::vertex_of(int patch, Corner c) const { return corner_vertex.at(patch)[c]; }

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

MultiPatchDomain make_domain(std::vector<NurbsPatchMap> patches, std::vector<Interface> interfaces,
                             std::vector<BoundarySide> boundary_sides) {
  MultiPatchDomain d;
  d.patches = std::move(patches);
  d.interfaces = std::move(interfaces);
  d.boundary_sides = std::move(boundary_sides);
  const int K = d.num_patches();

  std::vector<std::array<int, 4>> uses(K, std::array<int, 4>{0, 0, 0, 0});
  auto use = [&](int patch, Side s, const std::string& what) {
    if (patch < 0 || patch >= K)
      throw TopologyError(what + " references missing patch " + std::to_string(patch));
    ++uses[patch][static_cast<int>(s)];
  };
  for (std::size_t i = 0; i < d.interfaces.size(); ++i) {
    const auto& f = d.interfaces[i];
    const std::string what = "interface " + std::to_string(i);
    use(f.patch_a, f.side_a, what);
    use(f.patch_b, f.side_b, what);
    if (f.patch_a == f.patch_b) throw TopologyError(what + " connects a patch to itself");
  }
  for (const auto& b : d.boundary_sides) use(b.patch, b.side, "boundary entry");
  for (int k = 0; k < K; ++k)
    for (Side s : kAllSides)
      if (uses[k][static_cast<int>(s)] != 1)
        throw TopologyError("side " + std::string(side_name(s)) + " of patch " + std::to_string(k) +
                            " is used " + std::to_string(uses[k][static_cast<int>(s)]) +
                            " times (expected exactly once)");

  UnionFind uf(4 * K);
  for (const auto& f : d.interfaces) {
    for (int e = 0; e < 2; ++e) {
      const int eb = f.reversed ? 1 - e : e;
      uf.unite(4 * f.patch_a + side_corner(f.side_a, e), 4 * f.patch_b + side_corner(f.side_b, eb));
    }
  }

  std::map<int, int> root_to_vertex;
  d.corner_vertex.assign(K, std::array<int, 4>{-1, -1, -1, -1});
  for (int k = 0; k < K; ++k) {
    for (Corner c = 0; c < 4; ++c) {
      const int root = uf.find(4 * k + c);
      auto [it, inserted] = root_to_vertex.emplace(root, static_cast<int>(d.vertices.size()));
      if (inserted) d.vertices.emplace_back();
      auto& vtx = d.vertices[it->second];
      for (const auto& other : vtx.corners)
        if (other.patch == k)
          throw TopologyError("patch " + std::to_string(k) + " touches one vertex with two corners");
      vtx.corners.push_back({k, c});
      d.corner_vertex[k][c] = it->second;
      for (Side s : kAllSides)
        if (corner_on_side(c, s) && d.is_dirichlet(k, s)) vtx.on_dirichlet_boundary = true;
    }
  }
  return d;
}

MultiPatchDomain build_unit_square_grid(int m, int n) {
  if (m < 1 || n < 1) throw ArgumentError("build_unit_square_grid: m and n must be >= 1");
  std::vector<NurbsPatchMap> patches;
  std::vector<Interface> interfaces;
  std::vector<BoundarySide> boundary;
  auto id = [m](int i, int j) { return j * m + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      const double x = i, y = j;
      patches.push_back(bilinear_patch({Eigen::Vector2d(x, y), Eigen::Vector2d(x + 1, y),
                                        Eigen::Vector2d(x, y + 1), Eigen::Vector2d(x + 1, y + 1)}));
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      if (i + 1 < m) interfaces.push_back({id(i, j), Side::umax, id(i + 1, j), Side::umin, false});
      if (j + 1 < n) interfaces.push_back({id(i, j), Side::vmax, id(i, j + 1), Side::vmin, false});
      if (i == 0) boundary.push_back({id(i, j), Side::umin});
      if (i == m - 1) boundary.push_back({id(i, j), Side::umax});
      if (j == 0) boundary.push_back({id(i, j), Side::vmin});
      if (j == n - 1) boundary.push_back({id(i, j), Side::vmax});
    }
  }
  return make_domain(std::move(patches), std::move(interfaces), std::move(boundary));
}

MultiPatchDomain build_ring() {
  constexpr int layers = 3, sectors = 4;
  const double pi = std::acos(-1.0);
  const double radii[layers + 1] = {kRingInnerRadius, 4.0 / 3.0, 5.0 / 3.0, kRingOuterRadius};
  std::vector<NurbsPatchMap> patches;
  std::vector<Interface> interfaces;
  std::vector<BoundarySide> boundary;
  auto id = [](int layer, int sector) { return layer * sectors + sector; };
  for (int l = 0; l < layers; ++l)
    for (int s = 0; s < sectors; ++s)
      patches.push_back(quarter_annulus(radii[l], radii[l + 1], s * pi / 2));
  for (int l = 0; l < layers; ++l) {
    for (int s = 0; s < sectors; ++s) {
      if (l + 1 < layers) interfaces.push_back({id(l, s), Side::umax, id(l + 1, s), Side::umin, false});
      interfaces.push_back({id(l, s), Side::vmax, id(l, (s + 1) % sectors), Side::vmin, false});
    }
  }
  for (int s = 0; s < sectors; ++s) {
    boundary.push_back({id(0, s), Side::umin});
    boundary.push_back({id(layers - 1, s), Side::umax});
  }
  return make_domain(std::move(patches), std::move(interfaces), std::move(boundary));
}

const KnotVector& side_knots(const TensorSplineSpace& space, Side s) {
  return space.kv(side_direction(s));
}

TensorSplineSpace analysis_space(const NurbsPatchMap& G, int degree, int refinements) {
  if (refinements < 0) throw ArgumentError("analysis_space: refinement level must be >= 0");
  auto kvu = knots_from_breakpoints(degree, G.space.kv_u().breakpoints());
  auto kvv = knots_from_breakpoints(degree, G.space.kv_v().breakpoints());
  for (int i = 0; i < refinements; ++i) {
    kvu = uniform_refine(kvu);
    kvv = uniform_refine(kvv);
  }
  return TensorSplineSpace(std::move(kvu), std::move(kvv));
}

std::vector<TensorSplineSpace> analysis_spaces(const MultiPatchDomain& domain, int degree,
                                               int refinements) {
  std::vector<TensorSplineSpace> out;
  out.reserve(domain.patches.size());
  for (const auto& G : domain.patches) out.push_back(analysis_space(G, degree, refinements));
  return out;
}

MatchingReport validate_matching(const MultiPatchDomain& domain,
                                 const std::vector<TensorSplineSpace>& spaces) {
  MatchingReport report;
  if (spaces.size() != domain.patches.size()) {
    report.ok = false;
    report.message = "number of analysis spaces does not match the number of patches";
    return report;
  }
  auto fail = [&](int i, const std::string& msg) {
    report.ok = false;
    report.interface = i;
    report.message = "interface " + std::to_string(i) + ": " + msg;
    return report;
  };
  for (int i = 0; i < static_cast<int>(domain.interfaces.size()); ++i) {
    const auto& f = domain.interfaces[i];
    const auto& ka = side_knots(spaces[f.patch_a], f.side_a);
    const auto& kb = side_knots(spaces[f.patch_b], f.side_b);
    if (ka.degree() != kb.degree()) return fail(i, "spline degrees differ");
    if (ka.knots().size() != kb.knots().size()) return fail(i, "knot vectors differ");
    const auto n = ka.knots().size();
    for (std::size_t j = 0; j < n; ++j) {
      const double mine = ka.knots()[j];
      const double theirs = f.reversed ? 1.0 - kb.knots()[n - 1 - j] : kb.knots()[j];
      const bool equal = f.reversed ? std::abs(mine - theirs) <= 1e-12 : mine == theirs;
      if (!equal) return fail(i, "knot vectors differ");
    }
    const int samples = 4 * (ka.degree() + 1);
    const auto& Ga = domain.patches[f.patch_a];
    const auto& Gb = domain.patches[f.patch_b];
    for (int s = 0; s <= samples; ++s) {
      const double t = static_cast<double>(s) / samples;
      const Eigen::Vector2d pa = side_point(f.side_a, t);
      const Eigen::Vector2d pb = side_point(f.side_b, f.reversed ? 1.0 - t : t);
      const double gap = (map_eval(Ga, pa.x(), pa.y()) - map_eval(Gb, pb.x(), pb.y())).norm();
      if (gap > 1e-9) return fail(i, "geometry traces differ by " + format_double(gap));
    }
  }
  return report;
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace ietidp
