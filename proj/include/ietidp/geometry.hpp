#ifndef IETIDP_GEOMETRY_HPP
#define IETIDP_GEOMETRY_HPP

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ietidp/splines.hpp"

namespace ietidp {

/// The four sides of the parameter domain (0,1)^2.
///
/// Each side is traversed by t in [0,1]: umin -> (0,t), umax -> (1,t),
/// vmin -> (t,0), vmax -> (t,1).
enum class Side { umin = 0, umax = 1, vmin = 2, vmax = 3 };

inline constexpr std::array<Side, 4> kAllSides = {Side::umin, Side::umax, Side::vmin, Side::vmax};

/// Corners are numbered 0:(0,0) 1:(1,0) 2:(0,1) 3:(1,1).
using Corner = int;

std::string_view side_name(Side s);
std::optional<Side> side_from_name(std::string_view name);

/// Parameter point on side s at traversal parameter t.
Eigen::Vector2d side_point(Side s, double t);
/// Corner at the start (end == 0) or end (end == 1) of the side traversal.
Corner side_corner(Side s, int end);
/// Direction (0 = u, 1 = v) along which the side is traversed.
int side_direction(Side s);
/// Whether corner c lies on side s.
bool corner_on_side(Corner c, Side s);

/// Rational tensor-product geometry map G : (0,1)^2 -> R^2.
struct NurbsPatchMap {
  TensorSplineSpace space;
  std::vector<Eigen::Vector2d> control_points;  // lexicographic, u fastest
  std::vector<double> weights;                  // all 1 for a polynomial B-spline map

  NurbsPatchMap(TensorSplineSpace space, std::vector<Eigen::Vector2d> control_points,
                std::vector<double> weights);
};

/// Point and Jacobian (columns d/du, d/dv) of a geometry map.
struct MapValue {
  Eigen::Vector2d point;
  Eigen::Matrix2d jacobian;
};

Eigen::Vector2d map_eval(const NurbsPatchMap& G, double u, double v);
Eigen::Matrix2d map_jacobian(const NurbsPatchMap& G, double u, double v);
MapValue map_eval_with_jacobian(const NurbsPatchMap& G, double u, double v);

/// Bilinear map of the unit square onto the quadrilateral with corners in the
/// corner numbering order (0,0), (1,0), (0,1), (1,1).
NurbsPatchMap bilinear_patch(const std::array<Eigen::Vector2d, 4>& corners);

struct Interface {
  int patch_a;
  Side side_a;
  int patch_b;
  Side side_b;
  bool reversed;  // side_b traversed at 1-t matches side_a at t
};

struct BoundarySide {
  int patch;
  Side side;
};

struct CornerRef {
  int patch;
  Corner corner;
  friend bool operator==(const CornerRef&, const CornerRef&) = default;
};

/// A geometric vertex: all patch corners that coincide (the set P(x)).
struct Vertex {
  std::vector<CornerRef> corners;  // sorted by (patch, corner)
  bool on_dirichlet_boundary = false;
};

/// Patches with their geometry maps and the interface/vertex topology.
///
/// Built through make_domain(), which derives the vertex sets and checks that
/// every patch side is used exactly once.
struct MultiPatchDomain {
  std::vector<NurbsPatchMap> patches;
  std::vector<Interface> interfaces;
  std::vector<BoundarySide> boundary_sides;  // Dirichlet sides
  std::vector<Vertex> vertices;

  int num_patches() const { return static_cast<int>(patches.size()); }
  bool is_dirichlet(int patch, Side s) const;
  /// Index into `vertices` of the vertex containing this patch corner.
  int vertex_of(int patch, Corner c) const;

  std::vector<std::array<int, 4>> corner_vertex;  // per patch, per corner
};

/// Assembles a domain, deriving vertex sets; throws TopologyError on inconsistent input.
MultiPatchDomain make_domain(std::vector<NurbsPatchMap> patches, std::vector<Interface> interfaces,
                             std::vector<BoundarySide> boundary_sides);

/// m x n unit squares tiling (0,m) x (0,n), Dirichlet on the outer boundary.
MultiPatchDomain build_unit_square_grid(int m, int n);

/// Annulus 1 < |x| < 2 made of 3 radial layers times 4 quarter sectors.
MultiPatchDomain build_ring();

inline constexpr double kRingInnerRadius = 1.0;
inline constexpr double kRingOuterRadius = 2.0;

/// 84-patch footprint-shaped domain of bilinear patches with interior vertices.
MultiPatchDomain build_yeti();

/// Exact quarter annulus as a biquadratic NURBS; u runs radially, v counterclockwise.
NurbsPatchMap quarter_annulus(double r_inner, double r_outer, double angle_start);

/// Analysis space on a patch: degree p, single knots at the geometry breakpoints,
/// refined uniformly r times.
TensorSplineSpace analysis_space(const NurbsPatchMap& G, int degree, int refinements);
std::vector<TensorSplineSpace> analysis_spaces(const MultiPatchDomain& domain, int degree,
                                               int refinements);

struct MatchingReport {
  bool ok = true;
  int interface = -1;  // first offending interface
  std::string message;
};

/// Checks that the analysis spaces agree across every interface (knots up to
/// orientation, equal degree) and that the geometry traces coincide.
MatchingReport validate_matching(const MultiPatchDomain& domain,
                                 const std::vector<TensorSplineSpace>& spaces);

/// Knot vector of the space restricted to side s, in traversal direction.
const KnotVector& side_knots(const TensorSplineSpace& space, Side s);

/// Parses the line-oriented domain format; throws ParseError with position information.
MultiPatchDomain parse_domain(std::string_view text);
std::string serialize_domain(const MultiPatchDomain& domain);

/// Shortest decimal string that reads back to exactly x.
std::string format_double(double x);

}  // namespace ietidp

#endif  // IETIDP_GEOMETRY_HPP
