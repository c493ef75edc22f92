#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "ietidp/assembly.hpp"
#include "ietidp/geometry.hpp"

using namespace ietidp;

namespace {

NurbsPatchMap affine_patch(double sx, double sy) {
  return bilinear_patch({Eigen::Vector2d(0, 0), Eigen::Vector2d(sx, 0), Eigen::Vector2d(0, sy), Eigen::Vector2d(sx, sy)});
}

Eigen::Matrix2d fd_jacobian(const NurbsPatchMap& G, double u, double v) {
  const double h = 1e-6;
  Eigen::Matrix2d J;
  J.col(0) = (map_eval(G, u + h, v) - map_eval(G, u - h, v)) / (2 * h);
  J.col(1) = (map_eval(G, u, v + h) - map_eval(G, u, v - h)) / (2 * h);
  return J;
}

void check_topology(const MultiPatchDomain& d) {
  std::map<std::pair<int, int>, int> uses;
  for (const auto& f : d.interfaces) {
    ++uses[{f.patch_a, static_cast<int>(f.side_a)}];
    ++uses[{f.patch_b, static_cast<int>(f.side_b)}];
    CHECK(f.patch_a != f.patch_b);
  }
  for (const auto& b : d.boundary_sides) ++uses[{b.patch, static_cast<int>(b.side)}];
  for (int k = 0; k < d.num_patches(); ++k)
    for (Side s : kAllSides) CHECK(uses[{k, static_cast<int>(s)}] == 1);
  // vertex sets partition the corner instances
  std::set<std::pair<int, int>> corners;
  for (const auto& v : d.vertices)
    for (const auto& c : v.corners) CHECK(corners.insert({c.patch, c.corner}).second);
  CHECK(corners.size() == 4u * d.num_patches());
}

void check_regular(const MultiPatchDomain& d, int samples = 10) {
  for (int k = 0; k < d.num_patches(); ++k)
    for (int j = 0; j < samples; ++j)
      for (int i = 0; i < samples; ++i) {
        const double u = i / (samples - 1.0), v = j / (samples - 1.0);
        CHECK(map_jacobian(d.patches[k], u, v).determinant() > 0.0);
      }
}

// ||G_a(gamma_a) - G_b(gamma_b)|| over 100 samples per interface
double max_trace_gap(const MultiPatchDomain& d) {
  double gap = 0.0;
  for (const auto& f : d.interfaces)
    for (int s = 0; s <= 100; ++s) {
      const double t = s / 100.0;
      const Eigen::Vector2d a = map_eval(d.patches[f.patch_a], side_point(f.side_a, t).x(), side_point(f.side_a, t).y());
      const double tb = f.reversed ? 1.0 - t : t;
      const Eigen::Vector2d b = map_eval(d.patches[f.patch_b], side_point(f.side_b, tb).x(), side_point(f.side_b, tb).y());
      gap = std::max(gap, (a - b).norm());
    }
  return gap;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("side conventions") {
  CHECK(side_corner(Side::umin, 0) == 0);
  CHECK(side_corner(Side::umin, 1) == 2);
  CHECK(side_corner(Side::vmax, 0) == 2);
  CHECK(side_corner(Side::vmax, 1) == 3);
  for (Side s : kAllSides) {
    CHECK(side_from_name(side_name(s)) == s);
    for (int e = 0; e < 2; ++e) {
      const Corner c = side_corner(s, e);
      const Eigen::Vector2d p = side_point(s, e);
      CHECK(p.x() == (c & 1));
      CHECK(p.y() == (c >> 1));
      CHECK(corner_on_side(c, s));
    }
  }
  CHECK(!side_from_name("top"));
}

TEST_CASE("map evaluation") {
  const auto id = affine_patch(1, 1);
  const auto p = map_eval(id, 0.3, 0.7);
  CHECK(p.x() == doctest::Approx(0.3));
  CHECK(p.y() == doctest::Approx(0.7));
  CHECK((map_jacobian(id, 0.2, 0.9) - Eigen::Matrix2d::Identity()).norm() <= 1e-14);
  const auto aff = affine_patch(2, 3);
  CHECK((map_jacobian(aff, 0.4, 0.1) - Eigen::Vector2d(2, 3).asDiagonal().toDenseMatrix()).norm() <= 1e-14);
  CHECK_THROWS_AS(map_eval(id, 1.2, 0.5), ArgumentError);

  const auto ann = quarter_annulus(1.0, 2.0, 0.0);
  for (int s = 0; s < 50; ++s) CHECK(map_eval(ann, 0.0, s / 49.0).norm() == doctest::Approx(1.0).epsilon(1e-12));
  for (int s = 0; s < 50; ++s) CHECK(map_eval(ann, 1.0, s / 49.0).norm() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK((map_eval(ann, 1.0, 1.0) - ann.control_points.back()).norm() <= 1e-14);

  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 20; ++i) {
    const double a = u(gen), b = u(gen);
    CHECK((map_jacobian(ann, a, b) - fd_jacobian(ann, a, b)).norm() <= 1e-6);
  }
}

TEST_CASE("invalid geometry maps") {
  const TensorSplineSpace s(open_uniform_knots(1, 1), open_uniform_knots(1, 1));
  CHECK_THROWS_AS(NurbsPatchMap(s, {{0, 0}, {1, 0}, {0, 1}}, {1, 1, 1}), ArgumentError);
  CHECK_THROWS_AS(NurbsPatchMap(s, {{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {1, 1, 0, 1}), ArgumentError);
}

TEST_CASE("unit square grids") {
  const auto g11 = build_unit_square_grid(1, 1);
  CHECK(g11.num_patches() == 1);
  CHECK(g11.interfaces.empty());
  CHECK(g11.boundary_sides.size() == 4);
  CHECK(build_unit_square_grid(2, 1).interfaces.size() == 1);
  const auto g22 = build_unit_square_grid(2, 2);
  CHECK(g22.interfaces.size() == 4);
  int interior = 0;
  for (const auto& v : g22.vertices)
    if (!v.on_dirichlet_boundary) {
      ++interior;
      CHECK(v.corners.size() == 4);
    }
  CHECK(interior == 1);
  check_topology(g22);
  check_topology(build_unit_square_grid(3, 2));
}

TEST_CASE("ring") {
  const auto ring = build_ring();
  CHECK(ring.num_patches() == 12);
  check_topology(ring);
  check_regular(ring);
  CHECK(max_trace_gap(ring) <= 1e-9);
  int interior = 0;
  for (const auto& v : ring.vertices)
    if (!v.on_dirichlet_boundary) {
      ++interior;
      CHECK(v.corners.size() == 4);
    }
  CHECK(interior == 8);

  // inner circumference by Gauss quadrature of the arc-length element
  double length = 0.0;
  std::vector<double> x, w;
  gauss_legendre(8, x, w);
  for (const auto& b : ring.boundary_sides) {
    const Eigen::Vector2d mid = map_eval(ring.patches[b.patch], side_point(b.side, 0.5).x(), side_point(b.side, 0.5).y());
    if (mid.norm() > 1.5) continue;
    for (std::size_t q = 0; q < x.size(); ++q) {
      const double t = 0.5 * (x[q] + 1.0);
      const Eigen::Vector2d uv = side_point(b.side, t);
      length += 0.5 * w[q] * map_jacobian(ring.patches[b.patch], uv.x(), uv.y()).col(side_direction(b.side)).norm();
    }
  }
  CHECK(length == doctest::Approx(2 * M_PI * kRingInnerRadius).epsilon(1e-10));

  for (int p = 1; p <= 4; ++p)
    for (int r = 0; r <= 3; ++r) CHECK(validate_matching(ring, analysis_spaces(ring, p, r)).ok);
}

TEST_CASE("yeti footprint") {
  const auto yeti = build_yeti();
  CHECK(yeti.num_patches() == 84);
  check_topology(yeti);
  check_regular(yeti);
  CHECK(max_trace_gap(yeti) <= 1e-9);
  CHECK(validate_matching(yeti, analysis_spaces(yeti, 2, 1)).ok);
  std::size_t max_valence = 0;
  int interior = 0;
  for (const auto& v : yeti.vertices) {
    max_valence = std::max(max_valence, v.corners.size());
    if (!v.on_dirichlet_boundary) ++interior;
  }
  CHECK(max_valence <= 4);
  CHECK(interior > 0);
  CHECK(yeti.boundary_sides.size() > 0);
}

TEST_CASE("matching validation") {
  const auto grid = build_unit_square_grid(2, 1);
  CHECK(validate_matching(grid, analysis_spaces(grid, 2, 1)).ok);
  auto spaces = analysis_spaces(grid, 2, 1);
  spaces[1] = TensorSplineSpace(uniform_refine(spaces[1].kv_u()), uniform_refine(spaces[1].kv_v()));
  const auto report = validate_matching(grid, spaces);
  CHECK(!report.ok);
  CHECK(report.interface == 0);

  // a reversed interface matches once the orientation flag is honoured
  std::vector<NurbsPatchMap> patches{
      bilinear_patch({Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1)}),
      bilinear_patch({Eigen::Vector2d(1, 1), Eigen::Vector2d(2, 1), Eigen::Vector2d(1, 0), Eigen::Vector2d(2, 0)})};
  const auto rev = make_domain(patches, {{0, Side::umax, 1, Side::umin, true}},
                               {{0, Side::umin}, {0, Side::vmin}, {0, Side::vmax}, {1, Side::umax}, {1, Side::vmin},
                                {1, Side::vmax}});
  CHECK(validate_matching(rev, analysis_spaces(rev, 2, 2)).ok);
  const auto wrong = make_domain(patches, {{0, Side::umax, 1, Side::umin, false}},
                                 {{0, Side::umin}, {0, Side::vmin}, {0, Side::vmax}, {1, Side::umax}, {1, Side::vmin},
                                  {1, Side::vmax}});
  CHECK(!validate_matching(wrong, analysis_spaces(wrong, 2, 2)).ok);
}

TEST_CASE("topology errors") {
  std::vector<NurbsPatchMap> one{affine_patch(1, 1)};
  CHECK_THROWS_AS(make_domain(one, {}, {{0, Side::umin}}), TopologyError);
  CHECK_THROWS_AS(make_domain(one, {}, {{0, Side::umin}, {0, Side::umax}, {0, Side::vmin}, {0, Side::vmax},
                                        {0, Side::vmax}}),
                  TopologyError);
  CHECK_THROWS_AS(make_domain(one, {{0, Side::umin, 0, Side::umax, false}}, {{0, Side::vmin}, {0, Side::vmax}}),
                  TopologyError);
  CHECK_THROWS_AS(make_domain(one, {{0, Side::umax, 3, Side::umin, false}}, {}), TopologyError);
}

TEST_CASE("domain file round trip") {
  const std::string square =
      "patch 0 degree 1 1 knots_u 0 0 1 1 knots_v 0 0 1 1 weights 1 1 1 1 points 0 0 1 0 0 1 1 1\n"
      "dirichlet 0 umin\n"
      "dirichlet 0 umax\n"
      "dirichlet 0 vmin\n"
      "dirichlet 0 vmax\n";
  CHECK(serialize_domain(parse_domain(square)) == square);

  const auto ring = build_ring();
  const auto text = serialize_domain(ring);
  const auto back = parse_domain(text);
  CHECK(serialize_domain(back) == text);
  REQUIRE(back.num_patches() == ring.num_patches());
  for (int k = 0; k < ring.num_patches(); ++k) {
    CHECK(back.patches[k].weights == ring.patches[k].weights);
    for (std::size_t i = 0; i < ring.patches[k].control_points.size(); ++i)
      CHECK(back.patches[k].control_points[i] == ring.patches[k].control_points[i]);
  }
  CHECK(back.interfaces.size() == ring.interfaces.size());
  CHECK(parse_domain(serialize_domain(build_yeti())).num_patches() == 84);

  const std::string with_comments = "# a comment\n\n" + square.substr(0, square.find('\n')) + "  # trailing\n" +
                                    square.substr(square.find('\n') + 1);
  CHECK(serialize_domain(parse_domain(with_comments)) == square);
}

TEST_CASE("domain file errors carry positions") {
  auto error_of = [](const std::string& text) -> std::optional<ParseError> {
    try {
      parse_domain(text);
    } catch (const ParseError& e) {
      return e;
    }
    return std::nullopt;
  };
  const std::string good = "patch 0 degree 1 1 knots_u 0 0 1 1 knots_v 0 0 1 1 weights 1 1 1 1 points 0 0 1 0 0 1 1 1\n";

  auto e = error_of("patch 0 degree 1 1 knots_u 0 0 1 1 knots_v 0 0 1 1 weights 1 1 1 1 points 0 0 1 0 0 1 1 x\n");
  REQUIRE(e);
  CHECK(e->line() == 1);
  CHECK(e->column() == 89);

  e = error_of(good + "interface 0 umax 7 umin normal\n");
  REQUIRE(e);
  CHECK(e->line() == 2);
  CHECK(e->column() == 18);
  CHECK(std::string(e->what()).find("7") != std::string::npos);

  e = error_of("patch 0 degree 1 1 knots_u 0 0 1 1 knots_v 0 0 1 1 weights 1 1 1 points 0 0 1 0 0 1 1 1\n");
  REQUIRE(e);
  CHECK(e->line() == 1);

  e = error_of(good + "dirichlet 0 top\n");
  REQUIRE(e);
  CHECK(e->line() == 2);
  CHECK(e->column() == 13);

  e = error_of(good + "frobnicate 1\n");
  REQUIRE(e);
  CHECK(e->column() == 1);

  e = error_of(good + "interface 0 umax 0 umin sideways\n");
  REQUIRE(e);
  CHECK(e->line() == 2);
}

}
