#include "doctest.h"

#include <cmath>
#include <numeric>

#include "ietidp/assembly.hpp"
#include "ietidp/linalg.hpp"

using namespace ietidp;

namespace {

const std::array<bool, 4> kAll{true, true, true, true};

NurbsPatchMap rectangle(double sx, double sy) {
  return bilinear_patch({Eigen::Vector2d(0, 0), Eigen::Vector2d(sx, 0), Eigen::Vector2d(0, sy), Eigen::Vector2d(sx, sy)});
}

TensorSplineSpace space(int p, int elements) {
  return TensorSplineSpace(open_uniform_knots(p, elements), open_uniform_knots(p, elements));
}

// Full tensor-ordered stiffness of a patch without Dirichlet sides.
Eigen::MatrixXd tensor_stiffness(const PatchDiscretization& disc, const PatchSystem& sys) {
  const Eigen::MatrixXd local = Eigen::MatrixXd(sys.A);
  Eigen::MatrixXd out(disc.space.size(), disc.space.size());
  for (int a = 0; a < disc.size(); ++a)
    for (int b = 0; b < disc.size(); ++b) out(disc.kept[a], disc.kept[b]) = local(a, b);
  return out;
}

// 1D stiffness and mass matrices by an independent Gauss rule of q points.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> matrices_1d(const KnotVector& kv, int q) {
  std::vector<double> x, w;
  gauss_legendre(q, x, w);
  const int n = kv.size();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n), M = K;
  const auto& z = kv.breakpoints();
  for (std::size_t s = 0; s + 1 < z.size(); ++s)
    for (int g = 0; g < q; ++g) {
      const double h = z[s + 1] - z[s];
      const double t = z[s] + 0.5 * h * (x[g] + 1.0);
      const auto d = eval_basis_derivs(kv, t, 1);
      for (int a = 0; a < d.table.cols(); ++a)
        for (int b = 0; b < d.table.cols(); ++b) {
          K(d.first_active + a, d.first_active + b) += 0.5 * h * w[g] * d.table(1, a) * d.table(1, b);
          M(d.first_active + a, d.first_active + b) += 0.5 * h * w[g] * d.table(0, a) * d.table(0, b);
        }
    }
  return {K, M};
}

// Galerkin solution on a single all-Dirichlet patch, tensor coefficients.
Eigen::VectorXd dirichlet_solve(const TensorSplineSpace& s, const NurbsPatchMap& G, const RhsFunction& f) {
  const auto disc = classify_dofs(s, kAll);
  const auto sys = assemble_patch(disc, G, f);
  const Eigen::VectorXd uI = factor_spd(sys.A_II).solve(Eigen::VectorXd(sys.f_I));
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(s.size());
  for (int a = 0; a < disc.n_interior; ++a) coef[disc.kept[a]] = uI[a];
  return coef;
}

double manufactured_rhs(const Eigen::Vector2d& x) {
  return 2 * M_PI * M_PI * std::sin(M_PI * x.x()) * std::sin(M_PI * x.y());
}
double manufactured_u(const Eigen::Vector2d& x) { return std::sin(M_PI * x.x()) * std::sin(M_PI * x.y()); }

}  // namespace

TEST_SUITE("assembly") {

TEST_CASE("dof classification") {
  const auto bubble = classify_dofs(space(2, 1), kAll);
  CHECK(bubble.size() == 1);
  CHECK(bubble.n_interior == 1);
  CHECK(bubble.n_skeleton == 0);
  CHECK(bubble.kept[0] == 4);

  const auto free = classify_dofs(space(1, 2), {});
  CHECK(free.size() == 9);
  CHECK(free.n_interior == 1);
  CHECK(free.n_skeleton == 8);

  const auto s = space(2, 4);
  const auto one = classify_dofs(s, {true, false, false, false});
  CHECK(one.size() == 30);
  // enumeration oracle over tensor indices
  int interior = 0, skeleton = 0;
  for (int j = 0; j < s.n_v(); ++j)
    for (int i = 0; i < s.n_u(); ++i) {
      const int t = s.index(i, j);
      if (i == 0) {
        CHECK(one.tensor_to_local[t] == -1);
        continue;
      }
      const bool on_skeleton = i == s.n_u() - 1 || j == 0 || j == s.n_v() - 1;
      if (on_skeleton) {
        ++skeleton;
        CHECK(one.skeleton_index(t) >= 0);
      } else {
        ++interior;
        CHECK(one.tensor_to_local[t] < one.n_interior);
      }
    }
  CHECK(one.n_interior == interior);
  CHECK(one.n_skeleton == skeleton);
  // interior block first, each block lexicographic
  for (int a = 1; a < one.n_interior; ++a) CHECK(one.kept[a - 1] < one.kept[a]);
  for (int a = one.n_interior + 1; a < one.size(); ++a) CHECK(one.kept[a - 1] < one.kept[a]);

  const auto corner = classify_dofs(space(1, 2), {}, {true, false, false, false});
  CHECK(corner.size() == 8);
  CHECK(corner.tensor_to_local[0] == -1);
}

TEST_CASE("gauss rules") {
  auto r1 = gauss_rule(1, open_uniform_knots(1, 1));
  CHECK(r1.nodes[0] == doctest::Approx(0.5));
  CHECK(r1.weights[0] == doctest::Approx(1.0));
  auto r2 = gauss_rule(2, open_uniform_knots(1, 1));
  CHECK(r2.nodes[0] == doctest::Approx(0.5 - 1 / (2 * std::sqrt(3.0))));
  CHECK(r2.nodes[1] == doctest::Approx(0.5 + 1 / (2 * std::sqrt(3.0))));
  double cubic = 0.0;
  for (std::size_t i = 0; i < r2.nodes.size(); ++i) cubic += r2.weights[i] * std::pow(r2.nodes[i], 3);
  CHECK(std::abs(cubic - 0.25) <= 1e-14);

  for (int q = 1; q <= 10; ++q) {
    const auto rule = gauss_rule(q, open_uniform_knots(2, 3));
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      CHECK(rule.weights[i] > 0.0);
      sum += rule.weights[i] * std::pow(rule.nodes[i], 2 * q - 1);
    }
    CHECK(sum == doctest::Approx(1.0 / (2 * q)).epsilon(1e-13));
  }
}

TEST_CASE("bilinear element matrix") {
  const auto disc = classify_dofs(space(1, 1), {});
  const auto A = tensor_stiffness(disc, assemble_stiffness(disc, rectangle(1, 1)));
  for (int i = 0; i < 4; ++i) {
    CHECK(A(i, i) == doctest::Approx(2.0 / 3.0));
    CHECK(A(i, 3 - i) == doctest::Approx(-1.0 / 3.0));
  }
  CHECK(A(0, 1) == doctest::Approx(-1.0 / 6.0));
  CHECK(A(0, 2) == doctest::Approx(-1.0 / 6.0));
}

TEST_CASE("anisotropic affine map against a tensor oracle") {
  const auto s = space(2, 3);
  const auto disc = classify_dofs(s, {});
  const auto A = tensor_stiffness(disc, assemble_stiffness(disc, rectangle(2, 1)));
  const auto [K, M] = matrices_1d(s.kv_u(), 5);
  // x = (2u, v): integrand (u_x^2/4 + u_y^2) * det, det = 2
  Eigen::MatrixXd ref(s.size(), s.size());
  for (int a = 0; a < s.size(); ++a)
    for (int b = 0; b < s.size(); ++b) {
      const auto [ia, ja] = s.split(a);
      const auto [ib, jb] = s.split(b);
      ref(a, b) = 0.5 * K(ia, ib) * M(ja, jb) + 2.0 * M(ia, ib) * K(ja, jb);
    }
  CHECK((A - ref).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("stiffness symmetry, kernel and blocks") {
  const auto ring = build_ring();
  for (int k : {0, 5, 11}) {
    const auto s = analysis_space(ring.patches[k], 3, 2);
    const auto disc = classify_dofs(s, {});
    const auto sys = assemble_stiffness(disc, ring.patches[k]);
    const Eigen::MatrixXd A(sys.A);
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * A.cwiseAbs().maxCoeff());
    CHECK((A * Eigen::VectorXd::Ones(A.rows())).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((Eigen::MatrixXd(sys.A_IG) - Eigen::MatrixXd(sys.A_GI).transpose()).norm() <= 1e-12 * A.norm());
    CHECK(sys.A_II.rows() == disc.n_interior);
    CHECK(sys.A_GG.rows() == disc.n_skeleton);
    CHECK_NOTHROW(factor_spd(sys.A_II));
  }
}

TEST_CASE("load vectors") {
  const auto disc = classify_dofs(space(1, 1), {});
  const auto zero = assemble_patch(disc, rectangle(1, 1), [](const Eigen::Vector2d&) { return 0.0; });
  CHECK(zero.f.norm() == 0.0);
  const auto one = assemble_patch(disc, rectangle(1, 1), [](const Eigen::Vector2d&) { return 1.0; });
  for (int i = 0; i < 4; ++i) CHECK(one.f[i] == doctest::Approx(0.25));
  CHECK(one.f_I.size() + one.f_G.size() == 4);
}

TEST_CASE("degenerate geometry is rejected") {
  const auto flipped = bilinear_patch({Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)});
  const auto disc = classify_dofs(space(1, 1), {});
  CHECK_THROWS_AS(assemble_stiffness(disc, flipped, std::nullopt, 3), GeometryError);
  try {
    assemble_stiffness(disc, flipped, std::nullopt, 3);
  } catch (const GeometryError& e) {
    CHECK(std::string(e.what()).find("patch 3") != std::string::npos);
  }
}

TEST_CASE("manufactured solution") {
  const auto G = rectangle(1, 1);
  const auto s = TensorSplineSpace(open_uniform_knots(3, 16), open_uniform_knots(3, 16));
  CHECK(l2_error(s, G, dirichlet_solve(s, G, manufactured_rhs), manufactured_u, 6) <= 1e-6);
}

TEST_CASE("convergence order") {
  const auto G = rectangle(1, 1);
  for (int p = 1; p <= 3; ++p) {
    std::vector<double> logh, loge;
    for (int r = 2; r <= 5; ++r) {
      const auto s = TensorSplineSpace(open_uniform_knots(p, 1 << r), open_uniform_knots(p, 1 << r));
      const double e = l2_error(s, G, dirichlet_solve(s, G, manufactured_rhs), manufactured_u, p + 3);
      logh.push_back(std::log(std::ldexp(1.0, -r)));
      loge.push_back(std::log(e));
    }
    const double mh = std::accumulate(logh.begin(), logh.end(), 0.0) / logh.size();
    const double me = std::accumulate(loge.begin(), loge.end(), 0.0) / loge.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < logh.size(); ++i) {
      num += (logh[i] - mh) * (loge[i] - me);
      den += (logh[i] - mh) * (logh[i] - mh);
    }
    CAPTURE(p);
    CHECK(num / den >= p + 0.8);
  }
}

}
