#include "ietidp/assembly.hpp"

#include <cmath>
#include <sstream>

namespace ietidp {

int PatchDiscretization::skeleton_index(int tensor_index) const {
  const int local = tensor_to_local[tensor_index];
  return local < n_interior ? -1 : local - n_interior;
}

std::vector<int> PatchDiscretization::side_tensor_indices(Side s) const {
  const int nu = space.n_u(), nv = space.n_v();
  std::vector<int> out;
  switch (s) {
    case Side::umin:
      for (int j = 0; j < nv; ++j) out.push_back(space.index(0, j));
      break;
    case Side::umax:
      for (int j = 0; j < nv; ++j) out.push_back(space.index(nu - 1, j));
      break;
    case Side::vmin:
      for (int i = 0; i < nu; ++i) out.push_back(space.index(i, 0));
      break;
    case Side::vmax:
      for (int i = 0; i < nu; ++i) out.push_back(space.index(i, nv - 1));
      break;
  }
  return out;
}

int PatchDiscretization::corner_tensor_index(Corner c) const {
  const int i = (c & 1) ? space.n_u() - 1 : 0;
  const int j = (c & 2) ? space.n_v() - 1 : 0;
  return space.index(i, j);
}

PatchDiscretization classify_dofs(const TensorSplineSpace& space, const std::array<bool, 4>& dirichlet_sides,
                                  const std::array<bool, 4>& dirichlet_corners) {
  PatchDiscretization d{space, dirichlet_sides, dirichlet_corners, {}, {}, 0, 0};
  const int nu = space.n_u(), nv = space.n_v();
  std::vector<int> interior, skeleton;
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      const bool on[4] = {i == 0, i == nu - 1, j == 0, j == nv - 1};
      bool dropped = false;
      for (int s = 0; s < 4; ++s) dropped = dropped || (on[s] && dirichlet_sides[s]);
      for (Corner c = 0; c < 4; ++c) {
        const bool at_corner = on[(c & 1) ? 1 : 0] && on[(c & 2) ? 3 : 2];
        dropped = dropped || (at_corner && dirichlet_corners[c]);
      }
      if (dropped) continue;
      (on[0] || on[1] || on[2] || on[3] ? skeleton : interior).push_back(space.index(i, j));
    }
  }
  d.n_interior = static_cast<int>(interior.size());
  d.n_skeleton = static_cast<int>(skeleton.size());
  d.kept = std::move(interior);
  d.kept.insert(d.kept.end(), skeleton.begin(), skeleton.end());
  d.tensor_to_local.assign(space.size(), -1);
  for (int l = 0; l < d.size(); ++l) d.tensor_to_local[d.kept[l]] = l;
  return d;
}

void gauss_legendre(int q, std::vector<double>& nodes, std::vector<double>& weights) {
  if (q < 1) throw ArgumentError("gauss_legendre: need at least one point");
  const double pi = std::acos(-1.0);
  nodes.assign(q, 0.0);
  weights.assign(q, 0.0);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (q == 1) p0 = 1.0;
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= q; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = q * (x * p1 - p0) / (x * x - 1.0);
    nodes[i] = -x;
    nodes[q - 1 - i] = x;
    weights[i] = weights[q - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (q % 2 == 1) nodes[q / 2] = 0.0;
}

QuadratureRule gauss_rule(int q, const KnotVector& kv) {
  std::vector<double> ref_nodes, ref_weights;
  gauss_legendre(q, ref_nodes, ref_weights);
  QuadratureRule rule;
  rule.points_per_span = q;
  const auto& z = kv.breakpoints();
  for (std::size_t s = 0; s + 1 < z.size(); ++s) {
    const double a = z[s], b = z[s + 1];
    for (int i = 0; i < q; ++i) {
      rule.nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * ref_nodes[i]);
      rule.weights.push_back(0.5 * (b - a) * ref_weights[i]);
    }
  }
  return rule;
}

namespace {

// Basis values and first derivatives at every quadrature node of one direction.
struct DirectionTable {
  QuadratureRule rule;
  std::vector<BasisDerivatives<double>> basis;
};

DirectionTable tabulate(const KnotVector& kv, int q) {
  DirectionTable t{gauss_rule(q, kv), {}};
  t.basis.reserve(t.rule.nodes.size());
  for (double x : t.rule.nodes) t.basis.push_back(eval_basis_derivs(kv, x, 1));
  return t;
}

[[noreturn]] void degenerate(int patch_id, double u, double v, double det) {
  std::ostringstream os;
  os << "nonpositive Jacobian determinant " << det << " on patch " << patch_id << " at (u,v) = (" << u << ", "
     << v << ")";
  throw GeometryError(os.str());
}

template <typename Visit>
void for_each_quadrature_point(const PatchDiscretization& disc, const NurbsPatchMap& G, int q, int patch_id,
                               Visit&& visit) {
  const auto tu = tabulate(disc.space.kv_u(), q);
  const auto tv = tabulate(disc.space.kv_v(), q);
  const int pu = disc.space.kv_u().degree(), pv = disc.space.kv_v().degree();
  const int nloc = (pu + 1) * (pv + 1);
  const int spans_u = disc.space.kv_u().num_spans(), spans_v = disc.space.kv_v().num_spans();

  std::vector<int> dofs(nloc);
  Eigen::VectorXd values(nloc);
  Eigen::Matrix<double, 2, Eigen::Dynamic> grads(2, nloc);
  for (int ev = 0; ev < spans_v; ++ev) {
    for (int eu = 0; eu < spans_u; ++eu) {
      const auto& bu0 = tu.basis[eu * q];
      const auto& bv0 = tv.basis[ev * q];
      for (int b = 0; b <= pv; ++b)
        for (int a = 0; a <= pu; ++a)
          dofs[b * (pu + 1) + a] = disc.space.index(bu0.first_active + a, bv0.first_active + b);

      for (int jv = 0; jv < q; ++jv) {
        for (int ju = 0; ju < q; ++ju) {
          const int iu = eu * q + ju, iv = ev * q + jv;
          const double u = tu.rule.nodes[iu], v = tv.rule.nodes[iv];
          const auto geo = map_eval_with_jacobian(G, u, v);
          const double det = geo.jacobian.determinant();
          if (!(det > 0.0)) degenerate(patch_id, u, v, det);
          const Eigen::Matrix2d inv_t = geo.jacobian.inverse().transpose();
          const auto& bu = tu.basis[iu].table;
          const auto& bv = tv.basis[iv].table;
          for (int b = 0; b <= pv; ++b) {
            for (int a = 0; a <= pu; ++a) {
              const int l = b * (pu + 1) + a;
              values[l] = bu(0, a) * bv(0, b);
              grads.col(l) = inv_t * Eigen::Vector2d(bu(1, a) * bv(0, b), bu(0, a) * bv(1, b));
            }
          }
          visit(dofs, values, grads, geo.point, tu.rule.weights[iu] * tv.rule.weights[iv] * det);
        }
      }
    }
  }
}

void split_blocks(PatchSystem& s, int n_interior) {
  const int n = static_cast<int>(s.A.rows());
  const int nG = n - n_interior;
  s.A_II = s.A.topLeftCorner(n_interior, n_interior);
  s.A_IG = s.A.topRightCorner(n_interior, nG);
  s.A_GI = s.A.bottomLeftCorner(nG, n_interior);
  s.A_GG = s.A.bottomRightCorner(nG, nG);
}

}  // namespace

PatchSystem assemble_stiffness(const PatchDiscretization& disc, const NurbsPatchMap& G, std::optional<int> q,
                               int patch_id) {
  const int qq = q.value_or(std::max(disc.space.kv_u().degree(), disc.space.kv_v().degree()) + 1);
  const int n = disc.size();
  // Dense element contributions are accumulated per element, then scattered once.
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::MatrixXd elem;
  std::vector<int> current;
  auto flush = [&]() {
    for (std::size_t a = 0; a < current.size(); ++a) {
      const int ra = disc.tensor_to_local[current[a]];
      if (ra < 0) continue;
      for (std::size_t b = 0; b < current.size(); ++b) {
        const int rb = disc.tensor_to_local[current[b]];
        if (rb >= 0) triplets.emplace_back(ra, rb, elem(a, b));
      }
    }
  };
  for_each_quadrature_point(disc, G, qq, patch_id,
                            [&](const std::vector<int>& dofs, const Eigen::VectorXd&,
                                const Eigen::Matrix<double, 2, Eigen::Dynamic>& grads, const Eigen::Vector2d&,
                                double w) {
                              if (dofs != current) {
                                if (!current.empty()) flush();
                                current = dofs;
                                elem.setZero(dofs.size(), dofs.size());
                              }
                              elem.noalias() += w * grads.transpose() * grads;
                            });
  if (!current.empty()) flush();

  PatchSystem s;
  s.A.resize(n, n);
  s.A.setFromTriplets(triplets.begin(), triplets.end());
  s.A.makeCompressed();
  split_blocks(s, disc.n_interior);
  s.f = Eigen::VectorXd::Zero(n);
  s.f_I = Eigen::VectorXd::Zero(disc.n_interior);
  s.f_G = Eigen::VectorXd::Zero(disc.n_skeleton);
  return s;
}

void assemble_load(PatchSystem& system, const PatchDiscretization& disc, const NurbsPatchMap& G,
                   const RhsFunction& f, std::optional<int> q, int patch_id) {
  const int qq = q.value_or(std::max(disc.space.kv_u().degree(), disc.space.kv_v().degree()) + 1);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(disc.size());
  for_each_quadrature_point(disc, G, qq, patch_id,
                            [&](const std::vector<int>& dofs, const Eigen::VectorXd& values,
                                const Eigen::Matrix<double, 2, Eigen::Dynamic>&, const Eigen::Vector2d& x,
                                double w) {
                              const double fx = f(x) * w;
                              for (std::size_t a = 0; a < dofs.size(); ++a) {
                                const int r = disc.tensor_to_local[dofs[a]];
                                if (r >= 0) load[r] += fx * values[a];
                              }
                            });
  system.f = load;
  system.f_I = load.head(disc.n_interior);
  system.f_G = load.tail(disc.n_skeleton);
}

PatchSystem assemble_patch(const PatchDiscretization& disc, const NurbsPatchMap& G, const RhsFunction& f,
                           std::optional<int> q, int patch_id) {
  auto s = assemble_stiffness(disc, G, q, patch_id);
  assemble_load(s, disc, G, f, q, patch_id);
  return s;
}

std::vector<PatchDiscretization> classify_domain(const MultiPatchDomain& domain,
                                                 const std::vector<TensorSplineSpace>& spaces) {
  std::vector<PatchDiscretization> out;
  out.reserve(spaces.size());
  for (int k = 0; k < domain.num_patches(); ++k) {
    std::array<bool, 4> sides{}, corners{};
    for (Side s : kAllSides) sides[static_cast<int>(s)] = domain.is_dirichlet(k, s);
    for (Corner c = 0; c < 4; ++c) corners[c] = domain.vertices[domain.vertex_of(k, c)].on_dirichlet_boundary;
    out.push_back(classify_dofs(spaces[k], sides, corners));
  }
  return out;
}

double l2_error(const TensorSplineSpace& space, const NurbsPatchMap& G, const Eigen::VectorXd& coefficients,
                const RhsFunction& exact, int q) {
  auto disc = classify_dofs(space, {});
  double sum = 0.0;
  for_each_quadrature_point(disc, G, q, -1,
                            [&](const std::vector<int>& dofs, const Eigen::VectorXd& values,
                                const Eigen::Matrix<double, 2, Eigen::Dynamic>&, const Eigen::Vector2d& x,
                                double w) {
                              double uh = 0.0;
                              for (std::size_t a = 0; a < dofs.size(); ++a) uh += coefficients[dofs[a]] * values[a];
                              const double e = uh - exact(x);
                              sum += w * e * e;
                            });
  return std::sqrt(sum);
}

}  // namespace ietidp
