#ifndef IETIDP_TESTS_HELPERS_HPP
#define IETIDP_TESTS_HELPERS_HPP

#include <Eigen/Dense>

#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "ietidp/ietidp.hpp"

namespace testing {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Vec random_vector(int n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

inline Mat dense_operator(const std::function<Vec(const Vec&)>& op, int n) {
  Mat M(n, n);
  for (int j = 0; j < n; ++j) M.col(j) = op(Vec::Unit(n, j));
  return M;
}

/// Tensor indices along a side in traversal order, written out from the
/// lexicographic numbering (u fastest).
inline std::vector<int> side_indices(const ietidp::TensorSplineSpace& s, ietidp::Side side) {
  std::vector<int> out;
  const int nu = s.n_u(), nv = s.n_v();
  switch (side) {
    case ietidp::Side::umin: for (int j = 0; j < nv; ++j) out.push_back(j * nu); break;
    case ietidp::Side::umax: for (int j = 0; j < nv; ++j) out.push_back(j * nu + nu - 1); break;
    case ietidp::Side::vmin: for (int i = 0; i < nu; ++i) out.push_back(i); break;
    case ietidp::Side::vmax: for (int i = 0; i < nu; ++i) out.push_back((nv - 1) * nu + i); break;
  }
  return out;
}

/// Random conforming function, sampled on the skeleton of every patch:
/// coefficients glued across interfaces by union-find on (patch, tensor index).
inline Vec continuous_skeleton_vector(const ietidp::MultiPatchDomain& domain, const ietidp::IetiDpSystem& sys,
                                      std::mt19937_64& gen) {
  const auto& discs = sys.discretizations();
  std::vector<int> offset(discs.size() + 1, 0);
  for (std::size_t k = 0; k < discs.size(); ++k) offset[k + 1] = offset[k] + discs[k].space.size();
  std::vector<int> parent(offset.back());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& f : domain.interfaces) {
    auto a = side_indices(discs[f.patch_a].space, f.side_a);
    auto b = side_indices(discs[f.patch_b].space, f.side_b);
    if (f.reversed) std::reverse(b.begin(), b.end());
    for (std::size_t t = 0; t < a.size(); ++t)
      parent[find(offset[f.patch_a] + a[t])] = find(offset[f.patch_b] + b[t]);
  }
  const Vec values = random_vector(offset.back(), gen);
  Vec w(sys.skeleton().size());
  for (std::size_t k = 0; k < discs.size(); ++k)
    for (int t = 0; t < discs[k].space.size(); ++t) {
      const int s = discs[k].skeleton_index(t);
      if (s >= 0) w[sys.skeleton().offsets[k] + s] = values[find(offset[k] + t)];
    }
  return w;
}

}  // namespace testing

#endif  // IETIDP_TESTS_HELPERS_HPP
