#ifndef IETIDP_SPLINES_HPP
#define IETIDP_SPLINES_HPP

// Univariate B-splines on p-open knot vectors over [0,1] and tensor-product
// spline space bookkeeping. Everything here is templated on the scalar type;
// the rest of the library uses the double instantiations below.

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ietidp/errors.hpp"

namespace ietidp {

/// A p-open knot vector on [0,1] together with its breakpoints and multiplicities.
///
/// The first and last breakpoints carry multiplicity p+1, interior ones at most p.
/// The number of B-spline basis functions is n = #knots - p - 1.
template <typename Scalar>
class BasicKnotVector {
 public:
  BasicKnotVector(int degree, std::vector<Scalar> knots) : degree_(degree), knots_(std::move(knots)) {
    if (degree_ < 1) throw ArgumentError("knot vector: degree must be >= 1");
    if (knots_.size() < static_cast<std::size_t>(2 * degree_ + 2))
      throw ArgumentError("knot vector: need at least 2p+2 knots");
    if (!std::is_sorted(knots_.begin(), knots_.end()))
      throw ArgumentError("knot vector: knots must be nondecreasing");
    if (knots_.front() != Scalar(0) || knots_.back() != Scalar(1))
      throw ArgumentError("knot vector: knots must span [0,1]");
    for (std::size_t i = 0; i < knots_.size();) {
      std::size_t j = i;
      while (j < knots_.size() && knots_[j] == knots_[i]) ++j;
      breakpoints_.push_back(knots_[i]);
      multiplicities_.push_back(static_cast<int>(j - i));
      i = j;
    }
    if (multiplicities_.front() != degree_ + 1 || multiplicities_.back() != degree_ + 1)
      throw ArgumentError("knot vector: end knots must have multiplicity p+1");
    for (std::size_t i = 1; i + 1 < multiplicities_.size(); ++i)
      if (multiplicities_[i] > degree_)
        throw ArgumentError("knot vector: interior multiplicity exceeds p");
  }

  int degree() const { return degree_; }
  const std::vector<Scalar>& knots() const { return knots_; }
  const std::vector<Scalar>& breakpoints() const { return breakpoints_; }
  const std::vector<int>& multiplicities() const { return multiplicities_; }

  /// Number of basis functions n.
  int size() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  /// Number of breakpoint intervals (knot spans of positive length).
  int num_spans() const { return static_cast<int>(breakpoints_.size()) - 1; }

  Scalar max_span_length() const {
    Scalar h(0);
    for (int i = 0; i < num_spans(); ++i) h = std::max(h, breakpoints_[i + 1] - breakpoints_[i]);
    return h;
  }
  Scalar min_span_length() const {
    Scalar h(1);
    for (int i = 0; i < num_spans(); ++i) h = std::min(h, breakpoints_[i + 1] - breakpoints_[i]);
    return h;
  }

  /// Knot index mu with knots[mu] <= t < knots[mu+1]; the last nonempty span is closed.
  int find_knot_span(Scalar t) const {
    check_parameter(t);
    const int n = size();
    if (t >= knots_[n]) return n - 1;
    auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n + 1, t);
    return static_cast<int>(it - knots_.begin()) - 1;
  }

  void check_parameter(Scalar t) const {
    if (!(t >= Scalar(0) && t <= Scalar(1)))
      throw ArgumentError("spline parameter outside [0,1]");
  }

  friend bool operator==(const BasicKnotVector& a, const BasicKnotVector& b) {
    return a.degree_ == b.degree_ && a.knots_ == b.knots_;
  }

 private:
  int degree_;
  std::vector<Scalar> knots_;
  std::vector<Scalar> breakpoints_;
  std::vector<int> multiplicities_;
};

/// Values of the p+1 basis functions that may be nonzero at a parameter.
template <typename Scalar>
struct BasisValues {
  int first_active = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
};

/// Row k holds the k-th derivatives of the active basis functions.
template <typename Scalar>
struct BasisDerivatives {
  int first_active = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> table;
};

/// p-open knot vector with `elements` equal spans and single interior knots.
template <typename Scalar = double>
BasicKnotVector<Scalar> open_uniform_knots(int degree, int elements) {
  if (degree < 1) throw ArgumentError("open_uniform_knots: degree must be >= 1");
  if (elements < 1) throw ArgumentError("open_uniform_knots: need at least one element");
  std::vector<Scalar> knots(degree + 1, Scalar(0));
  for (int i = 1; i < elements; ++i) knots.push_back(Scalar(i) / Scalar(elements));
  knots.insert(knots.end(), degree + 1, Scalar(1));
  return BasicKnotVector<Scalar>(degree, std::move(knots));
}

/// Maximum-smoothness knot vector of the given degree over a breakpoint sequence.
template <typename Scalar>
BasicKnotVector<Scalar> knots_from_breakpoints(int degree, const std::vector<Scalar>& breakpoints) {
  if (breakpoints.size() < 2) throw ArgumentError("knots_from_breakpoints: need two breakpoints");
  std::vector<Scalar> knots(degree + 1, breakpoints.front());
  for (std::size_t i = 1; i + 1 < breakpoints.size(); ++i) knots.push_back(breakpoints[i]);
  knots.insert(knots.end(), degree + 1, breakpoints.back());
  return BasicKnotVector<Scalar>(degree, std::move(knots));
}

/// Splits every nonempty knot span at its midpoint with one new single knot.
template <typename Scalar>
BasicKnotVector<Scalar> uniform_refine(const BasicKnotVector<Scalar>& kv) {
  const auto& z = kv.breakpoints();
  const auto& m = kv.multiplicities();
  std::vector<Scalar> knots;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i > 0) knots.push_back((z[i - 1] + z[i]) / Scalar(2));
    knots.insert(knots.end(), m[i], z[i]);
  }
  return BasicKnotVector<Scalar>(kv.degree(), std::move(knots));
}

/// Index of the breakpoint interval containing t (0-based; the last interval is closed).
template <typename Scalar>
int active_span(const BasicKnotVector<Scalar>& kv, Scalar t) {
  kv.check_parameter(t);
  const auto& z = kv.breakpoints();
  if (t >= z.back()) return kv.num_spans() - 1;
  auto it = std::upper_bound(z.begin(), z.end(), t);
  return static_cast<int>(it - z.begin()) - 1;
}

/// Cox-de Boor derivatives of all active basis functions up to `order`.
template <typename Scalar>
BasisDerivatives<Scalar> eval_basis_derivs(const BasicKnotVector<Scalar>& kv, Scalar t, int order) {
  const int p = kv.degree();
  if (order < 0 || order > p)
    throw ArgumentError("eval_basis_derivs: derivative order must lie in [0, p]");
  const int span = kv.find_knot_span(t);
  const auto& U = kv.knots();

  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat ndu(p + 1, p + 1);
  std::vector<Scalar> left(p + 1), right(p + 1);
  ndu(0, 0) = Scalar(1);
  for (int j = 1; j <= p; ++j) {
    left[j] = t - U[span + 1 - j];
    right[j] = U[span + j] - t;
    Scalar saved(0);
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const Scalar temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu(j, j) = saved;
  }

  BasisDerivatives<Scalar> out;
  out.first_active = span - p;
  out.table = Mat::Zero(order + 1, p + 1);
  for (int j = 0; j <= p; ++j) out.table(0, j) = ndu(j, p);

  Mat a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = Scalar(1);
    for (int k = 1; k <= order; ++k) {
      Scalar d(0);
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      out.table(k, r) = d;
      std::swap(s1, s2);
    }
  }
  Scalar factor(p);
  for (int k = 1; k <= order; ++k) {
    out.table.row(k) *= factor;
    factor *= Scalar(p - k);
  }
  return out;
}

/// Values of the active basis functions at t (Cox-de Boor).
template <typename Scalar>
BasisValues<Scalar> eval_basis(const BasicKnotVector<Scalar>& kv, Scalar t) {
  auto d = eval_basis_derivs(kv, t, 0);
  return {d.first_active, d.table.row(0).transpose()};
}

/// Tensor product of two univariate spline spaces, lexicographic with u running fastest.
template <typename Scalar>
class BasicTensorSplineSpace {
 public:
  BasicTensorSplineSpace(BasicKnotVector<Scalar> kv_u, BasicKnotVector<Scalar> kv_v)
      : kv_u_(std::move(kv_u)), kv_v_(std::move(kv_v)) {}

  const BasicKnotVector<Scalar>& kv_u() const { return kv_u_; }
  const BasicKnotVector<Scalar>& kv_v() const { return kv_v_; }
  const BasicKnotVector<Scalar>& kv(int direction) const { return direction == 0 ? kv_u_ : kv_v_; }
  int n_u() const { return kv_u_.size(); }
  int n_v() const { return kv_v_.size(); }
  int size() const { return n_u() * n_v(); }
  int index(int i, int j) const { return j * n_u() + i; }
  std::pair<int, int> split(int index) const { return {index % n_u(), index / n_u()}; }

  friend bool operator==(const BasicTensorSplineSpace& a, const BasicTensorSplineSpace& b) {
    return a.kv_u_ == b.kv_u_ && a.kv_v_ == b.kv_v_;
  }

 private:
  BasicKnotVector<Scalar> kv_u_;
  BasicKnotVector<Scalar> kv_v_;
};

using KnotVector = BasicKnotVector<double>;
using TensorSplineSpace = BasicTensorSplineSpace<double>;

}  // namespace ietidp

#endif  // IETIDP_SPLINES_HPP
