#include "ietidp/linalg.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <random>
#include <string>

namespace ietidp {

struct SpdFactorization::Impl {
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
};

SpdFactorization::SpdFactorization(const SparseMatrix& A) : n_(A.rows()) {
  if (A.rows() != A.cols()) throw ArgumentError("factor_spd: matrix must be square");
  if (n_ == 0) return;
  auto impl = std::make_shared<Impl>();
  impl->ldlt.compute(A);
  const auto& D = impl->ldlt.vectorD();
  const double scale = D.size() > 0 ? D.cwiseAbs().maxCoeff() : 0.0;
  int bad = -1;
  for (Eigen::Index i = 0; i < D.size(); ++i) {
    if (!(D[i] > 1e-14 * scale)) {
      bad = static_cast<int>(i);
      break;
    }
  }
  if (impl->ldlt.info() != Eigen::Success || bad >= 0 || !(scale > 0.0)) {
    int original = -1;
    if (bad >= 0) {
      const Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> inv = impl->ldlt.permutationP().inverse();
      original = inv.indices()[bad];
    }
    else if (D.size() == 0 || !(scale > 0.0)) original = 0;
    throw FactorizationError("matrix is not positive definite (nonpositive pivot at row " +
                             std::to_string(original) + ")");
  }
  impl_ = std::move(impl);
}

Eigen::VectorXd SpdFactorization::solve(const Eigen::VectorXd& b) const {
  if (b.size() != n_) throw ArgumentError("SpdFactorization::solve: size mismatch");
  if (n_ == 0) return Eigen::VectorXd();
  return impl_->ldlt.solve(b);
}

Eigen::MatrixXd SpdFactorization::solve(const Eigen::MatrixXd& B) const {
  if (B.rows() != n_) throw ArgumentError("SpdFactorization::solve: size mismatch");
  if (n_ == 0) return Eigen::MatrixXd(0, B.cols());
  return impl_->ldlt.solve(B);
}

struct IndefiniteFactorization::Impl {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
};

IndefiniteFactorization::IndefiniteFactorization(const SparseMatrix& A) : n_(A.rows()) {
  if (A.rows() != A.cols()) throw ArgumentError("factor_symmetric_indefinite: matrix must be square");
  if (n_ == 0) return;
  auto impl = std::make_shared<Impl>();
  SparseMatrix copy = A;
  copy.makeCompressed();
  impl->lu.analyzePattern(copy);
  impl->lu.factorize(copy);
  if (impl->lu.info() != Eigen::Success)
    throw FactorizationError("matrix is singular (" + impl->lu.lastErrorMessage() + ")");

  // Rank check: recover a known solution; a (numerically) singular matrix
  // amplifies the error far beyond this threshold.
  std::mt19937_64 gen(0x5eed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd x(n_);
  for (Eigen::Index i = 0; i < n_; ++i) x[i] = dist(gen);
  const Eigen::VectorXd xs = impl->lu.solve(copy * x);
  if (!xs.allFinite() || (xs - x).norm() > 1e-4 * x.norm())
    throw FactorizationError("matrix is rank deficient to working precision");
  impl_ = std::move(impl);
}

Eigen::VectorXd IndefiniteFactorization::solve(const Eigen::VectorXd& b) const {
  if (b.size() != n_) throw ArgumentError("IndefiniteFactorization::solve: size mismatch");
  if (n_ == 0) return Eigen::VectorXd();
  return impl_->lu.solve(b);
}

Eigen::MatrixXd IndefiniteFactorization::solve(const Eigen::MatrixXd& B) const {
  if (B.rows() != n_) throw ArgumentError("IndefiniteFactorization::solve: size mismatch");
  if (n_ == 0) return Eigen::MatrixXd(0, B.cols());
  return impl_->lu.solve(B);
}

PcgOutcome pcg(const LinearOperator& apply_A, const LinearOperator& apply_M, const Eigen::VectorXd& b,
               const Eigen::VectorXd& x0, const PcgOptions& options) {
  if (x0.size() != b.size()) throw ArgumentError("pcg: initial guess has wrong size");
  PcgOutcome out;
  out.solution = x0;
  Eigen::VectorXd r = b - apply_A(x0);
  const double r0 = r.norm();
  out.residual_history.push_back(1.0);
  if (r0 == 0.0) {
    out.converged = true;
    return out;
  }

  Eigen::VectorXd z = apply_M(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  std::vector<double> alphas, betas;
  for (int k = 0; k < options.max_iter; ++k) {
    const Eigen::VectorXd Ap = apply_A(p);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0) || !(rz > 0.0))
      throw IndefiniteOperatorError("pcg breakdown at iteration " + std::to_string(k) +
                                    ": operator or preconditioner is not positive definite");
    const double alpha = rz / pAp;
    out.solution += alpha * p;
    r -= alpha * Ap;
    ++out.iterations;
    alphas.push_back(alpha);
    const double rel = r.norm() / r0;
    out.residual_history.push_back(rel);
    if (rel <= options.rel_tol) {
      out.converged = true;
      break;
    }
    z = apply_M(r);
    const double rz_next = r.dot(z);
    const double beta = rz_next / rz;
    betas.push_back(beta);
    p = z + beta * p;
    rz = rz_next;
  }

  const std::size_t m = alphas.size();
  out.lanczos_diag.resize(m);
  out.lanczos_offdiag.resize(m > 0 ? m - 1 : 0);
  for (std::size_t k = 0; k < m; ++k) {
    out.lanczos_diag[k] = 1.0 / alphas[k] + (k > 0 ? betas[k - 1] / alphas[k - 1] : 0.0);
    if (k + 1 < m) out.lanczos_offdiag[k] = std::sqrt(betas[k]) / alphas[k];
  }
  const auto range = tridiag_eigs(out.lanczos_diag, out.lanczos_offdiag);
  out.lambda_min = range.min;
  out.lambda_max = range.max;
  out.kappa = std::max(1.0, range.max / range.min);
  return out;
}

}  // namespace ietidp
