#include "doctest.h"

#include <random>

#include "helpers.hpp"
#include "ietidp/linalg.hpp"

using namespace ietidp;
using testing::random_vector;

namespace {

SparseMatrix sparse(const Eigen::MatrixXd& M) { return M.sparseView(); }

Eigen::MatrixXd random_spd(int n, std::mt19937_64& gen, double shift = 1.0) {
  Eigen::MatrixXd B(n, n);
  for (int j = 0; j < n; ++j) B.col(j) = random_vector(n, gen);
  return B.transpose() * B + shift * Eigen::MatrixXd::Identity(n, n);
}

LinearOperator dense_op(const Eigen::MatrixXd& M) {
  return [M](const Eigen::VectorXd& x) { return Eigen::VectorXd(M * x); };
}

const LinearOperator identity = [](const Eigen::VectorXd& x) { return x; };

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("spd factorization") {
  const auto D = factor_spd(sparse(Eigen::Vector3d(1, 2, 3).asDiagonal().toDenseMatrix()));
  CHECK((D.solve(Eigen::VectorXd(Eigen::Vector3d(1, 2, 3))) - Eigen::VectorXd::Ones(3)).norm() <= 1e-15);
  CHECK_THROWS_AS(factor_spd(sparse(Eigen::MatrixXd::Zero(1, 1))), FactorizationError);

  Eigen::MatrixXd indefinite = Eigen::Vector3d(1, -2, 3).asDiagonal();
  try {
    factor_spd(sparse(indefinite));
    FAIL("expected a factorization error");
  } catch (const FactorizationError& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }

  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = trial == 0 ? 50 : 5 + trial % 30;
    const Eigen::MatrixXd A = random_spd(n, gen);
    const Eigen::VectorXd b = random_vector(n, gen);
    const Eigen::VectorXd x = factor_spd(sparse(A)).solve(b);
    CHECK((A * x - b).norm() <= 1e-10 * (A.norm() * x.norm() + b.norm()));
  }
}

TEST_CASE("indefinite factorization") {
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK((factor_symmetric_indefinite(sparse(swap)).solve(Eigen::VectorXd(Eigen::Vector2d(1, 2))) -
         Eigen::VectorXd(Eigen::Vector2d(2, 1)))
            .norm() <= 1e-14);
  Eigen::MatrixXd saddle(2, 2);
  saddle << 2, 1, 1, 0;
  CHECK((factor_symmetric_indefinite(sparse(saddle)).solve(Eigen::VectorXd(Eigen::Vector2d(3, 1))) -
         Eigen::VectorXd::Ones(2))
            .norm() <= 1e-14);

  Eigen::MatrixXd singular(3, 3);
  singular << 1, 1, 0, 1, 1, 0, 0, 0, 2;
  CHECK_THROWS_AS(factor_symmetric_indefinite(sparse(singular)), FactorizationError);

  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = trial == 0 ? 40 : 4 + trial % 25;
    // saddle point [K C^T; C 0] with K SPD and C of full row rank
    const int m = 1 + n / 4;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + m, n + m);
    A.topLeftCorner(n, n) = random_spd(n, gen);
    Eigen::MatrixXd C(m, n);
    for (int i = 0; i < m; ++i) C.row(i) = random_vector(n, gen).transpose();
    A.bottomLeftCorner(m, n) = C;
    A.topRightCorner(n, m) = C.transpose();
    const Eigen::VectorXd b = random_vector(n + m, gen);
    const Eigen::VectorXd x = factor_symmetric_indefinite(sparse(A)).solve(b);
    CHECK((A * x - b).norm() <= 1e-9 * (A.norm() * x.norm() + b.norm()));
  }
}

TEST_CASE("tridiagonal eigenvalues") {
  auto one = tridiag_eigs<double>({3.0}, {});
  CHECK(one.min == doctest::Approx(3.0));
  CHECK(one.max == doctest::Approx(3.0));
  auto two = tridiag_eigs<double>({2.0, 2.0}, {1.0});
  CHECK(std::abs(two.min - 1.0) <= 1e-12);
  CHECK(std::abs(two.max - 3.0) <= 1e-12);

  const int n = 20;
  auto toeplitz = tridiag_eigs(std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0));
  CHECK(std::abs(toeplitz.min - (2 - 2 * std::cos(M_PI / (n + 1)))) <= 1e-10);
  CHECK(std::abs(toeplitz.max - (2 - 2 * std::cos(n * M_PI / (n + 1)))) <= 1e-10);

  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + trial;
    const Eigen::VectorXd d = random_vector(m, gen), e = random_vector(m - 1, gen);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    T.diagonal() = d;
    T.diagonal(1) = e;
    T.diagonal(-1) = e;
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(T).eigenvalues();
    const auto range = tridiag_eigs(std::vector<double>(d.data(), d.data() + m),
                                    std::vector<double>(e.data(), e.data() + m - 1));
    CHECK(std::abs(range.min - ev.minCoeff()) <= 1e-10);
    CHECK(std::abs(range.max - ev.maxCoeff()) <= 1e-10);
  }

  const auto ld = tridiag_eigs<long double>({2.0L, 2.0L}, {1.0L}, 1e-15L);
  CHECK(static_cast<double>(std::abs(ld.max - 3.0L)) <= 1e-14);
  CHECK_THROWS_AS(tridiag_eigs<double>({}, {}), ArgumentError);
  CHECK_THROWS_AS(tridiag_eigs<double>({1.0, 2.0}, {}), ArgumentError);
}

TEST_CASE("pcg basics") {
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(6, 1, 6);
  auto out = pcg(identity, identity, b, Eigen::VectorXd::Zero(6));
  CHECK(out.converged);
  CHECK(out.iterations == 1);
  CHECK(out.kappa == doctest::Approx(1.0));
  CHECK(out.residual_history.front() == 1.0);
  CHECK(out.residual_history.back() <= 1e-6);

  Eigen::MatrixXd A = Eigen::Vector2d(1, 4).asDiagonal();
  out = pcg(dense_op(A), identity, Eigen::VectorXd::Ones(2), Eigen::VectorXd::Zero(2), {1e-12, 100});
  CHECK(out.converged);
  CHECK(out.iterations <= 2);
  CHECK(std::abs(out.kappa - 4.0) <= 1e-8);
  CHECK((out.solution - Eigen::VectorXd(Eigen::Vector2d(1, 0.25))).norm() <= 1e-12);

  Eigen::MatrixXd neg = Eigen::Vector2d(1, -1).asDiagonal();
  CHECK_THROWS_AS(pcg(dense_op(neg), identity, Eigen::VectorXd(Eigen::Vector2d(0, 1)), Eigen::VectorXd::Zero(2)),
                  IndefiniteOperatorError);

  std::mt19937_64 gen(4);
  const Eigen::MatrixXd S = random_spd(40, gen, 1e-3);
  out = pcg(dense_op(S), identity, random_vector(40, gen), Eigen::VectorXd::Zero(40), {1e-14, 3});
  CHECK(!out.converged);
  CHECK(out.iterations == 3);
  CHECK(out.residual_history.size() == 4);
}

TEST_CASE("pcg error is monotone in the energy norm") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd A = random_spd(10, gen, 0.1);
    const Eigen::VectorXd b = random_vector(10, gen);
    const Eigen::VectorXd x_star = A.ldlt().solve(b);
    const Eigen::VectorXd Md = random_vector(10, gen).cwiseAbs().array() + 0.5;
    const LinearOperator M = [Md](const Eigen::VectorXd& r) { return Eigen::VectorXd(r.cwiseQuotient(Md)); };
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 10; ++k) {
      const auto out = pcg(dense_op(A), M, b, Eigen::VectorXd::Zero(10), {1e-300, k});
      const Eigen::VectorXd e = out.solution - x_star;
      const double energy = std::sqrt(e.dot(A * e));
      CHECK(energy <= previous * (1 + 1e-10) + 1e-13);
      previous = energy;
    }
  }
}

TEST_CASE("lanczos estimates against a dense eigensolver") {
  std::mt19937_64 gen(30);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 30;
    const Eigen::MatrixXd A = random_spd(n, gen, 0.5);
    const Eigen::VectorXd Md = random_vector(n, gen).cwiseAbs().array() + 0.5;
    const LinearOperator M = [Md](const Eigen::VectorXd& r) { return Eigen::VectorXd(r.cwiseQuotient(Md)); };
    const auto out = pcg(dense_op(A), M, random_vector(n, gen), Eigen::VectorXd::Zero(n), {1e-12, 200});
    // spectrum of M^-1 A = spectrum of the symmetric D^-1/2 A D^-1/2
    const Eigen::VectorXd s = Md.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd sym = s.asDiagonal() * A * s.asDiagonal();
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues();
    const double kappa = ev.maxCoeff() / ev.minCoeff();
    CHECK(out.converged);
    CHECK(std::abs(out.kappa - kappa) <= 0.05 * kappa);
    CHECK(out.lambda_min >= ev.minCoeff() - 1e-8);
    CHECK(out.lambda_max <= ev.maxCoeff() + 1e-8);
    CHECK(out.kappa >= 1.0);
  }
}

}
