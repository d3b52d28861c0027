#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "isindy/error.hpp"
#include "isindy/library.hpp"
#include "isindy/sparse.hpp"
#include "oracles.hpp"

using namespace isindy;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an isindy::Error");
  return ErrorKind::InvalidArgument;
}

Eigen::MatrixXd gaussian(Eigen::Index m, Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = g(rng);
  }
  return A;
}

std::vector<Eigen::Index> support_of(const Eigen::VectorXd& v) {
  std::vector<Eigen::Index> s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) s.push_back(i);
  }
  return s;
}

}  // namespace

TEST_CASE("null space of a random low-rank matrix") {
  std::mt19937_64 rng(3);
  for (int rank : {3, 7, 11}) {
    const Eigen::MatrixXd A = gaussian(40, rank, rng) * gaussian(rank, 15, rng);
    const NullSpaceBasis ns = null_space_basis(A);
    CHECK(ns.dim() == 15 - rank);
    CHECK(ns.ambient_dim() == 15);
    CHECK((A * ns.basis).lpNorm<Eigen::Infinity>() <= 1e-10 * A.norm());
    const Eigen::MatrixXd I = ns.basis.transpose() * ns.basis;
    CHECK((I - Eigen::MatrixXd::Identity(ns.dim(), ns.dim())).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(ns.singular_values.size() == 15);
    CHECK(std::is_sorted(ns.singular_values.data(), ns.singular_values.data() + 15, std::greater<>()));
  }
}

TEST_CASE("null space of a wide matrix and a full-rank one") {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd wide = gaussian(4, 9, rng);
  const NullSpaceBasis ns = null_space_basis(wide);
  CHECK(ns.dim() == 5);
  CHECK((wide * ns.basis).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(!ns.warnings.empty());
  CHECK(kind_of([&] { null_space_basis(gaussian(20, 6, rng)); }) == ErrorKind::EmptyNullSpace);
}

TEST_CASE("soft thresholding") {
  const Eigen::Vector4d v(-2.0, -0.5, 0.3, 1.5);
  const Eigen::VectorXd s = soft_threshold(v, 0.5);
  CHECK(s[0] == -1.5);
  CHECK(s[1] == 0.0);
  CHECK(s[2] == 0.0);
  CHECK(s[3] == 1.0);
}

TEST_CASE("ADM recovers planted sparse vectors") {
  std::mt19937_64 rng(17);
  int exact = 0;
  const int trials = 30;
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd planted = oracle::sparse_unit_vector(50, 4, rng);
    NullSpaceBasis ns;
    ns.basis = oracle::basis_containing(planted, 5, rng);
    const SparseCoefficients c = adm_sparsest_vector(ns, 0.1);
    Eigen::VectorXd want = planted;
    apply_sign_convention(want, 0);
    if (support_of(c.xi) == support_of(want) && (c.xi - want).lpNorm<Eigen::Infinity>() <= 1e-6) ++exact;
  }
  CHECK(exact >= trials - 1);
}

TEST_CASE("ADM is deterministic and rejects a lambda that zeroes everything") {
  std::mt19937_64 rng(5);
  NullSpaceBasis ns;
  ns.basis = oracle::basis_containing(oracle::sparse_unit_vector(30, 3, rng), 4, rng);
  const SparseCoefficients a = adm_sparsest_vector(ns, 0.05);
  const SparseCoefficients b = adm_sparsest_vector(ns, 0.05);
  CHECK(a.xi == b.xi);
  CHECK(a.initialization == b.initialization);
  CHECK(kind_of([&] { adm_sparsest_vector(ns, 2.0); }) == ErrorKind::DegenerateLambda);

  const auto sweep = lambda_sweep(ns, {0.05, 0.5, 2.0});
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[0].ok());
  CHECK_FALSE(sweep[2].ok());
  CHECK(*sweep[2].error == ErrorKind::DegenerateLambda);
  CHECK(kind_of([&] { lambda_sweep(ns, {0.5, 0.05}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("log grid") {
  const auto g = log_grid(1e-4, 1.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == doctest::Approx(1e-4));
  CHECK(g[2] == doctest::Approx(1e-2));
  CHECK(g.back() == doctest::Approx(1.0));
}

TEST_CASE("sign convention makes the largest block entry positive") {
  Eigen::VectorXd v(4);
  v << 3.0, 0.5, -2.0, 1.0;
  apply_sign_convention(v, 2);
  CHECK(v[2] == 2.0);
  CHECK(v[0] == -3.0);
}

TEST_CASE("candidate ordering") {
  SparseCoefficients a, b;
  a.term_count = 3;
  b.term_count = 4;
  a.residual = 1.0;
  b.residual = 1e-9;
  CHECK(is_preferred(a, b, {}));
  b.term_count = 3;
  CHECK(is_preferred(b, a, {}));
  // Residuals at round-off: the lower-degree support wins.
  a.residual = 1e-15;
  b.residual = 1e-16;
  a.xi = Eigen::Vector3d(1, 1, 0);
  b.xi = Eigen::Vector3d(0, 1, 1);
  a.active = {true, true, false};
  b.active = {false, true, true};
  CHECK(is_preferred(a, b, {0, 1, 2}));
  CHECK_FALSE(is_preferred(b, a, {0, 1, 2}));
}

TEST_CASE("STLSQ agrees with exhaustive best-subset least squares") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd theta = gaussian(60, 8, rng);
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(8);
    xi[trial % 8] = mag(rng);
    xi[(trial + 3) % 8] = -mag(rng);
    xi[(trial + 5) % 8] = mag(rng);
    const Eigen::VectorXd y = theta * xi;
    const SparseCoefficients fit = stlsq(theta, y, 0.1);
    const oracle::SubsetFit ref = oracle::best_subset(theta, y, 3);
    CHECK(fit.term_count == 3);
    CHECK((fit.xi - ref.coeffs).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK(fit.residual <= 1e-12);
  }
}

TEST_CASE("STLSQ errors") {
  std::mt19937_64 rng(10);
  const Eigen::MatrixXd theta = gaussian(30, 4, rng);
  const Eigen::VectorXd y = theta.col(0) * 0.01;
  CHECK(kind_of([&] { stlsq(theta, y, 1.0); }) == ErrorKind::AllTermsEliminated);
  CHECK(kind_of([&] { stlsq(theta, Eigen::VectorXd::Ones(5), 0.1); }) == ErrorKind::DimensionMismatch);
  Eigen::MatrixXd dup(30, 3);
  dup << theta.col(0), theta.col(0), theta.col(1);
  CHECK(kind_of([&] { stlsq(dup, dup.col(0) + dup.col(2), 0.1); }) == ErrorKind::RankDeficientActiveSet);
}

TEST_CASE("LASSO solution satisfies the optimality conditions") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd theta = gaussian(80, 10, rng);
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(10);
    xi[1] = 1.5;
    xi[6] = -0.8;
    Eigen::VectorXd y = theta * xi;
    for (auto& v : y) v += noise(rng);
    const double lambda = 0.05;
    const SparseCoefficients c = lasso_cd(theta, y, lambda);
    const Eigen::VectorXd grad = theta.transpose() * (y - theta * c.xi) / 80.0;
    for (Eigen::Index j = 0; j < 10; ++j) {
      if (c.xi[j] != 0.0) {
        CHECK(grad[j] == doctest::Approx(lambda * (c.xi[j] > 0 ? 1.0 : -1.0)).epsilon(1e-6));
      } else {
        CHECK(std::abs(grad[j]) <= lambda * (1 + 1e-6));
      }
    }
    const SparseCoefficients same = sparse_regression(RegressionSolver::Lasso, theta, y, lambda);
    CHECK(same.xi == c.xi);
  }
}
