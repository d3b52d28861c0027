#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "isindy/error.hpp"
#include "isindy/library.hpp"
#include "oracles.hpp"

using namespace isindy;

namespace {

Eigen::MatrixXd sample_matrix(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  Eigen::MatrixXd X(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) X(i, j) = u(rng);
  }
  return X;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an isindy::Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("monomial counts agree with enumeration and Pascal's triangle") {
  CHECK(count_monomials(5, 4) == 126);
  CHECK(count_monomials(2, 6) == 28);
  CHECK(count_monomials(7, 6) == 1716);
  for (unsigned n = 1; n <= 4; ++n) {
    for (unsigned d = 0; d <= 5; ++d) {
      CHECK(count_monomials(n, d) == oracle::count_monomials_by_enumeration(n, d));
      CHECK(count_monomials(n, d) == oracle::binomial(n + d, d));
    }
  }
}

TEST_CASE("structure counts agree with subset enumeration") {
  for (unsigned nm = 1; nm <= 20; ++nm) {
    const StructureCount c = count_polynomial_structures_from_monomials(nm);
    CHECK(c.value == boost::multiprecision::cpp_int(oracle::count_nonempty_subsets(nm)));
  }
  const StructureCount big = count_polynomial_structures(5, 4);
  CHECK(big.log10_floor == 37);
  CHECK(big.value == (boost::multiprecision::cpp_int(1) << 126) - 1);
}

TEST_CASE("monomials are enumerated in graded-lex order") {
  for (unsigned n = 1; n <= 3; ++n) {
    for (unsigned d = 0; d <= 4; ++d) {
      const auto mine = enumerate_monomials(n, d);
      const auto ref = oracle::graded_lex_exponents(n, d);
      REQUIRE(mine.size() == ref.size());
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(mine[i].exponents == ref[i]);
    }
  }
}

TEST_CASE("implicit library matches a column-by-column oracle") {
  const Eigen::MatrixXd X = sample_matrix(40, 3, 1);
  const Eigen::MatrixXd Xdot = sample_matrix(40, 3, 2);
  for (std::size_t k = 0; k < 3; ++k) {
    const EvaluatedLibrary lib = build_implicit_library(X, Xdot.col(static_cast<Eigen::Index>(k)), 3, 3, k);
    const Eigen::MatrixXd ref = oracle::implicit_library(X, Xdot.col(static_cast<Eigen::Index>(k)), 3);
    REQUIRE(lib.cols() == ref.cols());
    CHECK((lib.matrix - ref).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(lib.denominator_begin() == 20);
    CHECK(lib.mode == LibraryMode::Implicit);
    for (std::size_t j = 0; j < lib.terms.size(); ++j) {
      const auto& t = lib.terms[j];
      std::vector<double> x = {X(7, 0), X(7, 1), X(7, 2)}, v = {Xdot(7, 0), Xdot(7, 1), Xdot(7, 2)};
      CHECK(evaluate_term(t, x, v) == doctest::Approx(lib.matrix(7, static_cast<Eigen::Index>(j))).epsilon(1e-14));
    }
  }
}

TEST_CASE("library sizes of the benchmark configurations") {
  CHECK(implicit_terms(1, 4, 4, 0).size() == 10);
  CHECK(implicit_terms(2, 6, 6, 1).size() == 56);
  CHECK(implicit_terms(7, 6, 6, 1).size() == 3432);
  CHECK(implicit_terms(7, 4, 4, 0).size() == 660);
  CHECK(mixed_terms(1, 3, 3, 0).size() == 16);
}

TEST_CASE("mixed library rows are derivative powers times monomials") {
  Eigen::MatrixXd X(3, 1), V(3, 1);
  X << 0.5, 1.0, 2.0;
  V << 0.25, 1.0, 4.0;
  const EvaluatedLibrary lib = build_mixed_library(X, V, 2, 2, 0);
  REQUIRE(lib.cols() == 9);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (int q = 0; q <= 2; ++q) {
      for (int a = 0; a <= 2; ++a) {
        CHECK(lib.matrix(i, 3 * q + a) == doctest::Approx(std::pow(V(i, 0), q) * std::pow(X(i, 0), a)));
      }
    }
  }
  CHECK(lib.terms[4].label() == "dx1*x1");
  CHECK(lib.terms[8].label({"s"}) == "ds^2*s^2");
}

TEST_CASE("explicit library with trigonometric terms") {
  const Eigen::MatrixXd X = sample_matrix(10, 2, 3);
  const EvaluatedLibrary lib = build_explicit_library(X, 2, true, {1.0, 2.0});
  REQUIRE(lib.cols() == 6 + 2 * 2 * 2);
  CHECK(lib.matrix(4, 6) == doctest::Approx(std::sin(X(4, 0))));
  CHECK(lib.matrix(4, 7) == doctest::Approx(std::cos(X(4, 0))));
  CHECK(lib.matrix(4, 11) == doctest::Approx(std::cos(2.0 * X(4, 0))));
  CHECK(lib.matrix(4, 13) == doctest::Approx(std::cos(2.0 * X(4, 1))));
  CHECK(kind_of([&] { build_explicit_library(X, 2, true, {}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("column normalization records scales and is undone by unscale") {
  const Eigen::MatrixXd X = sample_matrix(25, 2, 4);
  const Eigen::MatrixXd V = sample_matrix(25, 2, 5);
  const EvaluatedLibrary raw = build_implicit_library(X, V.col(0), 2, 2, 0);
  const EvaluatedLibrary norm = normalize_columns(raw);
  for (Eigen::Index j = 0; j < norm.cols(); ++j) {
    CHECK(norm.matrix.col(j).norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(norm.column_scales[j] == doctest::Approx(raw.matrix.col(j).norm()).epsilon(1e-14));
  }
  const EvaluatedLibrary back = unscale(norm);
  CHECK((back.matrix - raw.matrix).lpNorm<Eigen::Infinity>() <= 1e-13);
  CHECK(back.column_scales.isOnes());
}

TEST_CASE("library errors") {
  const Eigen::MatrixXd X = sample_matrix(5, 2, 6);
  CHECK(kind_of([&] { build_explicit_library(Eigen::MatrixXd(0, 2), 2); }) == ErrorKind::EmptyData);
  CHECK(kind_of([&] { build_implicit_library(X, Eigen::VectorXd::Ones(4), 2, 2, 0); }) ==
        ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] { build_implicit_library(X, Eigen::VectorXd::Ones(5), 2, 2, 2); }) ==
        ErrorKind::DimensionMismatch);
  Eigen::MatrixXd Z = X;
  Z.col(1).setZero();
  CHECK(kind_of([&] { normalize_columns(build_explicit_library(Z, 1)); }) == ErrorKind::ZeroColumn);
  CHECK(kind_of([] { parse_library_mode("rational"); }) == ErrorKind::Schema);
  CHECK(parse_library_mode("mixed") == LibraryMode::Mixed);
}
