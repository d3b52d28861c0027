#include <doctest.h>

#include <random>

#include "isindy/error.hpp"
#include "isindy/polynomial.hpp"
#include "oracles.hpp"

using namespace isindy;

namespace {

Polynomial random_poly(std::size_t n, int d, int terms, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ex(0, d);
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  Polynomial p(n);
  for (int t = 0; t < terms; ++t) {
    Exponents e(n);
    for (auto& v : e) v = ex(rng);
    p.add_term(e, c(rng));
  }
  return p;
}

}  // namespace

TEST_CASE("graded-lex order puts the constant first and larger leading exponents first") {
  std::vector<Exponents> all;
  for (const auto& e : oracle::graded_lex_exponents(2, 2)) all.push_back(e);
  REQUIRE(all.size() == 6);
  CHECK(all[0] == Exponents{0, 0});
  CHECK(all[1] == Exponents{1, 0});
  CHECK(all[2] == Exponents{0, 1});
  CHECK(all[3] == Exponents{2, 0});
  CHECK(all[4] == Exponents{1, 1});
  CHECK(all[5] == Exponents{0, 2});

  const GradedLexLess less;
  for (std::size_t i = 0; i + 1 < all.size(); ++i) {
    CHECK(less(all[i], all[i + 1]));
    CHECK_FALSE(less(all[i + 1], all[i]));
  }
}

TEST_CASE("exact zero coefficients are never stored") {
  Polynomial p(2);
  p.add_term({1, 0}, 2.0);
  p.add_term({1, 0}, -2.0);
  p.add_term({0, 1}, 0.0);
  CHECK(p.is_zero());
  p.set_term({0, 1}, 3.0);
  p.set_term({0, 1}, 0.0);
  CHECK(p.is_zero());
}

TEST_CASE("arity and evaluation errors") {
  Polynomial p(2);
  CHECK_THROWS_AS(p.add_term({1}, 1.0), Error);
  p.add_term({1, 1}, 1.0);
  const double x[3] = {1, 2, 3};
  CHECK_THROWS_AS(p.evaluate(std::span<const double>(x, 3)), Error);
  try {
    p.evaluate(std::span<const double>(x, 1));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("evaluation matches a pow-based oracle on random polynomials") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    const Polynomial p = random_poly(3, 4, 8, rng);
    const double x[3] = {u(rng), u(rng), u(rng)};
    double ref = 0.0;
    for (const auto& [e, c] : p.terms()) ref += c * oracle::monomial_pow(e, x);
    CHECK(p.evaluate(x) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("ring identities hold pointwise on random polynomials") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Polynomial a = random_poly(2, 3, 5, rng);
    const Polynomial b = random_poly(2, 3, 5, rng);
    const double x[2] = {u(rng), u(rng)};
    CHECK((a * b).evaluate(x) == doctest::Approx(a.evaluate(x) * b.evaluate(x)).epsilon(1e-12));
    CHECK((a + b).evaluate(x) == doctest::Approx(a.evaluate(x) + b.evaluate(x)).epsilon(1e-12));
    CHECK(Polynomial::max_abs_difference((a + b) - b, a) <= 1e-12);
    CHECK((a * 2.5).evaluate(x) == doctest::Approx(2.5 * a.evaluate(x)).epsilon(1e-12));
    if (!a.is_zero() && !b.is_zero()) CHECK((a * b).degree() == a.degree() + b.degree());
  }
}

TEST_CASE("text form lists terms in graded-lex order") {
  Polynomial p(2);
  p.add_term({0, 2}, 1.0);
  p.add_term({0, 0}, 0.5);
  p.add_term({1, 0}, -3.0);
  CHECK(p.to_string({"a", "b"}) == "0.5 + -3*a + 1*b^2");
  CHECK(monomial_to_string({2, 1}) == "x1^2*x2");
}
