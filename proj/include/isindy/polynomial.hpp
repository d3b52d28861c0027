#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace isindy {

using Exponents = std::vector<int>;

int total_degree(const Exponents& e) noexcept;

/// Graded-lexicographic order: lower total degree first; within a degree,
/// larger leading exponents first, so [1, x1, x2, x1^2, x1 x2, x2^2].
struct GradedLexLess {
  bool operator()(const Exponents& a, const Exponents& b) const noexcept;
};

/// x^e evaluated with repeated multiplication (exact for small integer powers).
double evaluate_monomial(const Exponents& e, std::span<const double> x);

/// Sparse multivariate polynomial with real coefficients. Terms with an exact
/// zero coefficient are never stored.
class Polynomial {
 public:
  using TermMap = std::map<Exponents, double, GradedLexLess>;

  explicit Polynomial(std::size_t n_vars = 0) : n_vars_(n_vars) {}

  static Polynomial constant(std::size_t n_vars, double c);
  static Polynomial monomial(const Exponents& e, double c = 1.0);

  std::size_t n_vars() const noexcept { return n_vars_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  int degree() const noexcept;

  /// Coefficient of x^e (0 if absent).
  double coeff(const Exponents& e) const;
  /// Adds c to the coefficient of x^e, dropping the term if it cancels exactly.
  void add_term(const Exponents& e, double c);
  void set_term(const Exponents& e, double c);

  double evaluate(std::span<const double> x) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) = default;

  /// Largest |coefficient| difference over the union of supports.
  static double max_abs_difference(const Polynomial& a, const Polynomial& b);

  /// Human-readable form, e.g. "0.6 + -2.5*x1^2*x2".
  std::string to_string(const std::vector<std::string>& names = {}) const;

 private:
  void check_arity(const Exponents& e) const;

  std::size_t n_vars_;
  TermMap terms_;
};

std::string monomial_to_string(const Exponents& e, const std::vector<std::string>& names = {});

}  // namespace isindy
