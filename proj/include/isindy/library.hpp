#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isindy/polynomial.hpp"

namespace isindy {

// ---------------------------------------------------------------------------
// Counting
// ---------------------------------------------------------------------------

/// Number of monomials of degree <= d in n variables, binomial(n + d, d).
std::uint64_t count_monomials(unsigned n, unsigned d);

struct StructureCount {
  boost::multiprecision::cpp_int value;  // 2^N_m - 1
  int log10_floor = 0;
};

/// Number of distinct nonempty sets of monomials, sum_k binomial(N_m, k).
StructureCount count_polynomial_structures(unsigned n, unsigned d);
StructureCount count_polynomial_structures_from_monomials(std::uint64_t n_monomials);

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

struct Monomial {
  Exponents exponents;

  int degree() const noexcept { return total_degree(exponents); }
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// All exponent vectors of degree <= d in graded-lex order, constant first.
std::vector<Monomial> enumerate_monomials(unsigned n, unsigned d);

enum class TrigKind { Sin, Cos };

struct TrigFactor {
  TrigKind kind;
  std::size_t state;
  double frequency;
  friend bool operator==(const TrigFactor&, const TrigFactor&) = default;
};

/// monomial(x) * (dx_k/dt)^deriv_power, or a sin/cos of one state.
struct LibraryTerm {
  Monomial monomial;
  int deriv_power = 0;
  std::size_t deriv_index = 0;
  std::optional<TrigFactor> trig;

  bool in_denominator_block() const noexcept { return deriv_power > 0; }
  std::string label(const std::vector<std::string>& names = {}) const;
  friend bool operator==(const LibraryTerm&, const LibraryTerm&) = default;
};

enum class LibraryMode { Explicit, Implicit, Mixed };

std::string_view to_string(LibraryMode m) noexcept;
LibraryMode parse_library_mode(std::string_view s);

struct EvaluatedLibrary {
  Eigen::MatrixXd matrix;          // m x p
  std::vector<LibraryTerm> terms;  // p
  Eigen::VectorXd column_scales;   // p, 1.0 when unnormalized
  LibraryMode mode = LibraryMode::Explicit;

  Eigen::Index rows() const { return matrix.rows(); }
  Eigen::Index cols() const { return matrix.cols(); }
  /// Index of the first term carrying a derivative factor (= cols() if none).
  std::size_t denominator_begin() const;
};

/// Library description shared by the CLI and serialized run artifacts.
struct LibrarySpec {
  LibraryMode mode = LibraryMode::Implicit;
  int d_num = 4;
  int d_den = 4;
  std::size_t deriv_index = 0;
  bool include_trig = false;
  std::vector<double> frequencies;
  /// Highest derivative power in mixed mode.
  int d_deriv = 1;
};

/// Evaluates one term on one sample; the derivative row may be empty for
/// terms without a derivative factor.
double evaluate_term(const LibraryTerm& term, std::span<const double> x, std::span<const double> xdot);

EvaluatedLibrary build_explicit_library(const Eigen::Ref<const Eigen::MatrixXd>& X, int d, bool include_trig = false,
                                        const std::vector<double>& frequencies = {});

EvaluatedLibrary build_implicit_library(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                        const Eigen::Ref<const Eigen::VectorXd>& xdot_k, int d_num, int d_den,
                                        std::size_t deriv_index = 0);

EvaluatedLibrary build_mixed_library(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                     const Eigen::Ref<const Eigen::MatrixXd>& Xdot, int d_state, int d_deriv,
                                     std::size_t deriv_index);

/// Term lists without data, in the order the builders above produce them.
std::vector<LibraryTerm> implicit_terms(std::size_t n, int d_num, int d_den, std::size_t deriv_index);
std::vector<LibraryTerm> mixed_terms(std::size_t n, int d_state, int d_deriv, std::size_t deriv_index);

/// Dispatches on spec.mode. Xdot may be empty in explicit mode.
EvaluatedLibrary build_library(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::MatrixXd>& Xdot,
                               const LibrarySpec& spec);

/// Scales each column to unit 2-norm and records the original norms.
EvaluatedLibrary normalize_columns(EvaluatedLibrary lib);
/// Multiplies the columns back by their scales (scales reset to 1).
EvaluatedLibrary unscale(EvaluatedLibrary lib);

}  // namespace isindy
