#include "isindy/library.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "isindy/error.hpp"

namespace isindy {

std::uint64_t count_monomials(unsigned n, unsigned d) {
  // binomial(n + d, d) built incrementally; each partial product is itself a
  // binomial coefficient, so the division is exact.
  std::uint64_t c = 1;
  for (unsigned k = 1; k <= d; ++k) c = c * (n + k) / k;
  return c;
}

StructureCount count_polynomial_structures_from_monomials(std::uint64_t n_monomials) {
  using boost::multiprecision::cpp_int;
  StructureCount out;
  out.value = (cpp_int(1) << static_cast<unsigned>(n_monomials)) - 1;
  const std::string digits = out.value.str();
  out.log10_floor = static_cast<int>(digits.size()) - 1;
  return out;
}

StructureCount count_polynomial_structures(unsigned n, unsigned d) {
  return count_polynomial_structures_from_monomials(count_monomials(n, d));
}

std::vector<Monomial> enumerate_monomials(unsigned n, unsigned d) {
  std::vector<Monomial> out;
  out.reserve(count_monomials(n, d));
  Exponents e(n, 0);
  // Fills e[i..] with `remaining` degree units, larger leading exponents first.
  std::function<void(unsigned, int)> fill = [&](unsigned i, int remaining) {
    if (i + 1 == n) {
      e[i] = remaining;
      out.push_back(Monomial{e});
      return;
    }
    for (int p = remaining; p >= 0; --p) {
      e[i] = p;
      fill(i + 1, remaining - p);
    }
    e[i] = 0;
  };
  for (unsigned g = 0; g <= d; ++g) {
    if (n == 0) {
      if (g == 0) out.push_back(Monomial{});
      continue;
    }
    fill(0, static_cast<int>(g));
  }
  return out;
}

std::string LibraryTerm::label(const std::vector<std::string>& names) const {
  std::string s;
  if (trig) {
    std::ostringstream os;
    os << (trig->kind == TrigKind::Sin ? "sin(" : "cos(") << trig->frequency << "*"
       << (trig->state < names.size() ? names[trig->state] : "x" + std::to_string(trig->state + 1)) << ")";
    s = os.str();
  } else {
    s = monomial_to_string(monomial.exponents, names);
  }
  if (deriv_power > 0) {
    std::string d = "d" + (deriv_index < names.size() ? names[deriv_index] : "x" + std::to_string(deriv_index + 1));
    if (deriv_power > 1) d += "^" + std::to_string(deriv_power);
    s = s == "1" ? d : d + "*" + s;
  }
  return s;
}

std::string_view to_string(LibraryMode m) noexcept {
  switch (m) {
    case LibraryMode::Explicit: return "explicit";
    case LibraryMode::Implicit: return "implicit";
    case LibraryMode::Mixed: return "mixed";
  }
  return "unknown";
}

LibraryMode parse_library_mode(std::string_view s) {
  for (auto m : {LibraryMode::Explicit, LibraryMode::Implicit, LibraryMode::Mixed}) {
    if (s == to_string(m)) return m;
  }
  throw Error(ErrorKind::Schema, "unknown library mode '" + std::string(s) + "'");
}

std::size_t EvaluatedLibrary::denominator_begin() const {
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (terms[j].in_denominator_block()) return j;
  }
  return terms.size();
}

double evaluate_term(const LibraryTerm& term, std::span<const double> x, std::span<const double> xdot) {
  double v;
  if (term.trig) {
    const double arg = term.trig->frequency * x[term.trig->state];
    v = term.trig->kind == TrigKind::Sin ? std::sin(arg) : std::cos(arg);
  } else {
    v = evaluate_monomial(term.monomial.exponents, x);
  }
  for (int q = 0; q < term.deriv_power; ++q) v *= xdot[term.deriv_index];
  return v;
}

namespace {

void require_rows(const Eigen::Ref<const Eigen::MatrixXd>& X) {
  if (X.rows() == 0) throw Error(ErrorKind::EmptyData, "library requested on data with no samples");
}

void check_degree(int d, const char* what) {
  if (d < 0) throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be nonnegative");
}

EvaluatedLibrary evaluate(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::MatrixXd>& Xdot,
                          std::vector<LibraryTerm> terms, LibraryMode mode) {
  const Eigen::Index m = X.rows();
  const auto p = static_cast<Eigen::Index>(terms.size());
  EvaluatedLibrary lib;
  lib.matrix.resize(m, p);
  lib.mode = mode;
  lib.column_scales = Eigen::VectorXd::Ones(p);

  // Row-major copies make each sample contiguous for evaluate_term.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Xr = X;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Dr;
  if (Xdot.size() > 0) Dr = Xdot;
  const auto n = static_cast<std::size_t>(X.cols());
  const auto nd = static_cast<std::size_t>(Dr.cols());
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto& t = terms[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < m; ++i) {
      std::span<const double> x(Xr.data() + i * Xr.cols(), n);
      std::span<const double> xd = nd > 0 ? std::span<const double>(Dr.data() + i * Dr.cols(), nd)
                                          : std::span<const double>();
      lib.matrix(i, j) = evaluate_term(t, x, xd);
    }
  }
  lib.terms = std::move(terms);
  return lib;
}

std::vector<LibraryTerm> monomial_terms(std::size_t n, int d, int deriv_power, std::size_t deriv_index) {
  std::vector<LibraryTerm> out;
  for (auto& m : enumerate_monomials(static_cast<unsigned>(n), static_cast<unsigned>(d))) {
    out.push_back(LibraryTerm{std::move(m), deriv_power, deriv_power > 0 ? deriv_index : 0, std::nullopt});
  }
  return out;
}

}  // namespace

std::vector<LibraryTerm> implicit_terms(std::size_t n, int d_num, int d_den, std::size_t deriv_index) {
  check_degree(d_num, "numerator degree");
  check_degree(d_den, "denominator degree");
  if (deriv_index >= n) throw Error(ErrorKind::DimensionMismatch, "derivative index outside the state vector");
  auto terms = monomial_terms(n, d_num, 0, deriv_index);
  auto den = monomial_terms(n, d_den, 1, deriv_index);
  terms.insert(terms.end(), den.begin(), den.end());
  return terms;
}

std::vector<LibraryTerm> mixed_terms(std::size_t n, int d_state, int d_deriv, std::size_t deriv_index) {
  check_degree(d_state, "state degree");
  check_degree(d_deriv, "derivative degree");
  if (deriv_index >= n) throw Error(ErrorKind::DimensionMismatch, "derivative index outside the state vector");
  std::vector<LibraryTerm> terms;
  for (int q = 0; q <= d_deriv; ++q) {
    auto block = monomial_terms(n, d_state, q, deriv_index);
    terms.insert(terms.end(), block.begin(), block.end());
  }
  return terms;
}

EvaluatedLibrary build_explicit_library(const Eigen::Ref<const Eigen::MatrixXd>& X, int d, bool include_trig,
                                        const std::vector<double>& frequencies) {
  require_rows(X);
  check_degree(d, "degree");
  auto terms = monomial_terms(static_cast<std::size_t>(X.cols()), d, 0, 0);
  if (include_trig) {
    if (frequencies.empty()) {
      throw Error(ErrorKind::InvalidArgument, "trigonometric terms requested without frequencies");
    }
    for (double w : frequencies) {
      for (std::size_t i = 0; i < static_cast<std::size_t>(X.cols()); ++i) {
        for (TrigKind kind : {TrigKind::Sin, TrigKind::Cos}) {
          terms.push_back(LibraryTerm{Monomial{Exponents(static_cast<std::size_t>(X.cols()), 0)}, 0, 0,
                                      TrigFactor{kind, i, w}});
        }
      }
    }
  }
  return evaluate(X, Eigen::MatrixXd(), std::move(terms), LibraryMode::Explicit);
}

EvaluatedLibrary build_implicit_library(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                        const Eigen::Ref<const Eigen::VectorXd>& xdot_k, int d_num, int d_den,
                                        std::size_t deriv_index) {
  require_rows(X);
  if (X.rows() != xdot_k.size()) {
    throw Error(ErrorKind::DimensionMismatch, "state data has " + std::to_string(X.rows()) +
                                                  " rows but the derivative has " + std::to_string(xdot_k.size()));
  }
  // Only column deriv_index of the derivative matrix is read.
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(X.rows(), X.cols());
  D.col(static_cast<Eigen::Index>(deriv_index)) = xdot_k;
  return evaluate(X, D, implicit_terms(static_cast<std::size_t>(X.cols()), d_num, d_den, deriv_index),
                  LibraryMode::Implicit);
}

EvaluatedLibrary build_mixed_library(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                     const Eigen::Ref<const Eigen::MatrixXd>& Xdot, int d_state, int d_deriv,
                                     std::size_t deriv_index) {
  require_rows(X);
  if (X.rows() != Xdot.rows() || X.cols() != Xdot.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "state and derivative matrices differ in shape");
  }
  return evaluate(X, Xdot, mixed_terms(static_cast<std::size_t>(X.cols()), d_state, d_deriv, deriv_index),
                  LibraryMode::Mixed);
}

EvaluatedLibrary build_library(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::MatrixXd>& Xdot,
                               const LibrarySpec& spec) {
  switch (spec.mode) {
    case LibraryMode::Explicit:
      return build_explicit_library(X, spec.d_num, spec.include_trig, spec.frequencies);
    case LibraryMode::Implicit:
      if (Xdot.rows() != X.rows() || static_cast<Eigen::Index>(spec.deriv_index) >= Xdot.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "implicit library needs derivative data for the selected state");
      }
      return build_implicit_library(X, Xdot.col(static_cast<Eigen::Index>(spec.deriv_index)), spec.d_num, spec.d_den,
                                    spec.deriv_index);
    case LibraryMode::Mixed:
      return build_mixed_library(X, Xdot, spec.d_num, spec.d_deriv, spec.deriv_index);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown library mode");
}

EvaluatedLibrary normalize_columns(EvaluatedLibrary lib) {
  for (Eigen::Index j = 0; j < lib.cols(); ++j) {
    const double norm = lib.matrix.col(j).norm();
    if (norm == 0.0 || !std::isfinite(norm)) {
      throw Error(ErrorKind::ZeroColumn, "library column " + std::to_string(j) + " (" +
                                             lib.terms[static_cast<std::size_t>(j)].label() +
                                             ") is identically zero or non-finite");
    }
    lib.matrix.col(j) /= norm;
    lib.column_scales[j] *= norm;
  }
  return lib;
}

EvaluatedLibrary unscale(EvaluatedLibrary lib) {
  for (Eigen::Index j = 0; j < lib.cols(); ++j) lib.matrix.col(j) *= lib.column_scales[j];
  lib.column_scales.setOnes();
  return lib;
}

}  // namespace isindy
