#include "isindy/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "isindy/error.hpp"

namespace isindy {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DenominatorZero: return "DenominatorZero";
    case ErrorKind::IntegrationFailure: return "IntegrationFailure";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::UnknownBenchmark: return "UnknownBenchmark";
    case ErrorKind::MissingParameter: return "MissingParameter";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::NonUniformGrid: return "NonUniformGrid";
    case ErrorKind::EmptyData: return "EmptyData";
    case ErrorKind::ZeroColumn: return "ZeroColumn";
    case ErrorKind::EmptyNullSpace: return "EmptyNullSpace";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::DegenerateLambda: return "DegenerateLambda";
    case ErrorKind::RankDeficientActiveSet: return "RankDeficientActiveSet";
    case ErrorKind::AllTermsEliminated: return "AllTermsEliminated";
    case ErrorKind::NoValidCandidates: return "NoValidCandidates";
    case ErrorKind::EmptyFront: return "EmptyFront";
    case ErrorKind::NoDenominatorTerms: return "NoDenominatorTerms";
    case ErrorKind::DegreeOverflow: return "DegreeOverflow";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Schema: return "Schema";
  }
  return "Unknown";
}

int total_degree(const Exponents& e) noexcept { return std::accumulate(e.begin(), e.end(), 0); }

bool GradedLexLess::operator()(const Exponents& a, const Exponents& b) const noexcept {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  // Within a degree the larger exponent vector comes first.
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

double evaluate_monomial(const Exponents& e, std::span<const double> x) {
  double v = 1.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (int p = 0; p < e[i]; ++p) v *= x[i];
  }
  return v;
}

Polynomial Polynomial::constant(std::size_t n_vars, double c) {
  Polynomial p(n_vars);
  p.add_term(Exponents(n_vars, 0), c);
  return p;
}

Polynomial Polynomial::monomial(const Exponents& e, double c) {
  Polynomial p(e.size());
  p.add_term(e, c);
  return p;
}

int Polynomial::degree() const noexcept {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
  return d;
}

void Polynomial::check_arity(const Exponents& e) const {
  if (e.size() != n_vars_) {
    throw Error(ErrorKind::DimensionMismatch, "exponent vector of length " + std::to_string(e.size()) +
                                                  " in a polynomial over " + std::to_string(n_vars_) +
                                                  " variables");
  }
  for (int v : e) {
    if (v < 0) throw Error(ErrorKind::InvalidArgument, "negative exponent");
  }
}

double Polynomial::coeff(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Exponents& e, double c) {
  check_arity(e);
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

void Polynomial::set_term(const Exponents& e, double c) {
  check_arity(e);
  if (c == 0.0) {
    terms_.erase(e);
  } else {
    terms_[e] = c;
  }
}

double Polynomial::evaluate(std::span<const double> x) const {
  if (x.size() != n_vars_) {
    throw Error(ErrorKind::DimensionMismatch, "polynomial over " + std::to_string(n_vars_) +
                                                  " variables evaluated at a point of length " +
                                                  std::to_string(x.size()));
  }
  double s = 0.0;
  for (const auto& [e, c] : terms_) s += c * evaluate_monomial(e, x);
  return s;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (n_vars_ == 0 && terms_.empty()) n_vars_ = other.n_vars_;
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (n_vars_ == 0 && terms_.empty()) n_vars_ = other.n_vars_;
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.n_vars_ != b.n_vars_) {
    throw Error(ErrorKind::DimensionMismatch, "product of polynomials over different variable counts");
  }
  Polynomial out(a.n_vars_);
  Exponents e(a.n_vars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

double Polynomial::max_abs_difference(const Polynomial& a, const Polynomial& b) {
  double worst = 0.0;
  for (const auto& [e, c] : a.terms_) worst = std::max(worst, std::abs(c - b.coeff(e)));
  for (const auto& [e, c] : b.terms_) {
    if (!a.terms_.contains(e)) worst = std::max(worst, std::abs(c));
  }
  return worst;
}

std::string monomial_to_string(const Exponents& e, const std::vector<std::string>& names) {
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += i < names.size() ? names[i] : "x" + std::to_string(i + 1);
    if (e[i] > 1) s += "^" + std::to_string(e[i]);
  }
  return s.empty() ? "1" : s;
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(8);
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    if (total_degree(e) > 0) os << "*" << monomial_to_string(e, names);
  }
  return os.str();
}

}  // namespace isindy
