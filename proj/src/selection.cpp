#include "isindy/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isindy/error.hpp"

namespace isindy {

namespace {

std::vector<int> term_degrees(const EvaluatedLibrary& lib) {
  std::vector<int> d;
  d.reserve(lib.terms.size());
  for (const auto& t : lib.terms) d.push_back(t.monomial.degree());
  return d;
}

double safe_log10(double v) { return std::log10(std::max(v, std::numeric_limits<double>::min())); }

// Residuals below this are round-off and count as equal to the front minimum.
constexpr double kResidualFloor = 1e-12;

}  // namespace

ParetoFront pareto_front(const std::vector<SparseCoefficients>& candidates, const std::vector<int>& degrees) {
  std::map<std::size_t, const SparseCoefficients*> best;
  for (const auto& c : candidates) {
    if (!c.ok() || c.term_count == 0) continue;
    auto it = best.find(c.term_count);
    if (it == best.end() || is_preferred(c, *it->second, degrees)) best[c.term_count] = &c;
  }
  if (best.empty()) throw Error(ErrorKind::NoValidCandidates, "no usable candidate for a Pareto front");
  ParetoFront front;
  for (const auto& [count, c] : best) front.points.push_back(ParetoPoint{count, c->residual, c->lambda, *c});
  return front;
}

ParetoFront pareto_front(const std::vector<SparseCoefficients>& candidates, const EvaluatedLibrary& lib) {
  return pareto_front(candidates, term_degrees(lib));
}

KneeSelection select_knee(const ParetoFront& front, double drop_threshold) {
  if (front.points.empty()) throw Error(ErrorKind::EmptyFront, "cannot select from an empty Pareto front");
  KneeSelection sel;
  if (front.points.size() == 1) {
    sel.chosen = front.points[0].candidate;
    sel.no_cliff = true;
    sel.warnings.push_back("NoCliff: Pareto front has a single point");
    return sel;
  }

  double min_res = std::numeric_limits<double>::infinity();
  std::size_t min_idx = 0;
  for (std::size_t i = 0; i < front.points.size(); ++i) {
    if (front.points[i].residual < min_res) {
      min_res = front.points[i].residual;
      min_idx = i;
    }
  }

  const double acceptable = 10.0 * std::max(min_res, kResidualFloor);
  for (std::size_t i = 1; i < front.points.size(); ++i) {
    const double drop = safe_log10(front.points[i - 1].residual) - safe_log10(front.points[i].residual);
    if (drop >= drop_threshold && front.points[i].residual <= acceptable) {
      sel.chosen = front.points[i].candidate;
      sel.point_index = i;
      sel.cliff_decades = drop;
      return sel;
    }
  }

  sel.chosen = front.points[min_idx].candidate;
  sel.point_index = min_idx;
  sel.no_cliff = true;
  if (min_idx > 0) {
    sel.cliff_decades =
        safe_log10(front.points[min_idx - 1].residual) - safe_log10(front.points[min_idx].residual);
  }
  sel.warnings.push_back("NoCliff: no residual drop of " + std::to_string(drop_threshold) +
                         " decades; selected the smallest-residual point");
  return sel;
}

std::string_view to_string(Normalization n) noexcept {
  return n == Normalization::ConstantDenominator ? "constant_denominator" : "lowest_degree_fallback";
}

namespace {

/// Divides both polynomials by the denominator constant, or by the first
/// (lowest graded-lex) denominator term when the constant is absent.
Normalization normalize_pair(Polynomial& num, Polynomial& den) {
  if (den.is_zero()) throw Error(ErrorKind::NoDenominatorTerms, "denominator has no terms");
  const Exponents zero(den.n_vars(), 0);
  double pivot = den.coeff(zero);
  Normalization how = Normalization::ConstantDenominator;
  if (pivot == 0.0) {
    pivot = den.terms().begin()->second;
    how = Normalization::LowestDegreeFallback;
  }
  num *= 1.0 / pivot;
  den *= 1.0 / pivot;
  return how;
}

}  // namespace

Fraction normalized_fraction(const StateRhs& rhs) {
  Fraction f = rhs.combined();
  normalize_pair(f.numerator, f.denominator);
  return f;
}

RationalStateModel assemble_rational_model(const Eigen::Ref<const Eigen::VectorXd>& xi, const EvaluatedLibrary& lib,
                                           double prune_tol) {
  if (lib.mode != LibraryMode::Implicit) {
    throw Error(ErrorKind::InvalidArgument, "rational models are assembled from implicit libraries only");
  }
  if (xi.size() != lib.cols()) throw Error(ErrorKind::DimensionMismatch, "coefficient vector does not match library");
  const std::size_t n = lib.terms.empty() ? 0 : lib.terms.front().monomial.exponents.size();

  double max_num = 0.0, max_den = 0.0;
  for (Eigen::Index j = 0; j < xi.size(); ++j) {
    (lib.terms[static_cast<std::size_t>(j)].in_denominator_block() ? max_den : max_num) =
        std::max(lib.terms[static_cast<std::size_t>(j)].in_denominator_block() ? max_den : max_num, std::abs(xi[j]));
  }

  RationalStateModel model;
  model.numerator = Polynomial(n);
  model.denominator = Polynomial(n);
  for (Eigen::Index j = 0; j < xi.size(); ++j) {
    const auto& term = lib.terms[static_cast<std::size_t>(j)];
    const bool den = term.in_denominator_block();
    if (xi[j] == 0.0 || std::abs(xi[j]) < prune_tol * (den ? max_den : max_num)) continue;
    const double c = xi[j] / lib.column_scales[j];
    if (den) {
      model.state_index = term.deriv_index;
      model.denominator.add_term(term.monomial.exponents, -c);
    } else {
      model.numerator.add_term(term.monomial.exponents, c);
    }
  }
  if (model.denominator.is_zero()) {
    throw Error(ErrorKind::NoDenominatorTerms,
                "no active derivative term; the state may be polynomial (retry with sparse regression)");
  }
  if (model.state_index == 0) {
    const std::size_t den_begin = lib.denominator_begin();
    if (den_begin < lib.terms.size()) model.state_index = lib.terms[den_begin].deriv_index;
  }
  model.normalization = normalize_pair(model.numerator, model.denominator);
  if (model.normalization == Normalization::LowestDegreeFallback) {
    model.warnings.push_back("ZeroConstantDenominator: normalized by the lowest-degree denominator term");
  }
  if (model.numerator.is_zero()) model.warnings.push_back("all numerator terms pruned; model is x' = 0");
  return model;
}

RationalStateModel assemble_rational_model(const SparseCoefficients& xi, const EvaluatedLibrary& lib,
                                           double prune_tol) {
  return assemble_rational_model(xi.xi, lib, prune_tol);
}

Eigen::VectorXd implicit_coefficients(const OdeModel& model, std::size_t k, const std::vector<LibraryTerm>& terms,
                                      const Eigen::VectorXd& column_scales) {
  if (k >= model.n_states) throw Error(ErrorKind::DimensionMismatch, "state index outside the model");
  if (static_cast<Eigen::Index>(terms.size()) != column_scales.size()) {
    throw Error(ErrorKind::DimensionMismatch, "term list and column scales differ in length");
  }
  const Fraction f = normalized_fraction(model.rhs[k]);

  Eigen::VectorXd xi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(terms.size()));
  std::size_t den_begin = terms.size();
  auto place = [&](const Exponents& e, int power, double c) {
    for (std::size_t j = 0; j < terms.size(); ++j) {
      const auto& t = terms[j];
      if (!t.trig && t.deriv_power == power && (power == 0 || t.deriv_index == k) && t.monomial.exponents == e) {
        xi[static_cast<Eigen::Index>(j)] = c * column_scales[static_cast<Eigen::Index>(j)];
        return;
      }
    }
    throw Error(ErrorKind::DegreeOverflow, "library lacks the term " + monomial_to_string(e) +
                                               (power > 0 ? " times the derivative" : "") + " required by state " +
                                               std::to_string(k + 1));
  };
  for (const auto& [e, c] : f.numerator.terms()) place(e, 0, c);
  for (const auto& [e, c] : f.denominator.terms()) place(e, 1, -c);
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (terms[j].in_denominator_block()) {
      den_begin = j;
      break;
    }
  }
  xi /= xi.norm();
  apply_sign_convention(xi, den_begin < terms.size() ? den_begin : 0);
  return xi;
}

Eigen::VectorXd implicit_coefficients(const OdeModel& model, std::size_t k, const EvaluatedLibrary& lib) {
  return implicit_coefficients(model, k, lib.terms, lib.column_scales);
}

Eigen::VectorXd implicit_coefficients(const OdeModel& model, std::size_t k, const LibrarySpec& spec) {
  std::vector<LibraryTerm> terms = spec.mode == LibraryMode::Mixed
                                       ? mixed_terms(model.n_states, spec.d_num, spec.d_deriv, k)
                                       : implicit_terms(model.n_states, spec.d_num, spec.d_den, k);
  return implicit_coefficients(model, k, terms, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(terms.size())));
}

Fraction StateIdentification::as_fraction() const {
  if (const auto* r = std::get_if<RationalStateModel>(&model)) return r->as_fraction();
  const auto& e = std::get<ExplicitStateModel>(model);
  return Fraction::polynomial(e.rhs);
}

OdeModel IdentifiedModel::to_ode_model() const {
  OdeModel m;
  m.n_states = n_states;
  m.state_names = state_names;
  m.rhs.resize(n_states);
  for (const auto& s : states) m.rhs.at(s.state_index) = StateRhs{{s.as_fraction()}};
  m.validate();
  return m;
}

std::vector<std::optional<Fraction>> IdentifiedModel::normalized_states() const {
  std::vector<std::optional<Fraction>> out(n_states);
  for (const auto& s : states) out.at(s.state_index) = s.as_fraction();
  return out;
}

double ValidationReport::worst_parameter_error() const {
  double w = 0.0;
  for (const auto& p : parameters) w = std::max(w, p.relative_error);
  return w;
}

double ValidationReport::worst_trajectory_error() const {
  double w = 0.0;
  for (const auto& t : trajectories) {
    if (t.diverged) return std::numeric_limits<double>::infinity();
    for (double e : t.max_relative_error) w = std::max(w, e);
  }
  return w;
}

ValidationReport validate_model(const IdentifiedModel& identified, const OdeModel& truth,
                                const std::vector<Eigen::VectorXd>& test_ics,
                                const Eigen::Ref<const Eigen::VectorXd>& t_grid, const BenchmarkProfile* profile,
                                const IntegratorConfig& cfg) {
  if (identified.n_states != truth.n_states) {
    throw Error(ErrorKind::DimensionMismatch, "identified and true models differ in state count");
  }
  const OdeModel model = identified.to_ode_model();
  ValidationReport report;
  for (std::size_t i = 0; i < test_ics.size(); ++i) {
    TrajectoryComparison cmp;
    cmp.ic_index = i;
    try {
      const Trajectory ref = simulate(truth, test_ics[i], t_grid, cfg);
      const Trajectory fit = simulate(model, test_ics[i], t_grid, cfg);
      for (Eigen::Index j = 0; j < ref.n_states(); ++j) {
        const double scale = std::max(ref.states.col(j).cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
        cmp.max_relative_error.push_back((fit.states.col(j) - ref.states.col(j)).cwiseAbs().maxCoeff() / scale);
      }
    } catch (const Error& e) {
      cmp.diverged = true;
      cmp.message = std::string("SimulationDivergence: ") + e.what();
    }
    report.trajectories.push_back(std::move(cmp));
  }

  if (profile) {
    const ParameterMap extracted = extract_parameters(*profile, identified.normalized_states());
    for (const auto& c : profile->correspondences) {
      auto t = truth.params.find(c.name);
      auto x = extracted.find(c.name);
      if (t == truth.params.end() || x == extracted.end()) continue;
      report.parameters.push_back(ParameterError{c.name, t->second, x->second,
                                                 std::abs(x->second - t->second) / std::abs(t->second)});
    }
  }
  return report;
}

}  // namespace isindy
