#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "isindy/benchmarks.hpp"
#include "isindy/dynamics.hpp"
#include "isindy/library.hpp"
#include "isindy/sparse.hpp"

namespace isindy {

struct ParetoPoint {
  std::size_t term_count = 0;
  double residual = 0.0;
  double lambda = 0.0;
  SparseCoefficients candidate;
};

struct ParetoFront {
  std::vector<ParetoPoint> points;  // term_count strictly increasing
};

/// Best candidate per term count (see is_preferred), sorted by term count.
/// Failed and empty candidates are skipped; throws NoValidCandidates if none remain.
ParetoFront pareto_front(const std::vector<SparseCoefficients>& candidates, const std::vector<int>& degrees = {});
ParetoFront pareto_front(const std::vector<SparseCoefficients>& candidates, const EvaluatedLibrary& lib);

struct KneeSelection {
  SparseCoefficients chosen;
  std::size_t point_index = 0;
  /// log10 drop in residual entering the chosen point (0 when none).
  double cliff_decades = 0.0;
  bool no_cliff = false;
  std::vector<std::string> warnings;
};

/// Sparsest front point that follows a residual drop of at least
/// `drop_threshold` decades and lies within a factor 10 of the smallest
/// residual on the front (residuals under 1e-12 count as round-off). Falls back to the smallest-residual point (NoCliff).
KneeSelection select_knee(const ParetoFront& front, double drop_threshold = 2.0);

enum class Normalization { ConstantDenominator, LowestDegreeFallback };

std::string_view to_string(Normalization n) noexcept;

struct RationalStateModel {
  std::size_t state_index = 0;
  Polynomial numerator;
  Polynomial denominator;
  Normalization normalization = Normalization::ConstantDenominator;
  std::vector<std::string> warnings;

  Fraction as_fraction() const { return Fraction{numerator, denominator}; }
};

/// Splits an implicit-library coefficient vector into the numerator and
/// denominator polynomials of x_k' = N(x) / D(x), undoing column scaling and
/// normalizing the denominator constant to one. Coefficients whose scaled
/// magnitude is below prune_tol times the largest entry of their block are dropped.
RationalStateModel assemble_rational_model(const Eigen::Ref<const Eigen::VectorXd>& xi, const EvaluatedLibrary& lib,
                                           double prune_tol = 1e-3);
RationalStateModel assemble_rational_model(const SparseCoefficients& xi, const EvaluatedLibrary& lib,
                                           double prune_tol = 1e-3);

/// The coefficient vector a perfect identification of state k recovers on a
/// library with these terms and column scales: the denominators of the true
/// right-hand side are cleared, the vector is scaled into library
/// coordinates, unit-normalized and sign-fixed. Throws DegreeOverflow when a
/// required term is missing from the library.
Eigen::VectorXd implicit_coefficients(const OdeModel& model, std::size_t k, const std::vector<LibraryTerm>& terms,
                                      const Eigen::VectorXd& column_scales);
Eigen::VectorXd implicit_coefficients(const OdeModel& model, std::size_t k, const EvaluatedLibrary& lib);
Eigen::VectorXd implicit_coefficients(const OdeModel& model, std::size_t k, const LibrarySpec& spec);

/// Cleared and normalized (denominator constant 1) form of a true state.
Fraction normalized_fraction(const StateRhs& rhs);

struct ExplicitStateModel {
  std::size_t state_index = 0;
  Polynomial rhs;
};

struct StateProvenance {
  IdentificationMethod method = IdentificationMethod::Implicit;
  LibrarySpec library;
  double lambda = 0.0;
  double residual = 0.0;
  std::size_t term_count = 0;
  std::size_t samples = 0;
  std::size_t null_space_dim = 0;
  double cliff_decades = 0.0;
  bool no_cliff = false;
  std::vector<std::string> warnings;
};

struct StateIdentification {
  std::size_t state_index = 0;
  std::variant<RationalStateModel, ExplicitStateModel> model;
  StateProvenance provenance;

  Fraction as_fraction() const;
};

struct IdentifiedModel {
  std::size_t n_states = 0;
  std::vector<StateIdentification> states;  // one per state, in state order
  std::vector<std::string> state_names;

  OdeModel to_ode_model() const;
  std::vector<std::optional<Fraction>> normalized_states() const;
};

struct ParameterError {
  std::string name;
  double true_value = 0.0;
  double extracted = 0.0;
  double relative_error = 0.0;
};

struct TrajectoryComparison {
  std::size_t ic_index = 0;
  bool diverged = false;
  std::string message;
  std::vector<double> max_relative_error;  // per state
};

struct ValidationReport {
  std::vector<TrajectoryComparison> trajectories;
  std::vector<ParameterError> parameters;

  double worst_parameter_error() const;
  double worst_trajectory_error() const;
};

/// Simulates identified and true models from held-out initial conditions and
/// compares trajectories; parameters are compared through `profile` when given.
/// Relative trajectory error is max_t |x_id - x_true| / max_t |x_true| per state.
ValidationReport validate_model(const IdentifiedModel& identified, const OdeModel& truth,
                                const std::vector<Eigen::VectorXd>& test_ics,
                                const Eigen::Ref<const Eigen::VectorXd>& t_grid,
                                const BenchmarkProfile* profile = nullptr, const IntegratorConfig& cfg = {});

}  // namespace isindy
