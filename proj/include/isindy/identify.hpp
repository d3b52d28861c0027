#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isindy/benchmarks.hpp"
#include "isindy/dynamics.hpp"
#include "isindy/selection.hpp"
#include "isindy/sparse.hpp"

namespace isindy {

struct IdentifyConfig {
  /// One plan per state; a single plan is applied to every state.
  std::vector<StatePlan> plans{StatePlan{}};
  double lambda_lo = 1e-5;
  double lambda_hi = 1.0;
  std::size_t lambda_count = 31;
  AdmConfig adm;
  double drop_threshold = 2.0;
  double prune_tol = 1e-4;
  RegressionSolver solver = RegressionSolver::Stlsq;
  /// Threshold of the explicit (regression) path, in raw coefficient units.
  double regression_lambda = 0.05;
  /// States identified concurrently.
  unsigned workers = 1;

  const StatePlan& plan_for(std::size_t k) const;
};

struct StateFailure {
  ErrorKind kind;
  std::string message;
};

struct StateResult {
  std::size_t state_index = 0;
  std::optional<StateIdentification> identification;
  std::optional<StateFailure> failure;
  std::vector<SparseCoefficients> sweep;
  std::vector<LibraryTerm> terms;
  std::optional<ParetoFront> front;
  std::optional<KneeSelection> knee;
};

struct IdentificationResult {
  std::vector<StateResult> states;

  bool all_failed() const;
  bool any_failed() const;
  /// Throws NoValidCandidates naming the first failed state when incomplete.
  IdentifiedModel model(std::vector<std::string> state_names = {}) const;
};

/// Identifies x_k' from the stacked trajectories of the dataset following the
/// state's plan. Failures are recorded in the result rather than thrown.
StateResult identify_state(const Dataset& data, std::size_t k, const IdentifyConfig& cfg);

IdentificationResult identify(const Dataset& data, const IdentifyConfig& cfg);

/// Identification defaults for a benchmark (per-state plans from its profile).
IdentifyConfig benchmark_identify_config(const BenchmarkProfile& profile);

}  // namespace isindy
