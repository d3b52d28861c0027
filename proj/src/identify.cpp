#include "isindy/identify.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "isindy/error.hpp"
#include "isindy/library.hpp"

namespace isindy {

const StatePlan& IdentifyConfig::plan_for(std::size_t k) const {
  if (plans.empty()) throw Error(ErrorKind::InvalidArgument, "identification config has no state plans");
  if (plans.size() == 1) return plans.front();
  if (k >= plans.size()) throw Error(ErrorKind::DimensionMismatch, "no plan for state " + std::to_string(k + 1));
  return plans[k];
}

bool IdentificationResult::all_failed() const {
  return std::all_of(states.begin(), states.end(), [](const StateResult& s) { return !s.identification; });
}

bool IdentificationResult::any_failed() const {
  return std::any_of(states.begin(), states.end(), [](const StateResult& s) { return !s.identification; });
}

IdentifiedModel IdentificationResult::model(std::vector<std::string> state_names) const {
  IdentifiedModel m;
  m.n_states = states.size();
  m.state_names = std::move(state_names);
  for (const auto& s : states) {
    if (!s.identification) {
      throw Error(ErrorKind::NoValidCandidates, "state " + std::to_string(s.state_index + 1) + " was not identified");
    }
    m.states.push_back(*s.identification);
  }
  return m;
}

namespace {

struct Rows {
  Eigen::MatrixXd states;
  Eigen::VectorXd xdot;
};

Rows training_rows(const Dataset& data, std::size_t k, std::size_t max_trajectories) {
  if (data.total_samples() == 0) throw Error(ErrorKind::EmptyData, "dataset has no samples");
  if (data.stacked_derivs.rows() != data.total_samples()) {
    throw Error(ErrorKind::EmptyData, "dataset has no derivatives; differentiate the trajectories first");
  }
  const auto col = static_cast<Eigen::Index>(k);
  if (col >= data.stacked_states.cols()) throw Error(ErrorKind::DimensionMismatch, "state index outside the dataset");
  Eigen::Index rows = data.total_samples();
  if (max_trajectories > 0 && max_trajectories < data.trajectories.size()) {
    rows = 0;
    for (std::size_t i = 0; i < max_trajectories; ++i) rows += data.trajectories[i].samples();
  }
  return Rows{data.stacked_states.topRows(rows), data.stacked_derivs.col(col).head(rows)};
}

LibrarySpec library_spec(LibraryMode mode, int degree, std::size_t k) {
  LibrarySpec spec;
  spec.mode = mode;
  spec.d_num = degree;
  spec.d_den = mode == LibraryMode::Explicit ? 0 : degree;
  spec.deriv_index = k;
  return spec;
}

void identify_explicit(const Rows& rows, std::size_t k, const StatePlan& plan, const IdentifyConfig& cfg,
                       StateResult& out) {
  const EvaluatedLibrary lib = build_explicit_library(rows.states, plan.degree);
  SparseCoefficients fit = sparse_regression(cfg.solver, lib.matrix, rows.xdot, cfg.regression_lambda);
  out.terms = lib.terms;

  Polynomial rhs(static_cast<std::size_t>(rows.states.cols()));
  for (Eigen::Index j = 0; j < fit.xi.size(); ++j) {
    if (fit.xi[j] != 0.0) rhs.add_term(lib.terms[static_cast<std::size_t>(j)].monomial.exponents, fit.xi[j]);
  }
  StateIdentification id;
  id.state_index = k;
  id.model = ExplicitStateModel{k, std::move(rhs)};
  auto& prov = id.provenance;
  prov.method = IdentificationMethod::Explicit;
  prov.library = library_spec(LibraryMode::Explicit, plan.degree, k);
  prov.lambda = fit.lambda;
  prov.residual = fit.residual;
  prov.term_count = fit.term_count;
  prov.samples = static_cast<std::size_t>(rows.states.rows());
  prov.warnings = fit.warnings;
  out.sweep = {std::move(fit)};
  out.identification = std::move(id);
}

void identify_implicit(const Rows& rows, std::size_t k, const StatePlan& plan, const IdentifyConfig& cfg,
                       StateResult& out) {
  const EvaluatedLibrary lib =
      normalize_columns(build_implicit_library(rows.states, rows.xdot, plan.degree, plan.degree, k));
  out.terms = lib.terms;
  const NullSpaceBasis ns = null_space_basis(lib, plan.rank_tol_rel);
  out.sweep = lambda_sweep(lib, ns, log_grid(cfg.lambda_lo, cfg.lambda_hi, cfg.lambda_count), cfg.adm);
  out.front = pareto_front(out.sweep, lib);
  out.knee = select_knee(*out.front, cfg.drop_threshold);

  RationalStateModel model = assemble_rational_model(out.knee->chosen, lib, cfg.prune_tol);
  model.state_index = k;
  StateIdentification id;
  id.state_index = k;
  auto& prov = id.provenance;
  prov.method = IdentificationMethod::Implicit;
  prov.library = library_spec(LibraryMode::Implicit, plan.degree, k);
  prov.lambda = out.knee->chosen.lambda;
  prov.residual = out.knee->chosen.residual;
  prov.term_count = out.knee->chosen.term_count;
  prov.samples = static_cast<std::size_t>(rows.states.rows());
  prov.null_space_dim = static_cast<std::size_t>(ns.dim());
  prov.cliff_decades = out.knee->cliff_decades;
  prov.no_cliff = out.knee->no_cliff;
  prov.warnings = ns.warnings;
  prov.warnings.insert(prov.warnings.end(), out.knee->warnings.begin(), out.knee->warnings.end());
  prov.warnings.insert(prov.warnings.end(), model.warnings.begin(), model.warnings.end());
  id.model = std::move(model);
  out.identification = std::move(id);
}

}  // namespace

StateResult identify_state(const Dataset& data, std::size_t k, const IdentifyConfig& cfg) {
  StateResult out;
  out.state_index = k;
  try {
    const StatePlan& plan = cfg.plan_for(k);
    const Rows rows = training_rows(data, k, plan.max_trajectories);
    if (plan.method == IdentificationMethod::Explicit) {
      identify_explicit(rows, k, plan, cfg, out);
      return out;
    }
    try {
      identify_implicit(rows, k, plan, cfg, out);
    } catch (const Error& e) {
      const bool retry = plan.method == IdentificationMethod::Auto &&
                         (e.kind() == ErrorKind::NoDenominatorTerms || e.kind() == ErrorKind::EmptyNullSpace);
      if (!retry) throw;
      StateResult fallback;
      fallback.state_index = k;
      identify_explicit(rows, k, plan, cfg, fallback);
      fallback.identification->provenance.warnings.insert(
          fallback.identification->provenance.warnings.begin(),
          std::string("implicit path failed (") + e.what() + "); identified by sparse regression");
      out = std::move(fallback);
    }
  } catch (const Error& e) {
    out.identification.reset();
    out.failure = StateFailure{e.kind(), e.what()};
  }
  return out;
}

IdentificationResult identify(const Dataset& data, const IdentifyConfig& cfg) {
  const auto n = static_cast<std::size_t>(data.stacked_states.cols());
  IdentificationResult result;
  result.states.resize(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(n)));
  if (workers == 1) {
    for (std::size_t k = 0; k < n; ++k) result.states[k] = identify_state(data, k, cfg);
    return result;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < n; k = next++) result.states[k] = identify_state(data, k, cfg);
      });
    }
  }
  return result;
}

IdentifyConfig benchmark_identify_config(const BenchmarkProfile& profile) {
  IdentifyConfig cfg;
  cfg.plans = profile.plans;
  return cfg;
}

}  // namespace isindy
