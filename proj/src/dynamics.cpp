#include "isindy/dynamics.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <exception>
#include <thread>

#include "isindy/error.hpp"

namespace isindy {

namespace odeint = boost::numeric::odeint;

Fraction Fraction::polynomial(Polynomial p) {
  const std::size_t n = p.n_vars();
  return Fraction{std::move(p), Polynomial::constant(n, 1.0)};
}

bool StateRhs::is_polynomial() const {
  for (const auto& f : fractions) {
    if (f.denominator.degree() > 0) return false;
  }
  return true;
}

Fraction StateRhs::combined() const {
  if (fractions.empty()) throw Error(ErrorKind::InvalidArgument, "state right-hand side has no terms");
  const std::size_t n = fractions.front().numerator.n_vars();

  // Group numerators by identical denominator.
  std::vector<Fraction> groups;
  for (const auto& f : fractions) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Fraction& g) { return g.denominator == f.denominator; });
    if (it == groups.end()) {
      groups.push_back(f);
    } else {
      it->numerator += f.numerator;
    }
  }

  Fraction out{Polynomial(n), Polynomial::constant(n, 1.0)};
  for (const auto& g : groups) out.denominator = out.denominator * g.denominator;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    Polynomial term = groups[i].numerator;
    for (std::size_t j = 0; j < groups.size(); ++j) {
      if (j != i) term = term * groups[j].denominator;
    }
    out.numerator += term;
  }
  return out;
}

std::string OdeModel::state_name(std::size_t k) const {
  return k < state_names.size() ? state_names[k] : "x" + std::to_string(k + 1);
}

void OdeModel::validate() const {
  if (n_states == 0) throw Error(ErrorKind::InvalidArgument, "model has no states");
  if (rhs.size() != n_states) {
    throw Error(ErrorKind::DimensionMismatch, "model declares " + std::to_string(n_states) + " states but has " +
                                                  std::to_string(rhs.size()) + " right-hand sides");
  }
  for (std::size_t k = 0; k < rhs.size(); ++k) {
    if (rhs[k].fractions.empty()) {
      throw Error(ErrorKind::InvalidArgument, "state " + std::to_string(k + 1) + " has an empty right-hand side");
    }
    for (const auto& f : rhs[k].fractions) {
      if (f.numerator.n_vars() != n_states || f.denominator.n_vars() != n_states) {
        throw Error(ErrorKind::DimensionMismatch,
                    "state " + std::to_string(k + 1) + " references a polynomial of the wrong arity");
      }
      if (f.denominator.is_zero()) {
        throw Error(ErrorKind::DenominatorZero, "state " + std::to_string(k + 1) + " has a zero denominator");
      }
    }
  }
}

double evaluate_state_rhs(const OdeModel& model, std::size_t k, std::span<const double> state) {
  double s = 0.0;
  for (const auto& f : model.rhs[k].fractions) {
    const double den = f.denominator.evaluate(state);
    if (den == 0.0 || !std::isfinite(den)) {
      throw Error(ErrorKind::DenominatorZero, "denominator of state " + std::to_string(k + 1) + " vanishes");
    }
    s += f.numerator.evaluate(state) / den;
  }
  return s;
}

Eigen::VectorXd evaluate_rhs(const OdeModel& model, const Eigen::Ref<const Eigen::VectorXd>& state) {
  if (static_cast<std::size_t>(state.size()) != model.n_states || model.rhs.size() != model.n_states) {
    throw Error(ErrorKind::DimensionMismatch, "state of length " + std::to_string(state.size()) +
                                                  " for a model with " + std::to_string(model.n_states) +
                                                  " states");
  }
  const Eigen::VectorXd x = state;
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  Eigen::VectorXd out(x.size());
  for (std::size_t k = 0; k < model.n_states; ++k) out[static_cast<Eigen::Index>(k)] = evaluate_state_rhs(model, k, xs);
  return out;
}

void Trajectory::validate() const {
  if (times.size() != states.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "trajectory has " + std::to_string(times.size()) + " times but " +
                                                  std::to_string(states.rows()) + " state rows");
  }
  for (Eigen::Index i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "trajectory times are not strictly increasing");
    }
  }
  if (derivs && (derivs->rows() != states.rows() || derivs->cols() != states.cols())) {
    throw Error(ErrorKind::DimensionMismatch, "derivative matrix shape differs from state matrix");
  }
}

namespace {

using OdeState = std::vector<double>;

void check_grid(const Eigen::Ref<const Eigen::VectorXd>& t_grid) {
  if (t_grid.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty time grid");
  for (Eigen::Index i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw Error(ErrorKind::InvalidArgument, "time grid is not strictly increasing");
  }
}

}  // namespace

Trajectory simulate(const OdeModel& model, const Eigen::Ref<const Eigen::VectorXd>& ic,
                    const Eigen::Ref<const Eigen::VectorXd>& t_grid, const IntegratorConfig& cfg) {
  model.validate();
  if (static_cast<std::size_t>(ic.size()) != model.n_states) {
    throw Error(ErrorKind::DimensionMismatch, "initial condition of length " + std::to_string(ic.size()) +
                                                  " for a model with " + std::to_string(model.n_states) +
                                                  " states");
  }
  check_grid(t_grid);

  const auto n = static_cast<Eigen::Index>(model.n_states);
  const Eigen::Index m = t_grid.size();
  Trajectory traj;
  traj.times = t_grid;
  traj.states.resize(m, n);
  traj.source = TrajectorySource::SimulatedExact;

  auto system = [&model](const OdeState& x, OdeState& dxdt, double /*t*/) {
    for (double v : x) {
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteState, "state became non-finite");
    }
    dxdt.resize(x.size());
    for (std::size_t k = 0; k < model.n_states; ++k) dxdt[k] = evaluate_state_rhs(model, k, x);
  };

  Eigen::Index row = 0;
  auto observer = [&](const OdeState& x, double /*t*/) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!std::isfinite(x[static_cast<std::size_t>(j)])) {
        throw Error(ErrorKind::NonFiniteState, "state became non-finite at sample " + std::to_string(row));
      }
      traj.states(row, j) = x[static_cast<std::size_t>(j)];
    }
    ++row;
  };

  OdeState x(ic.data(), ic.data() + ic.size());
  std::vector<double> times(t_grid.data(), t_grid.data() + m);
  try {
    if (cfg.fixed_step) {
      odeint::runge_kutta_dopri5<OdeState> stepper;
      odeint::integrate_times(stepper, system, x, times.begin(), times.end(), *cfg.fixed_step, observer);
    } else {
      auto stepper = odeint::make_dense_output(cfg.abs_tol, cfg.rel_tol, odeint::runge_kutta_dopri5<OdeState>());
      odeint::integrate_times(stepper, system, x, times.begin(), times.end(), cfg.initial_step, observer,
                              odeint::max_step_checker(static_cast<int>(cfg.max_steps_between_outputs)));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NonFiniteState) throw;
    throw Error(ErrorKind::IntegrationFailure, e.what());
  } catch (const odeint::odeint_error& e) {
    throw Error(ErrorKind::IntegrationFailure, e.what());
  }
  if (row != m) throw Error(ErrorKind::IntegrationFailure, "integrator stopped before the end of the time grid");

  Eigen::MatrixXd derivs(m, n);
  for (Eigen::Index i = 0; i < m; ++i) derivs.row(i) = evaluate_rhs(model, traj.states.row(i).transpose()).transpose();
  traj.derivs = std::move(derivs);
  return traj;
}

void Dataset::restack(std::size_t n_states) {
  Eigen::Index rows = 0;
  for (const auto& t : trajectories) rows += t.samples();
  const auto n = static_cast<Eigen::Index>(n_states);
  stacked_states.resize(rows, n);
  stacked_derivs.resize(rows, n);
  bool have_derivs = true;
  Eigen::Index r = 0;
  for (const auto& t : trajectories) {
    if (t.n_states() != n) throw Error(ErrorKind::DimensionMismatch, "trajectory state count differs from dataset");
    stacked_states.middleRows(r, t.samples()) = t.states;
    if (t.derivs) {
      stacked_derivs.middleRows(r, t.samples()) = *t.derivs;
    } else {
      have_derivs = false;
    }
    r += t.samples();
  }
  if (!have_derivs) stacked_derivs.resize(0, n);
}

Dataset make_dataset(std::vector<Trajectory> trajectories, std::size_t n_states) {
  Dataset ds;
  ds.trajectories = std::move(trajectories);
  ds.restack(n_states);
  return ds;
}

Dataset generate_dataset(const OdeModel& model, const std::vector<Eigen::VectorXd>& ics,
                         const Eigen::Ref<const Eigen::VectorXd>& t_grid, const IntegratorConfig& cfg,
                         unsigned workers) {
  std::vector<Trajectory> out(ics.size());
  std::vector<std::exception_ptr> errors(ics.size());
  const Eigen::VectorXd grid = t_grid;

  auto run = [&](std::size_t i) {
    try {
      out[i] = simulate(model, ics[i], grid, cfg);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(ics.size(), 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < ics.size(); ++i) run(i);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < ics.size(); i += workers) run(i);
      });
    }
  }

  for (std::size_t i = 0; i < ics.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), "initial condition " + std::to_string(i) + ": " + e.what());
    }
  }
  return make_dataset(std::move(out), model.n_states);
}

Eigen::VectorXd uniform_grid(double t0, double t1, Eigen::Index samples) {
  if (samples < 1) throw Error(ErrorKind::InvalidArgument, "time grid needs at least one sample");
  if (samples == 1) return Eigen::VectorXd::Constant(1, t0);
  return Eigen::VectorXd::LinSpaced(samples, t0, t1);
}

}  // namespace isindy
