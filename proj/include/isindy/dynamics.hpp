#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isindy/polynomial.hpp"

namespace isindy {

/// numerator / denominator. A polynomial term has the constant denominator 1.
struct Fraction {
  Polynomial numerator;
  Polynomial denominator;

  static Fraction polynomial(Polynomial p);
};

/// Right-hand side of one state: a sum of fractions, kept in the written form of
/// the model (e.g. a1 + a2 x^2/(a3 + x^2) - x/(1 + x + y) is three fractions).
struct StateRhs {
  std::vector<Fraction> fractions;

  bool is_polynomial() const;
  /// Brings all fractions over one common denominator by exact polynomial
  /// arithmetic. Fractions with identical denominators share a factor.
  Fraction combined() const;
};

struct OdeModel {
  std::size_t n_states = 0;
  std::vector<StateRhs> rhs;
  std::map<std::string, double> params;
  std::vector<std::string> state_names;

  /// Checks arity of every term and that no denominator is identically zero.
  void validate() const;
  std::string state_name(std::size_t k) const;
};

Eigen::VectorXd evaluate_rhs(const OdeModel& model, const Eigen::Ref<const Eigen::VectorXd>& state);
double evaluate_state_rhs(const OdeModel& model, std::size_t k, std::span<const double> state);

enum class TrajectorySource { SimulatedExact, Differentiated, Measured };

struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXd states;                 // m x n, one row per sample
  std::optional<Eigen::MatrixXd> derivs;  // m x n when present
  TrajectorySource source = TrajectorySource::Measured;

  Eigen::Index samples() const { return states.rows(); }
  Eigen::Index n_states() const { return states.cols(); }
  void validate() const;
};

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 1e-4;
  /// When set, integrates with a constant step of this size instead of the
  /// adaptive controller (used for convergence-order checks).
  std::optional<double> fixed_step;
  /// Steps allowed between two consecutive output times.
  std::size_t max_steps_between_outputs = 200000;
};

Trajectory simulate(const OdeModel& model, const Eigen::Ref<const Eigen::VectorXd>& ic,
                    const Eigen::Ref<const Eigen::VectorXd>& t_grid, const IntegratorConfig& cfg = {});

struct Dataset {
  std::vector<Trajectory> trajectories;
  Eigen::MatrixXd stacked_states;
  Eigen::MatrixXd stacked_derivs;

  /// Rebuilds the stacked matrices from the trajectories in order.
  void restack(std::size_t n_states);
  Eigen::Index total_samples() const { return stacked_states.rows(); }
};

Dataset make_dataset(std::vector<Trajectory> trajectories, std::size_t n_states);

/// Simulates one trajectory per initial condition. Trajectories are integrated
/// concurrently when `workers` > 1; the result order always follows `ics`.
Dataset generate_dataset(const OdeModel& model, const std::vector<Eigen::VectorXd>& ics,
                         const Eigen::Ref<const Eigen::VectorXd>& t_grid, const IntegratorConfig& cfg = {},
                         unsigned workers = 1);

Eigen::VectorXd uniform_grid(double t0, double t1, Eigen::Index samples);

}  // namespace isindy
