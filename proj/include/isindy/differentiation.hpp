#pragma once

#include <Eigen/Dense>
#include <vector>

namespace isindy {

enum class DiffMethod { Central, TvRegularized };

struct DiffConfig {
  DiffMethod method = DiffMethod::Central;
  double alpha = 1e-3;  // TV weight, must be > 0 for the TV method
  int max_iters = 200;
  double tol = 1e-8;
  double epsilon = 1e-8;  // smoothing of |.| inside the TV term
};

/// Second-order finite differences on a possibly non-uniform grid: three-point
/// central stencils inside, one-sided three-point stencils at both ends.
Eigen::VectorXd central_difference(const Eigen::Ref<const Eigen::VectorXd>& times,
                                   const Eigen::Ref<const Eigen::VectorXd>& series);

struct TvResult {
  Eigen::VectorXd derivative;        // at the sample times
  Eigen::VectorXd interval_slopes;   // one value per sampling interval
  std::vector<double> objective;     // smoothed objective after each iteration (first entry: start)
  int iterations = 0;
  bool converged = false;
};

/// Total-variation regularized derivative. Minimizes
///   alpha * sum_k sqrt((u_{k+1} - u_k)^2 + eps) + 1/2 * ||A u - (f - f_0)||^2
/// over interval slopes u, where A is cumulative integration on the uniform
/// grid, by lagged-diffusivity fixed-point iteration. Each iteration solves a
/// banded SPD system directly. Nodal values average the adjacent slopes.
TvResult tv_derivative(const Eigen::Ref<const Eigen::VectorXd>& times, const Eigen::Ref<const Eigen::VectorXd>& series,
                       const DiffConfig& cfg);

/// Smoothed TV objective for given interval slopes (used by tests and the solver).
double tv_objective(const Eigen::Ref<const Eigen::VectorXd>& slopes, const Eigen::Ref<const Eigen::VectorXd>& target,
                    double dt, double alpha, double epsilon);

/// Applies the configured method column by column.
Eigen::MatrixXd differentiate(const Eigen::Ref<const Eigen::VectorXd>& times,
                              const Eigen::Ref<const Eigen::MatrixXd>& states, const DiffConfig& cfg);

}  // namespace isindy
