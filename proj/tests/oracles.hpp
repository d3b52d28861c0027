#pragma once

// Independent reference computations used by the tests. None of these call
// into the library code they are compared against.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

/// Binomial coefficient from Pascal's triangle.
std::uint64_t binomial(unsigned n, unsigned k);

/// Counts exponent tuples in [0, d]^n with total degree <= d by enumeration.
std::uint64_t count_monomials_by_enumeration(unsigned n, unsigned d);

/// Counts nonempty subsets of an n_items set by walking all bitmasks.
std::uint64_t count_nonempty_subsets(unsigned n_items);

/// Exponent tuples of degree <= d sorted by (degree ascending, then tuples
/// compared lexicographically in descending order).
std::vector<std::vector<int>> graded_lex_exponents(unsigned n, unsigned d);

/// prod_i x_i^{e_i} with std::pow.
double monomial_pow(const std::vector<int>& e, const double* x);

/// Implicit library [Theta(X), diag(xdot) Theta(X)] built column by column.
Eigen::MatrixXd implicit_library(const Eigen::MatrixXd& X, const Eigen::VectorXd& xdot, unsigned d);

struct SubsetFit {
  std::vector<int> support;
  Eigen::VectorXd coeffs;  // full length, zero off support
  double residual = 0.0;   // ||theta xi - y||_2
};

/// Least-squares fit over every support of exactly k columns; returns the best one.
SubsetFit best_subset(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y, int k);

/// Orthonormal basis of dimension r in R^p whose span contains `planted`.
Eigen::MatrixXd basis_containing(const Eigen::VectorXd& planted, int r, std::mt19937_64& rng);

/// k-sparse unit vector with random support and signs, entries bounded away from zero.
Eigen::VectorXd sparse_unit_vector(int p, int k, std::mt19937_64& rng);

/// Real root of v^3 - x v - x^2 = 0 nearest to `guess`, by safeguarded Newton.
double implicit_cubic_root(double x, double guess);

struct ScalarTrajectory {
  Eigen::VectorXd t;
  Eigen::VectorXd x;
  Eigen::VectorXd xdot;
};

/// Classical RK4 for x' = v(x) where v solves v^3 x - v x^2 - x^3 = 0 at every
/// stage; the recorded derivative is the root at each sample.
ScalarTrajectory implicit_cubic_trajectory(double x0, double t1, int samples, int substeps);

/// Minimizes f by plain gradient descent with backtracking and a finite-difference gradient.
Eigen::VectorXd minimize_numerically(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0,
                                     int iters);

/// Smoothed-TV objective written directly from its definition on interval slopes u:
/// 0.5 * sum_i (dt * sum_{j<=i} u_j - (f_{i+1} - f_0))^2 + alpha * sum_j sqrt((u_{j+1}-u_j)^2 + eps).
double tv_objective_direct(const Eigen::VectorXd& u, const Eigen::VectorXd& f, double dt, double alpha, double eps);

}  // namespace oracle
