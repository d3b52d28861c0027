#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isindy/error.hpp"
#include "isindy/library.hpp"

namespace isindy {

struct NullSpaceBasis {
  Eigen::MatrixXd basis;            // p x r, orthonormal columns
  Eigen::VectorXd singular_values;  // all singular values, descending
  double rank_tol = 0.0;            // absolute threshold on singular values
  std::vector<std::string> warnings;

  Eigen::Index dim() const { return basis.cols(); }
  Eigen::Index ambient_dim() const { return basis.rows(); }
};

/// Right singular vectors whose singular values are <= rank_tol_rel * sigma_max.
/// Throws EmptyNullSpace when no singular value is that small.
NullSpaceBasis null_space_basis(const Eigen::Ref<const Eigen::MatrixXd>& theta, double rank_tol_rel = 1e-8);
NullSpaceBasis null_space_basis(const EvaluatedLibrary& theta, double rank_tol_rel = 1e-8);

/// sign(v) * max(|v| - lambda, 0), component-wise.
Eigen::VectorXd soft_threshold(const Eigen::Ref<const Eigen::VectorXd>& v, double lambda);

struct AdmConfig {
  int max_iters = 1000;
  double tol = 1e-6;
  /// Starting points tried per lambda; clamped to the ambient dimension.
  int n_initializations = 64;
  std::uint64_t seed = 0;
  /// Re-solves for the best vector in the subspace on the support found by the
  /// shrinkage iteration, removing the bias soft thresholding leaves behind.
  bool polish = true;
};

struct SparseCoefficients {
  Eigen::VectorXd xi;
  double lambda = 0.0;
  std::vector<bool> active;
  double residual = 0.0;
  std::size_t term_count = 0;
  bool converged = true;
  /// Set when this entry records a failure (e.g. DegenerateLambda in a sweep).
  std::optional<ErrorKind> error;
  std::vector<std::string> warnings;
  /// Initialization (row of N) that produced this result, -1 when not from ADM.
  int initialization = -1;

  bool ok() const { return !error.has_value(); }
};

/// Candidate ordering shared by ADM run selection and the Pareto front: fewer
/// terms first; at equal term count the smaller residual, unless both
/// residuals agree within a factor of 10 (or are both at round-off level), in
/// which case the lower total monomial degree wins. `degrees` may be empty.
bool is_preferred(const SparseCoefficients& a, const SparseCoefficients& b, const std::vector<int>& degrees);

/// Orients xi so that its largest-magnitude entry in [block_begin, end) is positive.
void apply_sign_convention(Eigen::Ref<Eigen::VectorXd> xi, std::size_t block_begin);

/// Sparsest vector in span(N) by alternating shrinkage and projection, started
/// from the largest-norm rows of N. Without a library, residuals are the
/// distance of xi from span(N) and the sign is fixed on the whole vector.
SparseCoefficients adm_sparsest_vector(const NullSpaceBasis& ns, double lambda, const AdmConfig& cfg = {});
/// As above with residuals ||theta xi||_2 / sqrt(m) and the sign fixed on the
/// derivative (denominator) block of the library.
SparseCoefficients adm_sparsest_vector(const EvaluatedLibrary& theta, const NullSpaceBasis& ns, double lambda,
                                       const AdmConfig& cfg = {});

/// One result per lambda, in grid order. Failing lambdas are recorded as
/// flagged entries instead of aborting the sweep.
std::vector<SparseCoefficients> lambda_sweep(const NullSpaceBasis& ns, const std::vector<double>& lambda_grid,
                                             const AdmConfig& cfg = {});
std::vector<SparseCoefficients> lambda_sweep(const EvaluatedLibrary& theta, const NullSpaceBasis& ns,
                                             const std::vector<double>& lambda_grid, const AdmConfig& cfg = {});

/// Logarithmically spaced grid from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// Sequentially thresholded least squares for theta * xi = xdot. Coefficients
/// are in the coordinates of theta's columns; residual is ||theta xi - xdot|| / sqrt(m).
SparseCoefficients stlsq(const Eigen::Ref<const Eigen::MatrixXd>& theta, const Eigen::Ref<const Eigen::VectorXd>& xdot,
                         double lambda, int max_iters = 25);
SparseCoefficients stlsq(const EvaluatedLibrary& theta, const Eigen::Ref<const Eigen::VectorXd>& xdot, double lambda,
                         int max_iters = 25);

/// Coordinate-descent LASSO: min 1/(2m) ||xdot - theta xi||^2 + lambda ||xi||_1.
SparseCoefficients lasso_cd(const Eigen::Ref<const Eigen::MatrixXd>& theta, const Eigen::Ref<const Eigen::VectorXd>& xdot,
                            double lambda, int max_iters = 10000, double tol = 1e-12);

enum class RegressionSolver { Stlsq, Lasso };

SparseCoefficients sparse_regression(RegressionSolver solver, const Eigen::Ref<const Eigen::MatrixXd>& theta,
                                     const Eigen::Ref<const Eigen::VectorXd>& xdot, double lambda);

}  // namespace isindy
