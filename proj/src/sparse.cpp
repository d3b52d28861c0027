#include "isindy/sparse.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace isindy {

NullSpaceBasis null_space_basis(const Eigen::Ref<const Eigen::MatrixXd>& theta, double rank_tol_rel) {
  if (!(rank_tol_rel > 0.0)) throw Error(ErrorKind::InvalidArgument, "rank tolerance must be positive");
  const Eigen::Index m = theta.rows();
  const Eigen::Index p = theta.cols();
  if (m == 0 || p == 0) throw Error(ErrorKind::EmptyData, "null space of an empty matrix");
  if (!theta.allFinite()) throw Error(ErrorKind::NumericalFailure, "library contains non-finite entries");

  NullSpaceBasis ns;
  Eigen::MatrixXd V;
  if (m > p) {
    // Tall: reduce to the p x p triangular factor first; the right singular
    // pairs of R and theta coincide.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(theta);
    const Eigen::MatrixXd R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(R, Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "SVD did not converge");
    ns.singular_values = svd.singularValues();
    V = svd.matrixV();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(theta, Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "SVD did not converge");
    ns.singular_values = svd.singularValues();
    V = svd.matrixV();
    ns.warnings.push_back("underdetermined library: " + std::to_string(m) + " samples for " + std::to_string(p) +
                          " columns");
  }

  const double sigma_max = ns.singular_values.size() > 0 ? ns.singular_values[0] : 0.0;
  ns.rank_tol = rank_tol_rel * sigma_max;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < ns.singular_values.size(); ++i) {
    if (ns.singular_values[i] > ns.rank_tol) ++rank;
  }
  const Eigen::Index r = p - rank;
  if (r == 0) {
    throw Error(ErrorKind::EmptyNullSpace,
                "no singular value below " + std::to_string(rank_tol_rel) +
                    " * sigma_max; the library may lack the required terms or degree");
  }
  ns.basis = V.rightCols(r);
  return ns;
}

NullSpaceBasis null_space_basis(const EvaluatedLibrary& theta, double rank_tol_rel) {
  NullSpaceBasis ns;
  bool normalized = true;
  for (Eigen::Index j = 0; j < theta.cols(); ++j) {
    if (std::abs(theta.matrix.col(j).norm() - 1.0) > 1e-8) {
      normalized = false;
      break;
    }
  }
  ns = null_space_basis(theta.matrix, rank_tol_rel);
  if (!normalized) ns.warnings.push_back("library columns are not normalized");
  return ns;
}

Eigen::VectorXd soft_threshold(const Eigen::Ref<const Eigen::VectorXd>& v, double lambda) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]) - lambda;
    out[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
  }
  return out;
}

void apply_sign_convention(Eigen::Ref<Eigen::VectorXd> xi, std::size_t block_begin) {
  const auto begin = static_cast<Eigen::Index>(block_begin);
  if (begin >= xi.size()) return;
  Eigen::Index arg = begin;
  for (Eigen::Index j = begin; j < xi.size(); ++j) {
    if (std::abs(xi[j]) > std::abs(xi[arg])) arg = j;
  }
  if (xi[arg] < 0.0) xi = -xi;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw Error(ErrorKind::InvalidArgument, "invalid lambda grid");
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / (count - 1));
  g.back() = hi;
  return g;
}

namespace {

struct AdmContext {
  const NullSpaceBasis& ns;
  const EvaluatedLibrary* theta;  // optional
  std::size_t sign_block;
  std::vector<int> degrees;  // per-column monomial degree, empty without a library
};

AdmContext make_context(const NullSpaceBasis& ns, const EvaluatedLibrary* theta) {
  AdmContext ctx{ns, theta, 0, {}};
  if (theta) {
    if (theta->cols() != ns.ambient_dim()) {
      throw Error(ErrorKind::DimensionMismatch, "null-space basis does not match the library width");
    }
    const std::size_t den = theta->denominator_begin();
    ctx.sign_block = den < theta->terms.size() ? den : 0;
    for (const auto& t : theta->terms) ctx.degrees.push_back(t.monomial.degree());
  }
  return ctx;
}

double residual_of(const AdmContext& ctx, const Eigen::VectorXd& xi) {
  if (ctx.theta) {
    return (ctx.theta->matrix * xi).norm() / std::sqrt(static_cast<double>(ctx.theta->rows()));
  }
  const Eigen::MatrixXd& N = ctx.ns.basis;
  return (xi - N * (N.transpose() * xi)).norm();
}

int degree_sum(const SparseCoefficients& c, const std::vector<int>& degrees) {
  int s = 0;
  for (std::size_t j = 0; j < c.active.size() && j < degrees.size(); ++j) {
    if (c.active[j]) s += degrees[j];
  }
  return s;
}

}  // namespace

bool is_preferred(const SparseCoefficients& a, const SparseCoefficients& b, const std::vector<int>& degrees) {
  if (a.term_count != b.term_count) return a.term_count < b.term_count;
  const double lo = std::min(a.residual, b.residual);
  const double hi = std::max(a.residual, b.residual);
  const bool tied = hi <= 10.0 * lo || hi <= 1e-12;
  if (!tied) return a.residual < b.residual;
  const int da = degree_sum(a, degrees), db = degree_sum(b, degrees);
  if (da != db) return da < db;
  return a.residual < b.residual;
}

namespace {

SparseCoefficients run_adm(const AdmContext& ctx, double lambda, const AdmConfig& cfg) {
  const Eigen::MatrixXd& N = ctx.ns.basis;
  const Eigen::Index p = N.rows();
  const Eigen::Index r = N.cols();
  if (r < 1) throw Error(ErrorKind::EmptyNullSpace, "ADM needs a null space of dimension >= 1");
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be positive");

  // Starting points: normalized rows of N, largest norm first; equal norms in
  // a seeded order.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const Eigen::VectorXd row_norms = N.rowwise().norm();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return row_norms[a] > row_norms[b]; });
  const auto n_init = static_cast<std::size_t>(std::clamp<Eigen::Index>(cfg.n_initializations, 1, p));

  std::optional<SparseCoefficients> best;
  std::size_t converged_runs = 0;
  for (std::size_t s = 0; s < n_init; ++s) {
    const Eigen::Index row = order[s];
    if (row_norms[row] == 0.0) continue;
    Eigen::VectorXd q = N.row(row).transpose() / row_norms[row];

    bool converged = false;
    bool collapsed = false;
    for (int it = 0; it < cfg.max_iters; ++it) {
      const Eigen::VectorXd x = soft_threshold(N * q, lambda);
      Eigen::VectorXd q_new = N.transpose() * x;
      const double nn = q_new.norm();
      if (nn == 0.0) {
        collapsed = true;
        break;
      }
      q_new /= nn;
      const double change = (q_new - q).norm();
      q = std::move(q_new);
      if (change < cfg.tol) {
        converged = true;
        break;
      }
    }
    if (collapsed) continue;

    Eigen::VectorXd xi = N * q;
    std::vector<bool> support(static_cast<std::size_t>(p));
    std::vector<Eigen::Index> off;
    for (Eigen::Index j = 0; j < p; ++j) {
      support[static_cast<std::size_t>(j)] = std::abs(xi[j]) >= lambda;
      if (!support[static_cast<std::size_t>(j)]) off.push_back(j);
    }
    if (static_cast<Eigen::Index>(off.size()) == p) continue;

    if (cfg.polish && !off.empty() && r > 1) {
      // Unit vector in span(N) with the least mass off the support.
      Eigen::MatrixXd N_off(static_cast<Eigen::Index>(off.size()), r);
      for (std::size_t i = 0; i < off.size(); ++i) N_off.row(static_cast<Eigen::Index>(i)) = N.row(off[i]);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(N_off, Eigen::ComputeFullV);
      Eigen::VectorXd qp = svd.matrixV().col(r - 1);
      if (qp.dot(q) < 0.0) qp = -qp;
      xi = N * qp;
    }
    for (Eigen::Index j : off) xi[j] = 0.0;
    // A polished vector may leave near-zero entries on the support; they are
    // held to the same threshold.
    for (Eigen::Index j = 0; j < p; ++j) {
      if (std::abs(xi[j]) < lambda * std::max(xi.norm(), 1e-300)) xi[j] = 0.0;
    }
    const double norm = xi.norm();
    if (norm == 0.0) continue;
    xi /= norm;
    apply_sign_convention(xi, ctx.sign_block);

    SparseCoefficients c;
    c.lambda = lambda;
    c.active.resize(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
      c.active[static_cast<std::size_t>(j)] = xi[j] != 0.0;
      c.term_count += xi[j] != 0.0 ? 1 : 0;
    }
    c.xi = std::move(xi);
    c.residual = residual_of(ctx, c.xi);
    c.converged = converged;
    c.initialization = static_cast<int>(row);
    if (converged) ++converged_runs;

    // Converged runs are preferred over unconverged ones.
    if (!best || (c.converged && !best->converged) ||
        (c.converged == best->converged && is_preferred(c, *best, ctx.degrees))) {
      best = std::move(c);
    }
  }

  if (!best) {
    throw Error(ErrorKind::DegenerateLambda,
                "lambda = " + std::to_string(lambda) + " thresholds every candidate to zero");
  }
  if (converged_runs == 0) {
    best->converged = false;
    best->warnings.push_back("NoConvergence: every initialization reached max_iters");
  }
  return *best;
}

std::vector<SparseCoefficients> sweep(const AdmContext& ctx, const std::vector<double>& grid, const AdmConfig& cfg) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty lambda grid");
  if (!std::is_sorted(grid.begin(), grid.end())) throw Error(ErrorKind::InvalidArgument, "lambda grid not ascending");
  std::vector<SparseCoefficients> out;
  out.reserve(grid.size());
  for (double lambda : grid) {
    try {
      out.push_back(run_adm(ctx, lambda, cfg));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::EmptyNullSpace || e.kind() == ErrorKind::DimensionMismatch) throw;
      SparseCoefficients flagged;
      flagged.lambda = lambda;
      flagged.xi = Eigen::VectorXd::Zero(ctx.ns.ambient_dim());
      flagged.active.assign(static_cast<std::size_t>(ctx.ns.ambient_dim()), false);
      flagged.converged = false;
      flagged.error = e.kind();
      flagged.warnings.push_back(e.what());
      out.push_back(std::move(flagged));
    }
  }
  return out;
}

}  // namespace

SparseCoefficients adm_sparsest_vector(const NullSpaceBasis& ns, double lambda, const AdmConfig& cfg) {
  return run_adm(make_context(ns, nullptr), lambda, cfg);
}

SparseCoefficients adm_sparsest_vector(const EvaluatedLibrary& theta, const NullSpaceBasis& ns, double lambda,
                                       const AdmConfig& cfg) {
  return run_adm(make_context(ns, &theta), lambda, cfg);
}

std::vector<SparseCoefficients> lambda_sweep(const NullSpaceBasis& ns, const std::vector<double>& lambda_grid,
                                             const AdmConfig& cfg) {
  return sweep(make_context(ns, nullptr), lambda_grid, cfg);
}

std::vector<SparseCoefficients> lambda_sweep(const EvaluatedLibrary& theta, const NullSpaceBasis& ns,
                                             const std::vector<double>& lambda_grid, const AdmConfig& cfg) {
  return sweep(make_context(ns, &theta), lambda_grid, cfg);
}

namespace {

SparseCoefficients finish_regression(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                                     const Eigen::Ref<const Eigen::VectorXd>& xdot, Eigen::VectorXd xi, double lambda) {
  SparseCoefficients c;
  c.lambda = lambda;
  c.active.resize(static_cast<std::size_t>(xi.size()));
  for (Eigen::Index j = 0; j < xi.size(); ++j) {
    c.active[static_cast<std::size_t>(j)] = xi[j] != 0.0;
    c.term_count += xi[j] != 0.0 ? 1 : 0;
  }
  c.residual = (theta * xi - xdot).norm() / std::sqrt(static_cast<double>(theta.rows()));
  c.xi = std::move(xi);
  return c;
}

}  // namespace

SparseCoefficients stlsq(const Eigen::Ref<const Eigen::MatrixXd>& theta, const Eigen::Ref<const Eigen::VectorXd>& xdot,
                         double lambda, int max_iters) {
  if (theta.rows() != xdot.size()) throw Error(ErrorKind::DimensionMismatch, "library rows differ from data length");
  if (theta.rows() == 0) throw Error(ErrorKind::EmptyData, "sparse regression on empty data");
  const Eigen::Index p = theta.cols();

  Eigen::VectorXd xi = theta.completeOrthogonalDecomposition().solve(xdot);
  std::vector<Eigen::Index> active;
  bool stable = false;
  int it = 0;
  for (; it < max_iters; ++it) {
    std::vector<Eigen::Index> next;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (std::abs(xi[j]) >= lambda) next.push_back(j);
    }
    if (next.empty()) throw Error(ErrorKind::AllTermsEliminated, "every coefficient fell below lambda");
    if (it > 0 && next == active) {
      stable = true;
      break;
    }
    active = std::move(next);

    Eigen::MatrixXd sub(theta.rows(), static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = theta.col(active[k]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
    if (qr.rank() < sub.cols()) {
      throw Error(ErrorKind::RankDeficientActiveSet,
                  "active set of " + std::to_string(sub.cols()) + " columns has rank " + std::to_string(qr.rank()));
    }
    const Eigen::VectorXd sol = qr.solve(xdot);
    xi.setZero();
    for (std::size_t k = 0; k < active.size(); ++k) xi[active[k]] = sol[static_cast<Eigen::Index>(k)];
  }
  auto c = finish_regression(theta, xdot, std::move(xi), lambda);
  if (!stable) {
    c.converged = false;
    c.warnings.push_back("NoConvergence: active set still changing after max_iters");
  }
  return c;
}

SparseCoefficients stlsq(const EvaluatedLibrary& theta, const Eigen::Ref<const Eigen::VectorXd>& xdot, double lambda,
                         int max_iters) {
  return stlsq(theta.matrix, xdot, lambda, max_iters);
}

SparseCoefficients lasso_cd(const Eigen::Ref<const Eigen::MatrixXd>& theta, const Eigen::Ref<const Eigen::VectorXd>& xdot,
                            double lambda, int max_iters, double tol) {
  if (theta.rows() != xdot.size()) throw Error(ErrorKind::DimensionMismatch, "library rows differ from data length");
  if (theta.rows() == 0) throw Error(ErrorKind::EmptyData, "sparse regression on empty data");
  const Eigen::Index p = theta.cols();
  const double m = static_cast<double>(theta.rows());
  const Eigen::VectorXd col_sq = theta.colwise().squaredNorm().transpose() / m;

  Eigen::VectorXd xi = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd resid = xdot;
  bool converged = false;
  for (int it = 0; it < max_iters; ++it) {
    double max_step = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sq[j] == 0.0) continue;
      const double rho = theta.col(j).dot(resid) / m + col_sq[j] * xi[j];
      const double a = std::abs(rho) - lambda;
      const double updated = a > 0.0 ? std::copysign(a, rho) / col_sq[j] : 0.0;
      const double step = updated - xi[j];
      if (step != 0.0) {
        resid -= step * theta.col(j);
        xi[j] = updated;
        max_step = std::max(max_step, std::abs(step));
      }
    }
    if (max_step < tol) {
      converged = true;
      break;
    }
  }
  if (xi.isZero(0.0)) throw Error(ErrorKind::AllTermsEliminated, "lambda removes every coefficient");
  auto c = finish_regression(theta, xdot, std::move(xi), lambda);
  if (!converged) {
    c.converged = false;
    c.warnings.push_back("NoConvergence: coordinate descent reached max_iters");
  }
  return c;
}

SparseCoefficients sparse_regression(RegressionSolver solver, const Eigen::Ref<const Eigen::MatrixXd>& theta,
                                     const Eigen::Ref<const Eigen::VectorXd>& xdot, double lambda) {
  return solver == RegressionSolver::Stlsq ? stlsq(theta, xdot, lambda) : lasso_cd(theta, xdot, lambda);
}

}  // namespace isindy
