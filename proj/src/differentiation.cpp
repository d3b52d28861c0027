#include "isindy/differentiation.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>

#include "isindy/error.hpp"

namespace isindy {

namespace {

void check_increasing(const Eigen::Ref<const Eigen::VectorXd>& times) {
  for (Eigen::Index i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw Error(ErrorKind::InvalidArgument, "times are not strictly increasing");
  }
}

double uniform_step(const Eigen::Ref<const Eigen::VectorXd>& times) {
  const Eigen::Index m = times.size();
  const double dt = (times[m - 1] - times[0]) / static_cast<double>(m - 1);
  for (Eigen::Index i = 1; i < m; ++i) {
    if (std::abs((times[i] - times[i - 1]) - dt) > 1e-6 * dt) {
      throw Error(ErrorKind::NonUniformGrid, "TV differentiation requires a uniform time grid");
    }
  }
  return dt;
}

// Cumulative integral of interval slopes: (A u)_i = dt * sum_{j <= i} u_j.
Eigen::VectorXd integrate(const Eigen::Ref<const Eigen::VectorXd>& u, double dt) {
  Eigen::VectorXd out(u.size());
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    s += dt * u[i];
    out[i] = s;
  }
  return out;
}

}  // namespace

Eigen::VectorXd central_difference(const Eigen::Ref<const Eigen::VectorXd>& times,
                                   const Eigen::Ref<const Eigen::VectorXd>& series) {
  const Eigen::Index m = times.size();
  if (series.size() != m) throw Error(ErrorKind::DimensionMismatch, "times and series differ in length");
  if (m < 3) throw Error(ErrorKind::TooFewSamples, "central differences need at least 3 samples");
  check_increasing(times);

  Eigen::VectorXd d(m);
  for (Eigen::Index i = 1; i + 1 < m; ++i) {
    const double h1 = times[i] - times[i - 1];
    const double h2 = times[i + 1] - times[i];
    d[i] = -h2 / (h1 * (h1 + h2)) * series[i - 1] + (h2 - h1) / (h1 * h2) * series[i] +
           h1 / (h2 * (h1 + h2)) * series[i + 1];
  }
  {
    const double h1 = times[1] - times[0];
    const double h2 = times[2] - times[1];
    d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * series[0] + (h1 + h2) / (h1 * h2) * series[1] -
           h1 / (h2 * (h1 + h2)) * series[2];
  }
  {
    const double h1 = times[m - 2] - times[m - 3];
    const double h2 = times[m - 1] - times[m - 2];
    d[m - 1] = h2 / (h1 * (h1 + h2)) * series[m - 3] - (h1 + h2) / (h1 * h2) * series[m - 2] +
               (2.0 * h2 + h1) / (h2 * (h1 + h2)) * series[m - 1];
  }
  return d;
}

double tv_objective(const Eigen::Ref<const Eigen::VectorXd>& slopes, const Eigen::Ref<const Eigen::VectorXd>& target,
                    double dt, double alpha, double epsilon) {
  double tv = 0.0;
  for (Eigen::Index k = 0; k + 1 < slopes.size(); ++k) {
    const double g = slopes[k + 1] - slopes[k];
    tv += std::sqrt(g * g + epsilon);
  }
  return alpha * tv + 0.5 * (integrate(slopes, dt) - target).squaredNorm();
}

TvResult tv_derivative(const Eigen::Ref<const Eigen::VectorXd>& times, const Eigen::Ref<const Eigen::VectorXd>& series,
                       const DiffConfig& cfg) {
  const Eigen::Index m = times.size();
  if (series.size() != m) throw Error(ErrorKind::DimensionMismatch, "times and series differ in length");
  if (m < 3) throw Error(ErrorKind::TooFewSamples, "TV differentiation needs at least 3 samples");
  if (!(cfg.alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "TV differentiation requires alpha > 0");
  check_increasing(times);
  const double dt = uniform_step(times);

  const Eigen::Index K = m - 1;  // intervals
  const Eigen::VectorXd target = series.tail(K).array() - series[0];

  TvResult res;
  Eigen::VectorXd u = (series.tail(K) - series.head(K)) / dt;
  res.objective.push_back(tv_objective(u, target, dt, cfg.alpha, cfg.epsilon));

  // In y = A u coordinates the lagged-diffusivity system is
  //   (I + alpha/dt^2 (D B)^T W (D B)) y = target,
  // with B the bidiagonal inverse of cumulative summation; (D B) has three
  // nonzeros per row, so the system is pentadiagonal.
  const double scale = cfg.alpha / (dt * dt);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  for (int it = 0; it < cfg.max_iters; ++it) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(K) * 9);
    for (Eigen::Index i = 0; i < K; ++i) trip.emplace_back(i, i, 1.0);
    for (Eigen::Index k = 0; k + 1 < K; ++k) {
      const double g = u[k + 1] - u[k];
      const double w = scale / std::sqrt(g * g + cfg.epsilon);
      // Row k of D B: y_{k+1} - 2 y_k + y_{k-1} (the y_{-1} entry is absent for k = 0).
      Eigen::Index idx[3] = {k - 1, k, k + 1};
      double coef[3] = {1.0, -2.0, 1.0};
      for (int a = 0; a < 3; ++a) {
        if (idx[a] < 0) continue;
        for (int b = 0; b < 3; ++b) {
          if (idx[b] < 0) continue;
          trip.emplace_back(idx[a], idx[b], w * coef[a] * coef[b]);
        }
      }
    }
    Eigen::SparseMatrix<double> M(K, K);
    M.setFromTriplets(trip.begin(), trip.end());
    solver.compute(M);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "TV system factorization failed");
    const Eigen::VectorXd y = solver.solve(target);

    Eigen::VectorXd u_new(K);
    u_new[0] = y[0] / dt;
    for (Eigen::Index i = 1; i < K; ++i) u_new[i] = (y[i] - y[i - 1]) / dt;

    const double change = (u_new - u).norm() / std::max(u.norm(), 1e-300);
    u = std::move(u_new);
    res.objective.push_back(tv_objective(u, target, dt, cfg.alpha, cfg.epsilon));
    res.iterations = it + 1;
    if (change < cfg.tol) {
      res.converged = true;
      break;
    }
  }

  res.interval_slopes = u;
  res.derivative.resize(m);
  res.derivative[0] = u[0];
  res.derivative[m - 1] = u[K - 1];
  for (Eigen::Index i = 1; i + 1 < m; ++i) res.derivative[i] = 0.5 * (u[i - 1] + u[i]);
  return res;
}

Eigen::MatrixXd differentiate(const Eigen::Ref<const Eigen::VectorXd>& times,
                              const Eigen::Ref<const Eigen::MatrixXd>& states, const DiffConfig& cfg) {
  Eigen::MatrixXd out(states.rows(), states.cols());
  for (Eigen::Index j = 0; j < states.cols(); ++j) {
    if (cfg.method == DiffMethod::Central) {
      out.col(j) = central_difference(times, states.col(j));
    } else {
      out.col(j) = tv_derivative(times, states.col(j), cfg).derivative;
    }
  }
  return out;
}

}  // namespace isindy
