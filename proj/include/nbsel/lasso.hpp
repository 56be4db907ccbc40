#ifndef NBSEL_LASSO_HPP
#define NBSEL_LASSO_HPP

// l1-penalized least squares for one target column,
//
//   minimize  n^{-1} ||X_a - X theta||^2 + lambda ||theta||_1
//   subject to theta_k = 0 for k outside the allowed set,
//
// solved by cyclic coordinate descent on the Gram matrix and certified by the
// subgradient optimality conditions.

#include <memory>
#include <span>
#include <vector>

#include "nbsel/numeric_core.hpp"

namespace nbsel {

/// Standardized data plus its Gram matrix n^{-1} X^T X, shared read-only by
/// every regression that runs on the same data.
class Design {
 public:
  explicit Design(DataMatrix data);

  const DataMatrix& data() const { return data_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  Index n() const { return data_.n(); }
  Index p() const { return data_.p(); }

 private:
  DataMatrix data_;
  Eigen::MatrixXd gram_;
};

struct LassoProblem {
  Index target = 0;
  std::vector<Index> allowed;  // ascending, never contains target
  double lambda = 0.0;
};

/// Validates and normalizes (sorts, deduplicates) the allowed set.
LassoProblem make_problem(Index p, Index target, std::vector<Index> allowed, double lambda);

/// All predictors except the target.
std::vector<Index> all_except(Index p, Index target);

struct SolverOptions {
  double kkt_tolerance = 1e-8;
  double change_tolerance = 1e-10;
  long max_sweeps = 100000;
  bool record_objective = false;
};

struct LassoFit {
  LassoProblem problem;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd gradient;  // G_b = -2 n^{-1} <X_a - X theta, X_b>
  std::vector<Index> active;
  double kkt_violation = 0.0;
  double objective = 0.0;
  long sweeps = 0;
  std::vector<double> objective_trace;  // one entry per sweep when recorded
};

/// Smallest penalty with an all-zero solution, max_b |2 n^{-1} <X_a, X_b>|.
/// Returns 0 for an empty allowed set.
double lambda_max(const Design& design, Index target, std::span<const Index> allowed);

LassoFit lasso_fit(const Design& design, const LassoProblem& problem,
                   const SolverOptions& options = {});
LassoFit lasso_fit(const Design& design, const LassoProblem& problem,
                   const Eigen::VectorXd& warm_start, const SolverOptions& options = {});

/// Penalized objective of an arbitrary coefficient vector, computed from data.
double lasso_objective(const DataMatrix& data, Index target, const Eigen::VectorXd& theta,
                       double lambda);

/// Optimality residual recomputed from the raw data:
///   max over allowed b of |G_b + sign(theta_b) lambda| when theta_b != 0,
///   and of max(0, |G_b| - lambda) when theta_b == 0.
/// Infinite if a coefficient outside the allowed set is nonzero.
double kkt_residual(const DataMatrix& data, const LassoFit& fit);

/// Warm-started fits along a strictly descending grid.
std::vector<LassoFit> lasso_path(const Design& design, Index target,
                                 std::span<const Index> allowed, std::span<const double> grid,
                                 const SolverOptions& options = {});

/// `count` log-spaced values from `high` down to `low`.
std::vector<double> log_grid(double high, double low, std::size_t count);

}  // namespace nbsel

#endif  // NBSEL_LASSO_HPP
