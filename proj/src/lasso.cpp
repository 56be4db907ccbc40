#include "nbsel/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace nbsel {

namespace {

double soft_threshold(double z, double level) {
  if (z > level) return z - level;
  if (z < -level) return z + level;
  return 0.0;
}

void check_index(Index value, Index p, const char* what) {
  if (value < 0 || value >= p)
    throw Error(ErrorKind::DomainError, std::string(what) + " index out of range", value);
}

// Data-side gradient G = -2 n^{-1} X^T (X_a - X theta).
Eigen::VectorXd data_gradient(const DataMatrix& data, Index target,
                              const Eigen::VectorXd& theta) {
  const auto& x = data.values();
  Eigen::VectorXd residual = x.col(target);
  for (Index k = 0; k < theta.size(); ++k)
    if (theta[k] != 0.0) residual.noalias() -= theta[k] * x.col(k);
  return (-2.0 / static_cast<double>(data.n())) * (x.transpose() * residual);
}

double residual_from_gradient(const LassoProblem& problem, const Eigen::VectorXd& theta,
                              const Eigen::VectorXd& gradient) {
  const double lambda = problem.lambda;
  for (Index k = 0; k < theta.size(); ++k) {
    if (theta[k] == 0.0) continue;
    if (!std::binary_search(problem.allowed.begin(), problem.allowed.end(), k))
      return std::numeric_limits<double>::infinity();
  }
  double worst = 0.0;
  for (Index b : problem.allowed) {
    const double g = gradient[b];
    const double violation = theta[b] != 0.0
                                 ? std::fabs(g + (theta[b] > 0.0 ? lambda : -lambda))
                                 : std::max(0.0, std::fabs(g) - lambda);
    worst = std::max(worst, violation);
  }
  return worst;
}

}  // namespace

Design::Design(DataMatrix data) : data_(std::move(data)) {
  if (!data_.standardized())
    throw Error(ErrorKind::DomainError, "lasso design requires standardized data");
  gram_ = nbsel::gram(data_).dense();
}

std::vector<Index> all_except(Index p, Index target) {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(p));
  for (Index k = 0; k < p; ++k)
    if (k != target) out.push_back(k);
  return out;
}

LassoProblem make_problem(Index p, Index target, std::vector<Index> allowed, double lambda) {
  check_index(target, p, "target");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw Error(ErrorKind::DomainError, "penalty must be finite and non-negative");
  std::sort(allowed.begin(), allowed.end());
  allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
  for (Index k : allowed) {
    check_index(k, p, "predictor");
    if (k == target)
      throw Error(ErrorKind::DomainError, "target cannot be its own predictor", k);
  }
  return LassoProblem{target, std::move(allowed), lambda};
}

double lambda_max(const Design& design, Index target, std::span<const Index> allowed) {
  check_index(target, design.p(), "target");
  double best = 0.0;
  for (Index b : allowed) best = std::max(best, std::fabs(2.0 * design.gram()(b, target)));
  return best;
}

double lasso_objective(const DataMatrix& data, Index target, const Eigen::VectorXd& theta,
                       double lambda) {
  Eigen::VectorXd residual = data.column(target) - data.values() * theta;
  return residual.squaredNorm() / static_cast<double>(data.n()) + lambda * theta.lpNorm<1>();
}

double kkt_residual(const DataMatrix& data, const LassoFit& fit) {
  return residual_from_gradient(fit.problem, fit.coefficients,
                                data_gradient(data, fit.problem.target, fit.coefficients));
}

LassoFit lasso_fit(const Design& design, const LassoProblem& problem,
                   const SolverOptions& options) {
  return lasso_fit(design, problem, Eigen::VectorXd::Zero(design.p()), options);
}

LassoFit lasso_fit(const Design& design, const LassoProblem& problem,
                   const Eigen::VectorXd& warm_start, const SolverOptions& options) {
  const Index p = design.p();
  const Index a = problem.target;
  check_index(a, p, "target");
  if (warm_start.size() != p)
    throw Error(ErrorKind::DomainError, "warm start has the wrong length");
  if (problem.lambda == 0.0 && static_cast<Index>(problem.allowed.size()) >= design.n())
    throw Error(ErrorKind::NotUnique,
                "unpenalized fit is not unique when the allowed set has at least n members");

  const Eigen::MatrixXd& s = design.gram();
  const std::vector<Index>& allowed = problem.allowed;
  const double half = 0.5 * problem.lambda;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  for (Index b : allowed) theta[b] = warm_start[b];

  // r = c - S theta with c = S_{.a}; the gradient is -2 r.
  Eigen::VectorXd r(p);
  auto refresh = [&] {
    r = s.col(a);
    for (Index k : allowed)
      if (theta[k] != 0.0) r.noalias() -= theta[k] * s.col(k);
  };
  refresh();

  auto update = [&](Index b) {
    const double z = r[b] + s(b, b) * theta[b];
    const double next = soft_threshold(z, half) / s(b, b);
    const double delta = next - theta[b];
    if (delta != 0.0) {
      theta[b] = next;
      r.noalias() -= delta * s.col(b);
    }
    return std::fabs(delta);
  };

  LassoFit fit;
  fit.problem = problem;
  auto record = [&] {
    if (!options.record_objective) return;
    double l1 = 0.0, cross = 0.0;
    for (Index k : allowed) {
      l1 += std::fabs(theta[k]);
      cross += theta[k] * (s(k, a) + r[k]);
    }
    fit.objective_trace.push_back(s(a, a) - cross + problem.lambda * l1);
  };
  if (options.record_objective) record();

  std::vector<Index> nonzero;
  long sweeps = 0;
  const double inner_target = 0.1 * options.kkt_tolerance;
  auto bump = [&] {
    if (++sweeps > options.max_sweeps)
      throw Error(ErrorKind::MaxIterations,
                  "coordinate descent did not converge in " +
                      std::to_string(options.max_sweeps) + " sweeps",
                  options.max_sweeps);
  };

  while (true) {
    double change = 0.0;
    for (Index b : allowed) change = std::max(change, update(b));
    bump();
    record();

    if (change > options.change_tolerance) {
      // Iterate on the current support until it settles, then re-check everything.
      while (true) {
        nonzero.clear();
        for (Index b : allowed)
          if (theta[b] != 0.0) nonzero.push_back(b);
        double inner = 0.0;
        for (Index b : nonzero) inner = std::max(inner, update(b));
        bump();
        record();
        if (inner <= options.change_tolerance) break;
      }
      continue;
    }

    refresh();
    if (residual_from_gradient(problem, theta, -2.0 * r) > inner_target) continue;
    const Eigen::VectorXd gradient = data_gradient(design.data(), a, theta);
    const double violation = residual_from_gradient(problem, theta, gradient);
    if (violation <= options.kkt_tolerance) {
      fit.gradient = gradient;
      fit.kkt_violation = violation;
      break;
    }
  }

  fit.coefficients = std::move(theta);
  for (Index b : allowed)
    if (fit.coefficients[b] != 0.0) fit.active.push_back(b);
  fit.objective = lasso_objective(design.data(), a, fit.coefficients, problem.lambda);
  fit.sweeps = sweeps;
  return fit;
}

std::vector<LassoFit> lasso_path(const Design& design, Index target,
                                 std::span<const Index> allowed, std::span<const double> grid,
                                 const SolverOptions& options) {
  if (grid.empty()) throw Error(ErrorKind::GridError, "penalty grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0))
      throw Error(ErrorKind::GridError, "penalty grid has a negative entry",
                  static_cast<std::int64_t>(i));
    if (i > 0 && !(grid[i] < grid[i - 1]))
      throw Error(ErrorKind::GridError, "penalty grid is not strictly descending",
                  static_cast<std::int64_t>(i));
  }
  std::vector<Index> members(allowed.begin(), allowed.end());
  std::vector<LassoFit> fits;
  fits.reserve(grid.size());
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(design.p());
  for (double lambda : grid) {
    LassoProblem problem = make_problem(design.p(), target, members, lambda);
    fits.push_back(lasso_fit(design, problem, warm, options));
    warm = fits.back().coefficients;
  }
  return fits;
}

std::vector<double> log_grid(double high, double low, std::size_t count) {
  if (!(high > 0.0) || !(low > 0.0) || low > high || count == 0)
    throw Error(ErrorKind::GridError, "log grid needs 0 < low <= high and count >= 1");
  std::vector<double> grid(count);
  const double top = std::log(high), bottom = std::log(low);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    grid[i] = std::exp(top + t * (bottom - top));
  }
  grid.front() = high;
  if (count > 1) grid.back() = low;
  return grid;
}

}  // namespace nbsel
