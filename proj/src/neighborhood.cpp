#include "nbsel/neighborhood.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nbsel/parallel.hpp"
#include "nbsel/rng.hpp"

namespace nbsel {

const char* to_string(PenaltyRule rule) {
  switch (rule) {
    case PenaltyRule::Fixed: return "fixed";
    case PenaltyRule::Alpha: return "alpha";
    case PenaltyRule::CrossValidated: return "cv";
  }
  return "fixed";
}

PenaltyValue lambda_alpha(Index n, Index p, double sigma_hat, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorKind::DomainError, "alpha must lie in (0, 1)");
  if (n < 2) throw Error(ErrorKind::DomainError, "lambda(alpha) needs n >= 2");
  if (p < 1) throw Error(ErrorKind::DomainError, "lambda(alpha) needs p >= 1");
  if (!(sigma_hat > 0.0) || !std::isfinite(sigma_hat))
    throw Error(ErrorKind::DomainError, "sigma_hat must be positive");
  const double pp = static_cast<double>(p);
  PenaltyValue out;
  out.rule = PenaltyRule::Alpha;
  out.alpha = alpha;
  out.sigma_hat = sigma_hat;
  out.tail_quantile = gaussian_tail_quantile(alpha / (2.0 * pp * pp));
  out.lambda = 2.0 * sigma_hat / std::sqrt(static_cast<double>(n)) * out.tail_quantile;
  return out;
}

PenaltyValue fixed_penalty(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw Error(ErrorKind::DomainError, "penalty must be finite and non-negative");
  PenaltyValue out;
  out.rule = PenaltyRule::Fixed;
  out.lambda = lambda;
  return out;
}

NeighborhoodSet estimate_neighborhood(const Design& design, Index node,
                                      const PenaltyValue& penalty,
                                      const SolverOptions& options) {
  const LassoProblem problem =
      make_problem(design.p(), node, all_except(design.p(), node), penalty.lambda);
  const LassoFit fit = lasso_fit(design, problem, options);
  NeighborhoodSet out;
  out.node = node;
  out.penalty = penalty;
  out.members = fit.active;
  out.signs.reserve(fit.active.size());
  for (Index b : fit.active) out.signs.push_back(fit.coefficients[b] > 0.0 ? 1 : -1);
  out.kkt_violation = fit.kkt_violation;
  return out;
}

std::vector<double> default_cv_grid(const Design& design, Index node, std::size_t size,
                                    double ratio) {
  const double top = lambda_max(design, node, all_except(design.p(), node));
  if (!(top > 0.0)) return {1.0};
  return log_grid(top, top * ratio, size);
}

std::vector<NeighborhoodSet> estimate_all_neighborhoods(const Design& design,
                                                        const PenaltySpec& spec,
                                                        int workers) {
  const Index p = design.p();
  std::vector<NeighborhoodSet> out(static_cast<std::size_t>(p));
  const Stream root(spec.seed);
  parallel_for(static_cast<std::size_t>(p), workers, [&](std::size_t i) {
    const Index a = static_cast<Index>(i);
    PenaltyValue penalty;
    switch (spec.rule) {
      case PenaltyRule::Fixed:
        penalty = fixed_penalty(spec.lambda);
        break;
      case PenaltyRule::Alpha: {
        const double sigma_hat = std::sqrt(design.gram()(a, a));
        penalty = lambda_alpha(design.n(), p, sigma_hat, spec.alpha);
        break;
      }
      case PenaltyRule::CrossValidated: {
        const auto grid = default_cv_grid(design, a, spec.grid_size, spec.grid_ratio);
        penalty = cv_lambda(design.data(), a, spec.folds, grid, root.split(i).at(0));
        break;
      }
    }
    out[i] = estimate_neighborhood(design, a, penalty);
  });
  return out;
}

PenaltyValue cv_lambda(const DataMatrix& data, Index node, int folds,
                       std::span<const double> grid, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorKind::DomainError, "cross-validation needs at least 2 folds");
  const Index n = data.n(), p = data.p();
  if (node < 0 || node >= p) throw Error(ErrorKind::DomainError, "node out of range", node);
  if (n / folds < 2)
    throw Error(ErrorKind::FoldTooSmall, "each fold needs at least 2 observations", folds);
  if (grid.empty()) throw Error(ErrorKind::GridError, "penalty grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0))
      throw Error(ErrorKind::GridError, "cross-validation grid must be positive",
                  static_cast<std::int64_t>(i));
    if (i > 0 && !(grid[i] < grid[i - 1]))
      throw Error(ErrorKind::GridError, "cross-validation grid must be strictly descending",
                  static_cast<std::int64_t>(i));
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Stream rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const auto& x = data.values();
  const std::vector<Index> allowed = all_except(p, node);
  std::vector<double> loss(grid.size(), 0.0);
  for (int f = 0; f < folds; ++f) {
    const Index begin = n * f / folds, end = n * (f + 1) / folds;
    Eigen::MatrixXd train(n - (end - begin), p), test(end - begin, p);
    for (Index i = 0, tr = 0; i < n; ++i) {
      if (i >= begin && i < end) {
        test.row(i - begin) = x.row(order[i]);
      } else {
        train.row(tr++) = x.row(order[i]);
      }
    }
    const Eigen::RowVectorXd mean = train.colwise().mean();
    train.rowwise() -= mean;
    test.rowwise() -= mean;
    for (Index a = 0; a < p; ++a) {
      const double scale = std::sqrt(train.col(a).squaredNorm() / static_cast<double>(train.rows()));
      if (!(scale * scale >= 1e-14))
        throw Error(ErrorKind::ConstantColumn,
                    "column " + std::to_string(a) + " is constant within a training fold", a);
      train.col(a) /= scale;
      test.col(a) /= scale;
    }
    const Design design(DataMatrix(std::move(train), true));
    const auto fits = lasso_path(design, node, allowed, grid);
    for (std::size_t g = 0; g < fits.size(); ++g) {
      const Eigen::VectorXd error = test.col(node) - test * fits[g].coefficients;
      loss[g] += error.squaredNorm() / static_cast<double>(test.rows());
    }
  }

  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (loss[g] < loss[best]) best = g;

  PenaltyValue out;
  out.rule = PenaltyRule::CrossValidated;
  out.lambda = grid[best];
  out.sigma_hat = std::sqrt(data.column(node).squaredNorm() / static_cast<double>(n));
  out.folds = folds;
  out.grid_size = grid.size();
  return out;
}

}  // namespace nbsel
