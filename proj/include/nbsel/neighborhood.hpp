#ifndef NBSEL_NEIGHBORHOOD_HPP
#define NBSEL_NEIGHBORHOOD_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "nbsel/lasso.hpp"

namespace nbsel {

enum class PenaltyRule { Fixed, Alpha, CrossValidated };

const char* to_string(PenaltyRule rule);

struct PenaltyValue {
  double lambda = 0.0;
  double sigma_hat = 1.0;
  double tail_quantile = 0.0;  // only meaningful for the alpha rule
  PenaltyRule rule = PenaltyRule::Fixed;
  double alpha = 0.0;
  int folds = 0;
  std::size_t grid_size = 0;
};

/// lambda(alpha) = 2 sigma_hat / sqrt(n) * z, with 1 - Phi(z) = alpha / (2 p^2).
PenaltyValue lambda_alpha(Index n, Index p, double sigma_hat, double alpha);

PenaltyValue fixed_penalty(double lambda);

struct NeighborhoodSet {
  Index node = 0;
  std::vector<Index> members;  // ascending
  std::vector<int> signs;      // parallel to members, each -1 or +1
  PenaltyValue penalty;
  double kkt_violation = 0.0;
};

NeighborhoodSet estimate_neighborhood(const Design& design, Index node,
                                      const PenaltyValue& penalty,
                                      const SolverOptions& options = {});

/// How to choose the per-node penalty in estimate_all_neighborhoods.
struct PenaltySpec {
  PenaltyRule rule = PenaltyRule::Alpha;
  double lambda = 0.0;  // fixed rule
  double alpha = 0.05;  // alpha rule
  int folds = 10;       // cv rule
  std::size_t grid_size = 50;
  double grid_ratio = 1e-3;  // smallest grid value as a fraction of lambda_max
  std::uint64_t seed = 0;    // cv fold shuffle
};

/// Per-node estimates, element a for node a. Output does not depend on the
/// worker count.
std::vector<NeighborhoodSet> estimate_all_neighborhoods(const Design& design,
                                                        const PenaltySpec& spec,
                                                        int workers = 1);

/// Cross-validated penalty for one node: the grid value with the smallest
/// mean held-out squared error of X_a, ties going to the larger penalty.
PenaltyValue cv_lambda(const DataMatrix& data, Index node, int folds,
                       std::span<const double> grid, std::uint64_t seed);

/// Default cross-validation grid for a node.
std::vector<double> default_cv_grid(const Design& design, Index node, std::size_t size,
                                    double ratio);

}  // namespace nbsel

#endif  // NBSEL_NEIGHBORHOOD_HPP
