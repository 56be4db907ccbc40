#ifndef NBSEL_SYNTH_HPP
#define NBSEL_SYNTH_HPP

// Synthetic sparse Gaussian graphical models on random geometric graphs,
// data sampling, heavy-tailed contamination and population-level quantities.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nbsel/graph.hpp"
#include "nbsel/numeric_core.hpp"

namespace nbsel {

// Pair inclusion probability phi(d * scale) with phi the standard normal
// density: `Text` uses scale 1/sqrt(p), `Local` uses sqrt(p).
enum class Kernel { Text, Local };

const char* to_string(Kernel kernel);
Kernel parse_kernel(const std::string& name);

inline constexpr int kMaxDegree = 4;
inline constexpr double kDefaultOffDiagonal = 0.245;

struct TrueGraph {
  Index p = 0;
  Eigen::MatrixX2d positions;  // one row per node, inside [0, 1]^2
  EdgeSet edges;
  std::size_t raw_edge_count = 0;  // before degree pruning
  int max_degree = kMaxDegree;
};

double inclusion_probability(double distance, Index p, Kernel kernel);

TrueGraph generate_geometric_graph(Index p, std::uint64_t seed, Kernel kernel);

/// Inclusion and pruning on fixed positions.
TrueGraph graph_from_positions(const Eigen::MatrixX2d& positions, std::uint64_t seed,
                               Kernel kernel);

/// Unit diagonal, `offdiag` on edges, zero elsewhere.
SymMatrix build_precision(const EdgeSet& graph, double offdiag = kDefaultOffDiagonal);

/// K^{-1} rescaled to unit diagonal.
SymMatrix covariance_from_precision(const SymMatrix& precision);

struct GgmModel {
  TrueGraph graph;
  SymMatrix precision;   // as built, before rescaling
  SymMatrix covariance;  // unit diagonal
};

GgmModel make_model(TrueGraph graph, double offdiag = kDefaultOffDiagonal);

/// Rows i.i.d. N(0, covariance) via the Cholesky factor.
DataMatrix sample_gaussian(const SymMatrix& covariance, Index n, std::uint64_t seed);

/// Adds scale * Z entrywise with Z i.i.d. Student t on 2 degrees of freedom.
DataMatrix contaminate_t2(const DataMatrix& data, double scale, std::uint64_t seed);

/// Population regression of X_a on X_A: solves Sigma_AA theta = Sigma_Aa.
Eigen::VectorXd population_coefficients(const SymMatrix& covariance, Index a,
                                        std::span<const Index> subset);

double partial_correlation(const SymMatrix& precision, Index a, Index b);

/// S_a(b) = sum over k in ne_a of sign(theta_k^{a, ne_a}) theta_k^{b, ne_a}.
/// The neighborhood ne_a is read off the nonzero pattern of `precision`.
double neighborhood_stability(const SymMatrix& covariance, const SymMatrix& precision, Index a,
                              Index b);

/// JSON model document: positions, edges and precision triplets.
std::string model_to_json(const GgmModel& model, Kernel kernel, std::uint64_t seed);
GgmModel model_from_json(const std::string& text);

}  // namespace nbsel

#endif  // NBSEL_SYNTH_HPP
