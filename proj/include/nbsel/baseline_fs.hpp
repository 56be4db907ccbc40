#ifndef NBSEL_BASELINE_FS_HPP
#define NBSEL_BASELINE_FS_HPP

// Reference methods for graph recovery: greedy forward selection of Gaussian
// graphical models by maximum likelihood, and random guessing.

#include <cstdint>
#include <functional>
#include <vector>

#include "nbsel/graph.hpp"
#include "nbsel/numeric_core.hpp"

namespace nbsel {

struct MleFit {
  EdgeSet graph;
  SymMatrix fitted_cov;
  SymMatrix fitted_precision;
  // Per observation, additive constants dropped: (log det K - tr(S K)) / 2.
  double loglik = 0.0;
  long ipf_iterations = 0;
  std::vector<double> loglik_trace;  // after every cycle
};

/// Maximal cliques (Bron-Kerbosch with pivoting), each sorted, isolated nodes
/// included as singletons.
std::vector<std::vector<Index>> maximal_cliques(const EdgeSet& graph);

/// Maximum likelihood covariance with the zero pattern of `graph` in its
/// inverse, by iterative proportional fitting over maximal cliques.
/// `warm`, when given, must be a fit on a subgraph of `graph`.
MleFit ipf_fit(const SymMatrix& sample_cov, const EdgeSet& graph, double tol = 1e-8,
               const MleFit* warm = nullptr, long max_cycles = 10000);

struct ForwardStep {
  Edge added;
  double gain = 0.0;  // n times the per-observation log-likelihood increase
  EdgeSet graph;
  MleFit fit;
  std::size_t skipped = 0;  // candidates whose MLE did not exist
};

/// Greedy forward selection from the empty graph. Each step adds the edge with
/// the largest exact log-likelihood gain (lexicographically first on ties).
/// Runs max_steps steps unless no candidate remains or `stop` returns true on
/// the graph just reached.
std::vector<ForwardStep> forward_select(
    const SymMatrix& sample_cov, Index n, std::size_t max_steps, int workers = 1,
    const std::function<bool(const EdgeSet&)>& stop = {});

/// Uniformly shuffled list of all p(p-1)/2 node pairs.
std::vector<Edge> random_guess_baseline(Index p, std::uint64_t seed);

/// Nested prefixes of an ordered edge list, starting from the empty graph.
std::vector<EdgeSet> prefix_path(Index p, const std::vector<Edge>& order, std::size_t steps);

}  // namespace nbsel

#endif  // NBSEL_BASELINE_FS_HPP
