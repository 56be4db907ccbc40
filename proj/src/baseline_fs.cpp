#include "nbsel/baseline_fs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nbsel/parallel.hpp"
#include "nbsel/rng.hpp"

namespace nbsel {

namespace {

void bron_kerbosch(const std::vector<std::vector<bool>>& adj, std::vector<Index>& current,
                   std::vector<Index> candidates, std::vector<Index> excluded,
                   std::vector<std::vector<Index>>& out) {
  if (candidates.empty() && excluded.empty()) {
    std::vector<Index> clique = current;
    std::sort(clique.begin(), clique.end());
    out.push_back(std::move(clique));
    return;
  }
  // Pivot on the vertex with the most neighbors among the candidates.
  Index pivot = -1;
  std::size_t best = 0;
  for (const auto* pool : {&candidates, &excluded}) {
    for (Index u : *pool) {
      std::size_t count = 0;
      for (Index v : candidates) count += adj[u][v] ? 1 : 0;
      if (pivot < 0 || count > best) {
        pivot = u;
        best = count;
      }
    }
  }
  const std::vector<Index> snapshot = candidates;
  for (Index v : snapshot) {
    if (adj[pivot][v]) continue;
    std::vector<Index> next_candidates, next_excluded;
    for (Index u : candidates)
      if (adj[v][u]) next_candidates.push_back(u);
    for (Index u : excluded)
      if (adj[v][u]) next_excluded.push_back(u);
    current.push_back(v);
    bron_kerbosch(adj, current, std::move(next_candidates), std::move(next_excluded), out);
    current.pop_back();
    candidates.erase(std::find(candidates.begin(), candidates.end(), v));
    excluded.push_back(v);
  }
}

Eigen::MatrixXd block(const Eigen::MatrixXd& m, const std::vector<Index>& idx) {
  const Index k = static_cast<Index>(idx.size());
  Eigen::MatrixXd out(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) out(i, j) = m(idx[i], idx[j]);
  return out;
}

// Inverse of a small SPD block; a failed factorization means the MLE update
// has no solution.
Eigen::MatrixXd small_inverse(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() <= 1e-7 * std::sqrt(m.diagonal().maxCoeff()))
    throw Error(ErrorKind::MleDoesNotExist, std::string(what) + " is singular");
  return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

}  // namespace

std::vector<std::vector<Index>> maximal_cliques(const EdgeSet& graph) {
  const Index p = graph.p();
  std::vector<std::vector<bool>> adj(static_cast<std::size_t>(p),
                                     std::vector<bool>(static_cast<std::size_t>(p), false));
  for (const auto& [a, b] : graph.edges()) adj[a][b] = adj[b][a] = true;
  std::vector<Index> all(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) all[i] = i;
  std::vector<std::vector<Index>> out;
  std::vector<Index> current;
  bron_kerbosch(adj, current, all, {}, out);
  std::sort(out.begin(), out.end());
  return out;
}

MleFit ipf_fit(const SymMatrix& sample_cov, const EdgeSet& graph, double tol, const MleFit* warm,
               long max_cycles) {
  const Index p = sample_cov.dim();
  if (graph.p() != p)
    throw Error(ErrorKind::InconsistentP, "graph and covariance have different sizes");
  const Eigen::MatrixXd& s = sample_cov.dense();
  if (s.diagonal().minCoeff() <= 0.0)
    throw Error(ErrorKind::MleDoesNotExist, "sample covariance has a non-positive variance");

  Eigen::MatrixXd k, sigma;
  if (warm != nullptr) {
    for (const auto& [a, b] : warm->graph.edges())
      if (!graph.contains(a, b))
        throw Error(ErrorKind::DomainError, "warm start graph is not a subgraph");
    k = warm->fitted_precision.dense();
    sigma = warm->fitted_cov.dense();
  } else {
    k = s.diagonal().cwiseInverse().asDiagonal();
    sigma = s.diagonal().asDiagonal();
  }

  const auto cliques = maximal_cliques(graph);
  std::vector<Eigen::MatrixXd> target, target_inverse;
  for (const auto& c : cliques) {
    target.push_back(block(s, c));
    target_inverse.push_back(small_inverse(target.back(), "sample covariance on a clique"));
  }

  MleFit fit;
  fit.graph = graph;
  auto evaluate = [&] {
    // Refresh sigma from K to keep the rank updates from drifting.
    const Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorKind::MleDoesNotExist, "fitted precision lost positive definiteness");
    sigma = llt.solve(Eigen::MatrixXd::Identity(p, p));
    const double log_det =
        2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return 0.5 * (log_det - (s.cwiseProduct(k)).sum());
  };

  long cycles = 0;
  while (true) {
    double discrepancy = 0.0;
    for (std::size_t c = 0; c < cliques.size(); ++c)
      discrepancy =
          std::max(discrepancy, (block(sigma, cliques[c]) - target[c]).cwiseAbs().maxCoeff());
    if (discrepancy <= tol) break;
    if (cycles >= max_cycles)
      throw Error(ErrorKind::MaxIterations,
                  "IPF did not converge in " + std::to_string(max_cycles) + " cycles", max_cycles);
    for (std::size_t c = 0; c < cliques.size(); ++c) {
      const auto& idx = cliques[c];
      const Index m = static_cast<Index>(idx.size());
      const Eigen::MatrixXd current = block(sigma, idx);
      if ((current - target[c]).cwiseAbs().maxCoeff() == 0.0) continue;
      const Eigen::MatrixXd current_inverse = small_inverse(current, "fitted clique covariance");
      const Eigen::MatrixXd delta_k = target_inverse[c] - current_inverse;
      Eigen::MatrixXd columns(p, m);
      for (Index j = 0; j < m; ++j) columns.col(j) = sigma.col(idx[j]);
      const Eigen::MatrixXd middle = current_inverse * (target[c] - current) * current_inverse;
      sigma.noalias() += columns * middle * columns.transpose();
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) k(idx[i], idx[j]) += delta_k(i, j);
    }
    ++cycles;
    fit.loglik_trace.push_back(evaluate());
  }
  if (fit.loglik_trace.empty()) {
    fit.loglik = evaluate();
  } else {
    fit.loglik = fit.loglik_trace.back();
  }
  fit.ipf_iterations = cycles;
  fit.fitted_cov = SymMatrix(sigma);
  fit.fitted_precision = SymMatrix(k);
  return fit;
}

std::vector<ForwardStep> forward_select(const SymMatrix& sample_cov, Index n,
                                        std::size_t max_steps, int workers,
                                        const std::function<bool(const EdgeSet&)>& stop) {
  const Index p = sample_cov.dim();
  if (p > 50) throw Error(ErrorKind::DomainError, "forward selection is limited to p <= 50");
  if (n < 1) throw Error(ErrorKind::DomainError, "forward selection needs n >= 1");

  std::vector<ForwardStep> path;
  MleFit current = ipf_fit(sample_cov, EdgeSet(p, {}));
  std::vector<Edge> chosen;
  for (std::size_t step = 0; step < max_steps; ++step) {
    std::vector<Edge> candidates;
    for (Index a = 0; a < p; ++a)
      for (Index b = a + 1; b < p; ++b)
        if (!current.graph.contains(a, b)) candidates.emplace_back(a, b);
    if (candidates.empty()) break;

    std::vector<double> scores(candidates.size(), -std::numeric_limits<double>::infinity());
    std::vector<MleFit> fits(candidates.size());
    std::vector<bool> valid(candidates.size(), false);
    parallel_for(candidates.size(), workers, [&](std::size_t i) {
      std::vector<Edge> edges = chosen;
      edges.push_back(candidates[i]);
      try {
        fits[i] = ipf_fit(sample_cov, EdgeSet(p, std::move(edges)), 1e-8, &current);
        scores[i] = fits[i].loglik;
        valid[i] = true;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::MleDoesNotExist) throw;
      }
    });
    std::size_t best = candidates.size();
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!valid[i]) {
        ++skipped;
        continue;
      }
      if (best == candidates.size() || scores[i] > scores[best]) best = i;
    }
    if (best == candidates.size()) break;

    ForwardStep record;
    record.added = candidates[best];
    record.gain = static_cast<double>(n) * (fits[best].loglik - current.loglik);
    record.skipped = skipped;
    chosen.push_back(candidates[best]);
    current = std::move(fits[best]);
    record.graph = current.graph;
    record.fit = current;
    path.push_back(std::move(record));
    if (stop && stop(current.graph)) break;
  }
  return path;
}

std::vector<Edge> random_guess_baseline(Index p, std::uint64_t seed) {
  if (p < 2) throw Error(ErrorKind::DomainError, "random guessing needs p >= 2");
  std::vector<Edge> pairs;
  pairs.reserve(static_cast<std::size_t>(p * (p - 1) / 2));
  for (Index a = 0; a < p; ++a)
    for (Index b = a + 1; b < p; ++b) pairs.emplace_back(a, b);
  Stream rng(seed);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  return pairs;
}

std::vector<EdgeSet> prefix_path(Index p, const std::vector<Edge>& order, std::size_t steps) {
  std::vector<EdgeSet> path;
  const std::size_t last = std::min(steps, order.size());
  path.reserve(last + 1);
  for (std::size_t i = 0; i <= last; ++i)
    path.emplace_back(p, std::vector<Edge>(order.begin(), order.begin() + static_cast<long>(i)));
  return path;
}

}  // namespace nbsel
