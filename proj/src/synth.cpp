#include "nbsel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "json.hpp"
#include "nbsel/rng.hpp"

namespace nbsel {

const char* to_string(Kernel kernel) { return kernel == Kernel::Text ? "text" : "local"; }

Kernel parse_kernel(const std::string& name) {
  if (name == "text") return Kernel::Text;
  if (name == "local") return Kernel::Local;
  throw Error(ErrorKind::ConfigError, "unknown kernel '" + name + "' (expected text or local)");
}

double inclusion_probability(double distance, Index p, Kernel kernel) {
  const double root_p = std::sqrt(static_cast<double>(p));
  const double u = kernel == Kernel::Text ? distance / root_p : distance * root_p;
  return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

namespace {

// Removes random edges until no node has degree above the cap. An edge whose
// endpoints both exceed the cap is removed first (uniformly among those); only
// when none is left is an edge with a single over-cap endpoint removed.
std::vector<Edge> prune_degrees(Index p, std::vector<Edge> edges, int cap, Stream rng) {
  const std::size_t m = edges.size();
  std::vector<int> degree(static_cast<std::size_t>(p), 0);
  std::vector<std::vector<std::size_t>> incident(static_cast<std::size_t>(p));
  for (std::size_t e = 0; e < m; ++e) {
    ++degree[edges[e].first];
    ++degree[edges[e].second];
    incident[edges[e].first].push_back(e);
    incident[edges[e].second].push_back(e);
  }
  // Two indexed pools with O(1) insert and erase.
  struct Pool {
    std::vector<std::size_t> items;
    void insert(std::size_t e, std::vector<std::ptrdiff_t>& slot) {
      slot[e] = static_cast<std::ptrdiff_t>(items.size());
      items.push_back(e);
    }
    void erase(std::size_t e, std::vector<std::ptrdiff_t>& slot) {
      const std::size_t moved = items.back();
      items[static_cast<std::size_t>(slot[e])] = moved;
      slot[moved] = slot[e];
      items.pop_back();
      slot[e] = -1;
    }
  };
  Pool both, one;
  std::vector<std::ptrdiff_t> slot(m, -1);
  std::vector<bool> alive(m, true), in_both(m, false);
  auto over = [&](Index v) { return degree[v] > cap; };
  for (std::size_t e = 0; e < m; ++e) {
    const bool a = over(edges[e].first), b = over(edges[e].second);
    if (a && b) {
      both.insert(e, slot);
      in_both[e] = true;
    } else if (a || b) {
      one.insert(e, slot);
    }
  }

  while (!both.items.empty() || !one.items.empty()) {
    Pool& pool = both.items.empty() ? one : both;
    std::uniform_int_distribution<std::size_t> pick(0, pool.items.size() - 1);
    const std::size_t e = pool.items[pick(rng)];
    pool.erase(e, slot);
    alive[e] = false;
    for (Index v : {edges[e].first, edges[e].second}) {
      if (--degree[v] != cap) continue;
      // v just dropped to the cap: its edges lose one over-cap endpoint.
      for (std::size_t f : incident[v]) {
        if (!alive[f] || slot[f] < 0) continue;
        if (in_both[f]) {
          both.erase(f, slot);
          in_both[f] = false;
          one.insert(f, slot);
        } else {
          one.erase(f, slot);
        }
      }
    }
  }
  std::vector<Edge> kept;
  for (std::size_t e = 0; e < m; ++e)
    if (alive[e]) kept.push_back(edges[e]);
  return kept;
}

}  // namespace

TrueGraph graph_from_positions(const Eigen::MatrixX2d& positions, std::uint64_t seed,
                               Kernel kernel) {
  const Index p = positions.rows();
  if (p < 1) throw Error(ErrorKind::DomainError, "graph needs at least one node");
  const Stream inclusion = Stream(seed).split(1);
  std::vector<Edge> edges;
  std::uint64_t pair = 0;
  for (Index a = 0; a < p; ++a) {
    for (Index b = a + 1; b < p; ++b, ++pair) {
      const double d = (positions.row(a) - positions.row(b)).norm();
      if (inclusion.uniform_at(pair) < inclusion_probability(d, p, kernel))
        edges.emplace_back(a, b);
    }
  }
  TrueGraph graph;
  graph.p = p;
  graph.positions = positions;
  graph.raw_edge_count = edges.size();
  graph.edges = EdgeSet(p, prune_degrees(p, std::move(edges), kMaxDegree, Stream(seed).split(2)),
                        EdgeRule::Truth);
  return graph;
}

TrueGraph generate_geometric_graph(Index p, std::uint64_t seed, Kernel kernel) {
  if (p < 1) throw Error(ErrorKind::DomainError, "graph needs at least one node");
  const Stream draws = Stream(seed).split(0);
  Eigen::MatrixX2d positions(p, 2);
  for (Index i = 0; i < p; ++i) {
    positions(i, 0) = draws.uniform_at(2 * static_cast<std::uint64_t>(i));
    positions(i, 1) = draws.uniform_at(2 * static_cast<std::uint64_t>(i) + 1);
  }
  return graph_from_positions(positions, seed, kernel);
}

SymMatrix build_precision(const EdgeSet& graph, double offdiag) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(graph.p(), graph.p());
  for (const auto& [a, b] : graph.edges()) {
    k(a, b) = offdiag;
    k(b, a) = offdiag;
  }
  SymMatrix out(k);
  cholesky(out);  // throws NotPositiveDefinite
  return out;
}

SymMatrix covariance_from_precision(const SymMatrix& precision) {
  Eigen::MatrixXd sigma = invert_spd(precision).dense();
  const Eigen::VectorXd scale = sigma.diagonal().cwiseSqrt().cwiseInverse();
  sigma = scale.asDiagonal() * sigma * scale.asDiagonal();
  sigma.diagonal().setOnes();
  return SymMatrix(sigma);
}

GgmModel make_model(TrueGraph graph, double offdiag) {
  GgmModel model;
  model.precision = build_precision(graph.edges, offdiag);
  model.covariance = covariance_from_precision(model.precision);
  model.graph = std::move(graph);
  return model;
}

DataMatrix sample_gaussian(const SymMatrix& covariance, Index n, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorKind::DomainError, "sampling needs n >= 2");
  const Eigen::MatrixXd l = cholesky(covariance);
  const Index p = covariance.dim();
  Stream rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd z(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) z(i, j) = normal(rng);
  Eigen::MatrixXd x = z * l.transpose();
  return DataMatrix(std::move(x));
}

DataMatrix contaminate_t2(const DataMatrix& data, double scale, std::uint64_t seed) {
  if (!(scale >= 0.0) || !std::isfinite(scale))
    throw Error(ErrorKind::DomainError, "contamination scale must be finite and non-negative");
  Eigen::MatrixXd x = data.values();
  if (scale > 0.0) {
    Stream numerators = Stream(seed).split(0), denominators = Stream(seed).split(1);
    std::normal_distribution<double> normal;
    std::exponential_distribution<double> exponential(1.0);
    for (Index i = 0; i < x.rows(); ++i) {
      for (Index j = 0; j < x.cols(); ++j) {
        // chi^2_2 / 2 is Exp(1).
        const double t = normal(numerators) / std::sqrt(exponential(denominators));
        x(i, j) += scale * t;
      }
    }
  }
  return DataMatrix(std::move(x), false);
}

Eigen::VectorXd population_coefficients(const SymMatrix& covariance, Index a,
                                        std::span<const Index> subset) {
  const Index p = covariance.dim();
  if (a < 0 || a >= p) throw Error(ErrorKind::DomainError, "node out of range", a);
  for (Index k : subset) {
    if (k < 0 || k >= p) throw Error(ErrorKind::DomainError, "subset index out of range", k);
    if (k == a) throw Error(ErrorKind::DomainError, "subset must exclude the response", k);
  }
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  if (subset.empty()) return theta;
  const Index m = static_cast<Index>(subset.size());
  Eigen::MatrixXd block(m, m);
  Eigen::VectorXd rhs(m);
  for (Index i = 0; i < m; ++i) {
    rhs[i] = covariance(subset[i], a);
    for (Index j = 0; j < m; ++j) block(i, j) = covariance(subset[i], subset[j]);
  }
  const Eigen::MatrixXd l = cholesky(SymMatrix(block));
  const Eigen::VectorXd coef = l.transpose().triangularView<Eigen::Upper>().solve(
      l.triangularView<Eigen::Lower>().solve(rhs));
  for (Index i = 0; i < m; ++i) theta[subset[i]] = coef[i];
  return theta;
}

double partial_correlation(const SymMatrix& precision, Index a, Index b) {
  return -precision(a, b) / std::sqrt(precision(a, a) * precision(b, b));
}

double neighborhood_stability(const SymMatrix& covariance, const SymMatrix& precision, Index a,
                              Index b) {
  const Index p = precision.dim();
  if (a < 0 || a >= p || b < 0 || b >= p)
    throw Error(ErrorKind::DomainError, "node out of range");
  if (a == b || precision(a, b) != 0.0)
    throw Error(ErrorKind::DomainError, "stability is defined for distinct non-neighbors");
  std::vector<Index> hood;
  for (Index k = 0; k < p; ++k)
    if (k != a && precision(a, k) != 0.0) hood.push_back(k);
  if (hood.empty()) return 0.0;
  const Eigen::VectorXd from_a = population_coefficients(covariance, a, hood);
  const Eigen::VectorXd from_b = population_coefficients(covariance, b, hood);
  double total = 0.0;
  for (Index k : hood) {
    const double sign = from_a[k] > 0.0 ? 1.0 : (from_a[k] < 0.0 ? -1.0 : 0.0);
    total += sign * from_b[k];
  }
  return total;
}

std::string model_to_json(const GgmModel& model, Kernel kernel, std::uint64_t seed) {
  nlohmann::ordered_json doc;
  const Index p = model.graph.p;
  doc["format_version"] = 1;
  doc["p"] = p;
  doc["kernel"] = to_string(kernel);
  doc["seed"] = seed;
  doc["raw_edge_count"] = model.graph.raw_edge_count;
  auto positions = nlohmann::ordered_json::array();
  for (Index i = 0; i < p; ++i)
    positions.push_back({model.graph.positions(i, 0), model.graph.positions(i, 1)});
  doc["positions"] = std::move(positions);
  auto edges = nlohmann::ordered_json::array();
  for (const auto& [a, b] : model.graph.edges.edges()) edges.push_back({a + 1, b + 1});
  doc["edges"] = std::move(edges);
  auto triplets = nlohmann::ordered_json::array();
  for (Index j = 0; j < p; ++j)
    for (Index i = j; i < p; ++i)
      if (model.precision(i, j) != 0.0) triplets.push_back({i + 1, j + 1, model.precision(i, j)});
  doc["precision"] = std::move(triplets);
  return doc.dump(1);
}

GgmModel model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    const Index p = doc.at("p").get<Index>();
    if (p < 1) throw Error(ErrorKind::ParseError, "model has no nodes");
    TrueGraph graph;
    graph.p = p;
    graph.raw_edge_count = doc.value("raw_edge_count", std::size_t{0});
    graph.positions = Eigen::MatrixX2d::Zero(p, 2);
    const auto& positions = doc.at("positions");
    if (static_cast<Index>(positions.size()) != p)
      throw Error(ErrorKind::ParseError, "positions length differs from p");
    for (Index i = 0; i < p; ++i) {
      graph.positions(i, 0) = positions[i].at(0).get<double>();
      graph.positions(i, 1) = positions[i].at(1).get<double>();
    }
    std::vector<Edge> edges;
    for (const auto& e : doc.at("edges"))
      edges.emplace_back(e.at(0).get<Index>() - 1, e.at(1).get<Index>() - 1);
    graph.edges = EdgeSet(p, std::move(edges), EdgeRule::Truth);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(p, p);
    for (const auto& t : doc.at("precision")) {
      const Index i = t.at(0).get<Index>() - 1, j = t.at(1).get<Index>() - 1;
      if (i < 0 || j < 0 || i >= p || j >= p)
        throw Error(ErrorKind::ParseError, "precision triplet index out of range");
      k(i, j) = k(j, i) = t.at(2).get<double>();
    }
    GgmModel model;
    model.precision = SymMatrix(k);
    model.covariance = covariance_from_precision(model.precision);
    model.graph = std::move(graph);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed model JSON: ") + e.what());
  }
}

}  // namespace nbsel
