#include "nbsel/graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "nbsel/neighborhood.hpp"

namespace nbsel {

const char* to_string(EdgeRule rule) {
  switch (rule) {
    case EdgeRule::And: return "and";
    case EdgeRule::Or: return "or";
    case EdgeRule::Truth: return "truth";
    case EdgeRule::Other: return "other";
  }
  return "other";
}

EdgeSet::EdgeSet(Index p, std::vector<Edge> edges, EdgeRule rule)
    : p_(p), edges_(std::move(edges)), rule_(rule) {
  if (p < 0) throw Error(ErrorKind::DomainError, "negative node count");
  for (auto& [a, b] : edges_) {
    if (a > b) std::swap(a, b);
    if (a == b) throw Error(ErrorKind::DomainError, "self-loop at node " + std::to_string(a), a);
    if (a < 0 || b >= p)
      throw Error(ErrorKind::DomainError, "edge endpoint out of range", a < 0 ? a : b);
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool EdgeSet::contains(Index a, Index b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{a, b});
}

std::vector<std::vector<Index>> EdgeSet::adjacency() const {
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(p_));
  for (const auto& [a, b] : edges_) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

namespace {

std::vector<std::vector<Index>> members_by_node(std::span<const NeighborhoodSet> hoods) {
  const Index p = static_cast<Index>(hoods.size());
  std::vector<std::vector<Index>> members(hoods.size());
  std::vector<bool> seen(hoods.size(), false);
  for (const auto& hood : hoods) {
    if (hood.node < 0 || hood.node >= p || seen[hood.node])
      throw Error(ErrorKind::InconsistentP,
                  "neighborhoods must cover nodes 0..p-1 exactly once", hood.node);
    seen[hood.node] = true;
    members[hood.node] = hood.members;
  }
  return members;
}

EdgeSet aggregate(const std::vector<std::vector<Index>>& members, bool both) {
  const Index p = static_cast<Index>(members.size());
  std::vector<std::vector<Index>> sorted = members;
  for (auto& list : sorted) {
    for (Index b : list)
      if (b < 0 || b >= p)
        throw Error(ErrorKind::InconsistentP, "neighbor index outside 0..p-1", b);
    std::sort(list.begin(), list.end());
  }
  auto selects = [&](Index a, Index b) {
    return std::binary_search(sorted[a].begin(), sorted[a].end(), b);
  };
  std::vector<Edge> edges;
  for (Index a = 0; a < p; ++a) {
    for (Index b : sorted[a]) {
      if (b == a) continue;
      if (!both || selects(b, a)) edges.emplace_back(a, b);
    }
  }
  return EdgeSet(p, std::move(edges), both ? EdgeRule::And : EdgeRule::Or);
}

}  // namespace

EdgeSet aggregate_and(std::span<const NeighborhoodSet> neighborhoods) {
  return aggregate(members_by_node(neighborhoods), true);
}

EdgeSet aggregate_or(std::span<const NeighborhoodSet> neighborhoods) {
  return aggregate(members_by_node(neighborhoods), false);
}

EdgeSet aggregate_and(const std::vector<std::vector<Index>>& members) {
  return aggregate(members, true);
}

EdgeSet aggregate_or(const std::vector<std::vector<Index>>& members) {
  return aggregate(members, false);
}

namespace {

struct DisjointSets {
  std::vector<Index> parent;
  explicit DisjointSets(Index n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), Index{0});
  }
  Index find(Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(Index x, Index y) {
    x = find(x);
    y = find(y);
    if (x == y) return;
    if (y < x) std::swap(x, y);
    parent[y] = x;
  }
};

}  // namespace

ComponentPartition connected_components(const EdgeSet& edges) {
  DisjointSets sets(edges.p());
  for (const auto& [a, b] : edges.edges()) sets.unite(a, b);
  ComponentPartition out;
  out.p = edges.p();
  out.component.assign(static_cast<std::size_t>(edges.p()), -1);
  std::vector<Index> label(static_cast<std::size_t>(edges.p()), -1);
  for (Index v = 0; v < edges.p(); ++v) {
    const Index root = sets.find(v);
    if (label[root] < 0) label[root] = out.count++;
    out.component[v] = label[root];
  }
  return out;
}

Metrics compare_edge_sets(const EdgeSet& estimate, const EdgeSet& truth) {
  if (estimate.p() != truth.p())
    throw Error(ErrorKind::InconsistentP, "edge sets have different node counts");
  const ComponentPartition parts = connected_components(truth);
  Metrics m;
  for (const auto& [a, b] : estimate.edges()) {
    if (truth.contains(a, b)) {
      ++m.true_positives;
    } else {
      ++m.false_positives;
    }
    if (parts.component[a] != parts.component[b]) m.joins_components = true;
  }
  m.false_negatives = static_cast<long>(truth.size()) - m.true_positives;
  const long selected = m.true_positives + m.false_positives;
  m.fdp = static_cast<double>(m.false_positives) / static_cast<double>(std::max(1L, selected));
  return m;
}

std::vector<long> roc_at_false_counts(std::span<const EdgeSet> path, const EdgeSet& truth,
                                      std::span<const long> ks) {
  if (path.empty()) throw Error(ErrorKind::EmptyPath, "edge-set path is empty");
  for (std::size_t i = 1; i < ks.size(); ++i)
    if (ks[i] < ks[i - 1]) throw Error(ErrorKind::DomainError, "ks must be ascending");
  std::vector<Metrics> metrics;
  metrics.reserve(path.size());
  for (const auto& step : path) metrics.push_back(compare_edge_sets(step, truth));

  std::vector<long> out;
  out.reserve(ks.size());
  for (long k : ks) {
    std::size_t position = path.size() - 1;
    for (std::size_t i = 0; i < metrics.size(); ++i) {
      if (metrics[i].false_positives > k) {
        position = i;
        break;
      }
    }
    if (metrics[position].false_positives > k) {
      out.push_back(position == 0 ? 0 : metrics[position - 1].true_positives);
    } else {
      out.push_back(metrics[position].true_positives);
    }
  }
  return out;
}

}  // namespace nbsel
