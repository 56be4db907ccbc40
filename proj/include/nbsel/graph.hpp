#ifndef NBSEL_GRAPH_HPP
#define NBSEL_GRAPH_HPP

#include <span>
#include <utility>
#include <vector>

#include "nbsel/numeric_core.hpp"

namespace nbsel {

struct NeighborhoodSet;

enum class EdgeRule { And, Or, Truth, Other };

const char* to_string(EdgeRule rule);

using Edge = std::pair<Index, Index>;

/// Undirected simple graph on nodes 0..p-1. Edges are kept as (a, b) with
/// a < b, sorted and free of duplicates.
class EdgeSet {
 public:
  EdgeSet() = default;
  EdgeSet(Index p, std::vector<Edge> edges, EdgeRule rule = EdgeRule::Other);

  Index p() const { return p_; }
  EdgeRule rule() const { return rule_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  bool contains(Index a, Index b) const;
  std::vector<std::vector<Index>> adjacency() const;

  friend bool operator==(const EdgeSet& x, const EdgeSet& y) {
    return x.p_ == y.p_ && x.edges_ == y.edges_;
  }

 private:
  Index p_ = 0;
  std::vector<Edge> edges_;
  EdgeRule rule_ = EdgeRule::Other;
};

/// Edge present iff both endpoints select each other.
EdgeSet aggregate_and(std::span<const NeighborhoodSet> neighborhoods);
/// Edge present iff at least one endpoint selects the other.
EdgeSet aggregate_or(std::span<const NeighborhoodSet> neighborhoods);

// Same rules on bare member lists, indexed by node.
EdgeSet aggregate_and(const std::vector<std::vector<Index>>& members);
EdgeSet aggregate_or(const std::vector<std::vector<Index>>& members);

struct ComponentPartition {
  Index p = 0;
  // Components are numbered in order of their smallest node.
  std::vector<Index> component;
  Index count = 0;
};

ComponentPartition connected_components(const EdgeSet& edges);

struct Metrics {
  long true_positives = 0;
  long false_positives = 0;
  long false_negatives = 0;
  double fdp = 0.0;
  // Some estimated edge joins two distinct components of the truth.
  bool joins_components = false;
};

Metrics compare_edge_sets(const EdgeSet& estimate, const EdgeSet& truth);

/// For each k, the number of correct edges at the last path position before
/// the false-positive count exceeds k (the final position if it never does).
std::vector<long> roc_at_false_counts(std::span<const EdgeSet> path, const EdgeSet& truth,
                                      std::span<const long> ks);

}  // namespace nbsel

#endif  // NBSEL_GRAPH_HPP
