#include "doctest.h"

#include <algorithm>
#include <random>

#include "nbsel/baseline_fs.hpp"
#include "nbsel/graph.hpp"
#include "nbsel/neighborhood.hpp"
#include "oracles.hpp"

using namespace nbsel;

namespace {

NeighborhoodSet hood(Index node, std::vector<Index> members) {
  NeighborhoodSet h;
  h.node = node;
  h.members = std::move(members);
  h.signs.assign(h.members.size(), 1);
  return h;
}

EdgeSet random_graph(Index p, double density, std::mt19937_64& gen) {
  std::bernoulli_distribution coin(density);
  std::vector<Edge> edges;
  for (Index a = 0; a < p; ++a)
    for (Index b = a + 1; b < p; ++b)
      if (coin(gen)) edges.emplace_back(a, b);
  return EdgeSet(p, edges);
}

}  // namespace

TEST_CASE("edge sets are normalized") {
  const EdgeSet e(4, {{2, 1}, {0, 3}, {1, 2}}, EdgeRule::Truth);
  CHECK(e.edges() == std::vector<Edge>{{0, 3}, {1, 2}});
  CHECK(e.contains(2, 1));
  CHECK_FALSE(e.contains(0, 1));
  CHECK(e.rule() == EdgeRule::Truth);
  CHECK(oracle::thrown_kind([] { EdgeSet(3, {{1, 1}}); }) == ErrorKind::DomainError);
  CHECK(oracle::thrown_kind([] { EdgeSet(3, {{0, 3}}); }) == ErrorKind::DomainError);
}

TEST_CASE("AND and OR on small families") {
  const std::vector<NeighborhoodSet> one_sided{hood(0, {1}), hood(1, {})};
  CHECK(aggregate_and(one_sided).empty());
  CHECK(aggregate_or(one_sided).edges() == std::vector<Edge>{{0, 1}});

  const std::vector<NeighborhoodSet> mutual{hood(0, {1}), hood(1, {0})};
  CHECK(aggregate_and(mutual).edges() == std::vector<Edge>{{0, 1}});
  CHECK(aggregate_and(mutual) == aggregate_or(mutual));
  CHECK(aggregate_and(mutual).rule() == EdgeRule::And);
  CHECK(aggregate_or(mutual).rule() == EdgeRule::Or);

  const std::vector<NeighborhoodSet> missing{hood(0, {1}), hood(0, {})};
  CHECK(oracle::thrown_kind([&] { aggregate_and(missing); }) == ErrorKind::InconsistentP);
  const std::vector<NeighborhoodSet> outside{hood(0, {2}), hood(1, {})};
  CHECK(oracle::thrown_kind([&] { aggregate_or(outside); }) == ErrorKind::InconsistentP);
}

TEST_CASE("AND is contained in OR and both ignore list order") {
  std::mt19937_64 gen(12);
  std::bernoulli_distribution coin(0.15);
  for (int trial = 0; trial < 50; ++trial) {
    const Index p = 3 + trial;
    std::vector<NeighborhoodSet> family;
    for (Index a = 0; a < p; ++a) {
      std::vector<Index> members;
      for (Index b = 0; b < p; ++b)
        if (b != a && coin(gen)) members.push_back(b);
      family.push_back(hood(a, members));
    }
    const EdgeSet e_and = aggregate_and(family);
    const EdgeSet e_or = aggregate_or(family);
    for (const auto& [a, b] : e_and.edges()) CHECK(e_or.contains(a, b));
    for (const auto& [a, b] : e_or.edges()) {
      const auto& ma = family[std::size_t(a)].members;
      const auto& mb = family[std::size_t(b)].members;
      const bool ab = std::find(ma.begin(), ma.end(), b) != ma.end();
      const bool ba = std::find(mb.begin(), mb.end(), a) != mb.end();
      CHECK((ab || ba));
      CHECK(e_and.contains(a, b) == (ab && ba));
    }
    std::shuffle(family.begin(), family.end(), gen);
    CHECK(aggregate_and(family) == e_and);
    CHECK(aggregate_or(family) == e_or);
  }
}

TEST_CASE("connected components") {
  const ComponentPartition none = connected_components(EdgeSet(4, {}));
  CHECK(none.count == 4);
  CHECK(none.component == std::vector<Index>{0, 1, 2, 3});

  const ComponentPartition chain = connected_components(EdgeSet(4, {{0, 1}, {1, 2}}));
  CHECK(chain.count == 2);
  CHECK(chain.component == std::vector<Index>{0, 0, 0, 1});

  std::mt19937_64 gen(8);
  for (double density : {0.002, 0.005, 0.01, 0.05}) {
    const EdgeSet g = random_graph(200, density, gen);
    const ComponentPartition uf = connected_components(g);
    const auto bfs = oracle::bfs_components(200, g.adjacency());
    CHECK(uf.component == bfs);
    CHECK(uf.count == *std::max_element(bfs.begin(), bfs.end()) + 1);
  }
}

TEST_CASE("metrics") {
  const EdgeSet truth(5, {{0, 1}, {1, 2}, {3, 4}});
  const Metrics same = compare_edge_sets(truth, truth);
  CHECK(same.true_positives == 3);
  CHECK(same.false_positives == 0);
  CHECK(same.false_negatives == 0);
  CHECK(same.fdp == 0.0);
  CHECK_FALSE(same.joins_components);

  const Metrics empty = compare_edge_sets(EdgeSet(5, {}), truth);
  CHECK(empty.true_positives == 0);
  CHECK(empty.false_negatives == 3);
  CHECK(empty.fdp == 0.0);

  // (0,2) is wrong but stays inside a truth component; (2,3) crosses.
  const Metrics inside = compare_edge_sets(EdgeSet(5, {{0, 1}, {0, 2}}), truth);
  CHECK(inside.false_positives == 1);
  CHECK(inside.fdp == 0.5);
  CHECK_FALSE(inside.joins_components);
  const Metrics across = compare_edge_sets(EdgeSet(5, {{2, 3}}), truth);
  CHECK(across.fdp == 1.0);
  CHECK(across.joins_components);

  CHECK(oracle::thrown_kind([&] { compare_edge_sets(EdgeSet(4, {}), truth); }) ==
        ErrorKind::InconsistentP);

  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 100; ++trial) {
    const EdgeSet t = random_graph(30, 0.05, gen);
    const EdgeSet e = random_graph(30, 0.05, gen);
    const Metrics m = compare_edge_sets(e, t);
    CHECK(m.true_positives + m.false_negatives == long(t.size()));
    CHECK(m.true_positives + m.false_positives == long(e.size()));
    CHECK((m.fdp >= 0.0 && m.fdp <= 1.0));
  }
}

TEST_CASE("ROC counts along a path") {
  const EdgeSet truth(4, {{0, 1}, {1, 2}});
  const std::vector<long> ks{0, 1, 2};

  SUBCASE("truth recovered before any mistake") {
    const std::vector<EdgeSet> path{EdgeSet(4, {}), EdgeSet(4, {{0, 1}}), truth,
                                    EdgeSet(4, {{0, 1}, {1, 2}, {0, 3}})};
    CHECK(roc_at_false_counts(path, truth, ks) == std::vector<long>{2, 2, 2});
  }

  SUBCASE("empty sets throughout") {
    const std::vector<EdgeSet> path{EdgeSet(4, {}), EdgeSet(4, {})};
    CHECK(roc_at_false_counts(path, truth, ks) == std::vector<long>{0, 0, 0});
  }

  SUBCASE("mistakes interleaved with hits") {
    const std::vector<EdgeSet> path{EdgeSet(4, {{0, 3}}), EdgeSet(4, {{0, 3}, {0, 1}}),
                                    EdgeSet(4, {{0, 3}, {0, 1}, {2, 3}}),
                                    EdgeSet(4, {{0, 3}, {0, 1}, {2, 3}, {1, 2}})};
    CHECK(roc_at_false_counts(path, truth, ks) == std::vector<long>{0, 1, 2});
  }

  SUBCASE("argument checks") {
    const std::vector<EdgeSet> none;
    CHECK(oracle::thrown_kind([&] { roc_at_false_counts(none, truth, ks); }) == ErrorKind::EmptyPath);
    const std::vector<EdgeSet> one{truth};
    const std::vector<long> descending{2, 0};
    CHECK(oracle::thrown_kind([&] { roc_at_false_counts(one, truth, descending); }) ==
          ErrorKind::DomainError);
  }
}

TEST_CASE("random guessing follows the negative hypergeometric mean") {
  // Correct picks before the (k+1)-th wrong one, m correct among M pairs.
  const Index p = 10;
  const double big_m = 45, m = 12;
  std::vector<Edge> truth_edges;
  std::mt19937_64 gen(6);
  std::vector<Edge> all;
  for (Index a = 0; a < p; ++a)
    for (Index b = a + 1; b < p; ++b) all.emplace_back(a, b);
  std::shuffle(all.begin(), all.end(), gen);
  const EdgeSet truth(p, std::vector<Edge>(all.begin(), all.begin() + long(m)));

  const std::vector<long> ks{0, 5, 10};
  const int reps = 10000;
  std::vector<double> sum(ks.size(), 0.0);
  for (int r = 0; r < reps; ++r) {
    const auto order = random_guess_baseline(p, std::uint64_t(r));
    REQUIRE(order.size() == 45);
    const auto path = prefix_path(p, order, order.size());
    const auto counts = roc_at_false_counts(path, truth, ks);
    for (std::size_t i = 0; i < ks.size(); ++i) sum[i] += double(counts[i]);
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double r = double(ks[i] + 1);
    const double failures = big_m - m;
    const double mean = r * m / (failures + 1);
    const double var = r * m * (big_m + 1) * (failures - r + 1) /
                       ((failures + 1) * (failures + 1) * (failures + 2));
    const double se = std::sqrt(var / reps);
    CHECK(std::fabs(sum[i] / reps - mean) <= 3 * se);
  }
}

TEST_CASE("random guessing basics") {
  CHECK(random_guess_baseline(2, 1) == std::vector<Edge>{{0, 1}});
  auto order = random_guess_baseline(7, 3);
  CHECK(order == random_guess_baseline(7, 3));
  CHECK(order != random_guess_baseline(7, 4));
  std::sort(order.begin(), order.end());
  CHECK(order.size() == 21);
  CHECK(std::adjacent_find(order.begin(), order.end()) == order.end());
  const auto path = prefix_path(7, order, 3);
  REQUIRE(path.size() == 4);
  for (std::size_t i = 0; i < path.size(); ++i) CHECK(path[i].size() == i);
}
