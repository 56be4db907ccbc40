#include "doctest.h"

#include <algorithm>
#include <random>

#include <boost/math/distributions/students_t.hpp>

#include "nbsel/lasso.hpp"
#include "nbsel/synth.hpp"
#include "oracles.hpp"

using namespace nbsel;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kPhi0 = 0.3989422804014327;

std::vector<int> degrees(const EdgeSet& e) {
  std::vector<int> deg(std::size_t(e.p()), 0);
  for (const auto& [a, b] : e.edges()) {
    ++deg[std::size_t(a)];
    ++deg[std::size_t(b)];
  }
  return deg;
}

SymMatrix chain_precision() {
  return build_precision(EdgeSet(3, {{0, 1}, {1, 2}}));
}

}  // namespace

TEST_CASE("kernel names") {
  CHECK(parse_kernel("text") == Kernel::Text);
  CHECK(parse_kernel("local") == Kernel::Local);
  CHECK(std::string(to_string(Kernel::Local)) == "local");
  CHECK(oracle::thrown_kind([] { parse_kernel("gauss"); }).has_value());
  CHECK(inclusion_probability(0.0, 100, Kernel::Text) == doctest::Approx(kPhi0).epsilon(1e-15));
  CHECK(inclusion_probability(0.5, 100, Kernel::Text) ==
        doctest::Approx(kPhi0 * std::exp(-0.5 * 0.0025)).epsilon(1e-14));
  CHECK(inclusion_probability(0.5, 100, Kernel::Local) ==
        doctest::Approx(kPhi0 * std::exp(-0.5 * 25.0)).epsilon(1e-12));
}

TEST_CASE("geometric graph basics") {
  CHECK(generate_geometric_graph(1, 3, Kernel::Text).edges.empty());

  const TrueGraph g = generate_geometric_graph(300, 5, Kernel::Text);
  CHECK(g.p == 300);
  CHECK(g.positions.rows() == 300);
  CHECK(g.positions.minCoeff() >= 0.0);
  CHECK(g.positions.maxCoeff() < 1.0);
  CHECK(g.edges.rule() == EdgeRule::Truth);
  CHECK(g.raw_edge_count >= g.edges.size());
  const TrueGraph again = generate_geometric_graph(300, 5, Kernel::Text);
  CHECK(again.edges == g.edges);
  CHECK((again.positions == g.positions));
  CHECK_FALSE(generate_geometric_graph(300, 6, Kernel::Text).edges == g.edges);
}

TEST_CASE("coincident points are joined with probability phi(0)") {
  const Eigen::MatrixX2d same = Eigen::MatrixX2d::Constant(2, 2, 0.3);
  for (Kernel kernel : {Kernel::Text, Kernel::Local}) {
    int joined = 0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed)
      joined += int(graph_from_positions(same, seed, kernel).edges.size());
    CHECK(std::fabs(joined / 10000.0 - kPhi0) <= 0.015);
  }
}

TEST_CASE("degree cap holds for every size and seed") {
  for (Kernel kernel : {Kernel::Text, Kernel::Local})
    for (Index p : {2, 5, 10, 30, 100, 400})
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const TrueGraph g = generate_geometric_graph(p, seed, kernel);
        const auto deg = degrees(g.edges);
        CHECK(*std::max_element(deg.begin(), deg.end()) <= kMaxDegree);
      }
}

TEST_CASE("raw inclusion count matches the distance integral") {
  // E[raw] = C(p,2) E[phi(D s)] with D the distance of two uniform points in
  // the unit square; estimated here with an independent generator.
  const Index p = 200;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u;
  for (Kernel kernel : {Kernel::Text, Kernel::Local}) {
    const double scale = kernel == Kernel::Text ? 1.0 / std::sqrt(double(p)) : std::sqrt(double(p));
    double mean_phi = 0.0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) {
      const double dx = u(gen) - u(gen), dy = u(gen) - u(gen);
      const double d = std::sqrt(dx * dx + dy * dy) * scale;
      mean_phi += kPhi0 * std::exp(-0.5 * d * d);
    }
    const double expected = double(p * (p - 1) / 2) * mean_phi / draws;
    double observed = 0.0;
    const int graphs = 40;
    for (int s = 0; s < graphs; ++s)
      observed += double(generate_geometric_graph(p, std::uint64_t(s), kernel).raw_edge_count);
    observed /= graphs;
    CHECK(observed == doctest::Approx(expected).epsilon(0.03));
  }
}

TEST_CASE("large text-kernel graphs land in the calibrated edge band") {
  for (std::uint64_t seed : {1, 2}) {
    const std::size_t edges = generate_geometric_graph(1000, seed, Kernel::Text).edges.size();
    CHECK(edges >= 1500);
    CHECK(edges <= 2100);
  }
}

TEST_CASE("precision construction") {
  CHECK((build_precision(EdgeSet(3, {})).dense() == MatrixXd::Identity(3, 3)));

  const SymMatrix pair = build_precision(EdgeSet(2, {{0, 1}}));
  CHECK(pair(0, 0) == 1.0);
  CHECK(pair(0, 1) == 0.245);
  CHECK(pair(1, 0) == 0.245);

  const EdgeSet star(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  CHECK(cholesky(build_precision(star)).allFinite());
  CHECK(oracle::thrown_kind([&] { build_precision(star, 0.6); }) == ErrorKind::NotPositiveDefinite);
}

TEST_CASE("covariance from precision") {
  CHECK((covariance_from_precision(SymMatrix::identity(4)).dense() - MatrixXd::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() <= 1e-15);

  const SymMatrix pair = covariance_from_precision(build_precision(EdgeSet(2, {{0, 1}})));
  CHECK(pair(0, 1) == doctest::Approx(-0.245).epsilon(1e-14));

  const SymMatrix chain = covariance_from_precision(chain_precision());
  CHECK(std::fabs(chain(0, 2)) > 0.01);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GgmModel model = make_model(generate_geometric_graph(80, seed, Kernel::Text));
    const MatrixXd& sigma = model.covariance.dense();
    CHECK((sigma.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-10);
    const MatrixXd raw = invert_spd(model.precision).dense();
    const VectorXd d = raw.diagonal().cwiseSqrt().cwiseInverse();
    CHECK((d.asDiagonal() * raw * d.asDiagonal() - sigma).cwiseAbs().maxCoeff() <= 1e-10);
    // Rescaling an already unit-diagonal covariance changes nothing.
    const SymMatrix back = covariance_from_precision(invert_spd(model.covariance));
    CHECK((back.dense() - sigma).cwiseAbs().maxCoeff() <= 1e-10);
    // Zeros of K sit exactly on non-edges.
    for (Index a = 0; a < 80; ++a)
      for (Index b = 0; b < 80; ++b)
        if (a != b) CHECK((model.precision(a, b) != 0.0) == model.graph.edges.contains(a, b));
  }
}

TEST_CASE("gaussian sampling") {
  CHECK(oracle::thrown_kind([] { sample_gaussian(SymMatrix::identity(2), 1, 0); }) ==
        ErrorKind::DomainError);
  CHECK(sample_gaussian(SymMatrix::identity(2), 2, 0).n() == 2);

  const DataMatrix x = sample_gaussian(SymMatrix::identity(3), 100000, 1);
  CHECK_FALSE(x.standardized());
  const MatrixXd cov = x.values().transpose() * x.values() / 100000.0;
  CHECK((cov - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 0.02);

  const SymMatrix pair = covariance_from_precision(build_precision(EdgeSet(2, {{0, 1}})));
  const DataMatrix y = standardize(sample_gaussian(pair, 10000, 2));
  const double corr = y.column(0).dot(y.column(1)) / 10000.0;
  CHECK(std::fabs(corr + 0.245) <= 0.02);

  CHECK((sample_gaussian(pair, 10, 3).values() == sample_gaussian(pair, 10, 3).values()));
  CHECK_FALSE((sample_gaussian(pair, 10, 3).values() == sample_gaussian(pair, 10, 4).values()));

  // Entrywise convergence on a generated model: 3/sqrt(n) bands on 95% of entries.
  const GgmModel model = make_model(generate_geometric_graph(30, 8, Kernel::Text));
  const Index n = 20000;
  const DataMatrix z = sample_gaussian(model.covariance, n, 9);
  const MatrixXd s = z.values().transpose() * z.values() / double(n);
  int inside = 0, total = 0;
  for (Index a = 0; a < 30; ++a)
    for (Index b = 0; b <= a; ++b) {
      ++total;
      if (std::fabs(s(a, b) - model.covariance(a, b)) <= 3.0 * std::sqrt(2.0 / double(n))) ++inside;
    }
  CHECK(inside >= 0.95 * total);
}

TEST_CASE("t2 contamination") {
  const DataMatrix base = sample_gaussian(SymMatrix::identity(2), 50, 1);
  const DataMatrix same = contaminate_t2(standardize(base), 0.0, 5);
  CHECK((same.values() == standardize(base).values()));
  CHECK_FALSE(same.standardized());

  const Index n = 100000;
  const DataMatrix zeros(MatrixXd::Zero(n, 1));
  const DataMatrix t = contaminate_t2(zeros, 1.0, 11);
  std::vector<double> abs_values(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) abs_values[std::size_t(i)] = std::fabs(t.values()(i, 0));
  std::nth_element(abs_values.begin(), abs_values.begin() + n / 2, abs_values.end());
  const double median = abs_values[std::size_t(n / 2)];
  const double expected = boost::math::quantile(boost::math::students_t_distribution<double>(2), 0.75);
  CHECK(expected == doctest::Approx(0.8165).epsilon(1e-4));
  CHECK(std::fabs(median - expected) <= 0.02);

  const DataMatrix tenth = contaminate_t2(zeros, 0.1, 11);
  CHECK((tenth.values() - 0.1 * t.values()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(oracle::thrown_kind([&] { contaminate_t2(zeros, -1.0, 1); }) == ErrorKind::DomainError);
}

TEST_CASE("population coefficients") {
  const SymMatrix pair = covariance_from_precision(build_precision(EdgeSet(2, {{0, 1}})));
  CHECK(population_coefficients(pair, 0, std::vector<Index>{}).isZero(0.0));
  const std::vector<Index> other{1};
  CHECK(population_coefficients(pair, 0, other)[1] == doctest::Approx(-0.245).epsilon(1e-14));
  const std::vector<Index> self{0};
  CHECK(oracle::thrown_kind([&] { population_coefficients(pair, 0, self); }) ==
        ErrorKind::DomainError);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GgmModel model = make_model(generate_geometric_graph(40, 100 + seed, Kernel::Text));
    const MatrixXd k = invert_spd(model.covariance).dense();
    for (Index a = 0; a < 40; a += 3) {
      const VectorXd theta = population_coefficients(model.covariance, a, all_except(40, a));
      for (Index b = 0; b < 40; ++b) {
        if (b == a) continue;
        CHECK(std::fabs(theta[b] + k(a, b) / k(a, a)) <= 1e-8);
        CHECK((std::fabs(theta[b]) > 1e-10) == model.graph.edges.contains(a, b));
      }
    }
  }
}

TEST_CASE("partial correlations") {
  const SymMatrix diag(MatrixXd(VectorXd::LinSpaced(4, 1.0, 4.0).asDiagonal()));
  for (Index a = 0; a < 4; ++a)
    for (Index b = 0; b < 4; ++b)
      if (a != b) CHECK(partial_correlation(diag, a, b) == 0.0);

  const SymMatrix pair = build_precision(EdgeSet(2, {{0, 1}}));
  CHECK(partial_correlation(pair, 0, 1) == doctest::Approx(-0.245).epsilon(1e-15));

  const GgmModel model = make_model(generate_geometric_graph(50, 1, Kernel::Text));
  for (const auto& [a, b] : model.graph.edges.edges())
    CHECK(std::fabs(partial_correlation(model.precision, a, b)) == doctest::Approx(0.245));
}

TEST_CASE("neighborhood stability") {
  const SymMatrix k = chain_precision();
  const SymMatrix sigma = covariance_from_precision(k);
  const double s13 = neighborhood_stability(sigma, k, 0, 2);
  CHECK(std::fabs(s13) < 1.0);
  CHECK(std::fabs(s13) > 0.0);
  CHECK(oracle::thrown_kind([&] { neighborhood_stability(sigma, k, 0, 0); }) ==
        ErrorKind::DomainError);
  CHECK(oracle::thrown_kind([&] { neighborhood_stability(sigma, k, 0, 1); }) ==
        ErrorKind::DomainError);

  // Node 3 is isolated; node 4 forms its own component with node 5.
  const SymMatrix k2 = build_precision(EdgeSet(6, {{0, 1}, {1, 2}, {4, 5}}));
  const SymMatrix s2 = covariance_from_precision(k2);
  CHECK(neighborhood_stability(s2, k2, 3, 0) == 0.0);
  CHECK(neighborhood_stability(s2, k2, 0, 4) == 0.0);
  CHECK(neighborhood_stability(s2, k2, 4, 1) == 0.0);

  // Diagonally dominant precisions keep |S_a(b)| below one.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GgmModel model = make_model(generate_geometric_graph(40, 50 + seed, Kernel::Text));
    for (Index a = 0; a < 40; a += 5)
      for (Index b = 0; b < 40; ++b)
        if (b != a && !model.graph.edges.contains(a, b))
          CHECK(std::fabs(neighborhood_stability(model.covariance, model.precision, a, b)) < 1.0);
  }
}

TEST_CASE("model JSON round trip") {
  const GgmModel model = make_model(generate_geometric_graph(60, 12, Kernel::Local));
  const std::string text = model_to_json(model, Kernel::Local, 12);
  const GgmModel back = model_from_json(text);
  CHECK(back.graph.edges == model.graph.edges);
  CHECK(back.graph.raw_edge_count == model.graph.raw_edge_count);
  CHECK((back.graph.positions == model.graph.positions));
  CHECK((back.precision.dense() == model.precision.dense()));
  CHECK((back.covariance.dense() - model.covariance.dense()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(model_to_json(back, Kernel::Local, 12) == text);

  CHECK(oracle::thrown_kind([] { model_from_json("{not json"); }) == ErrorKind::ParseError);
  CHECK(oracle::thrown_kind([] { model_from_json(R"({"p": 2, "positions": [[0,0]]})"); }) ==
        ErrorKind::ParseError);
}
