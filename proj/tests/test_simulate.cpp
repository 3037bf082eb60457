#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "dpmnet/simulate.hpp"
#include "oracles.hpp"

using namespace dpmnet;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

TEST_CASE("topological order expands the smallest ready index first") {
  DagSpec dag;
  dag.p = 4;
  dag.names = default_names(4);
  dag.parents = {{1}, {3}, {}, {}};
  CHECK(topological_order(dag) == std::vector<int>{2, 3, 1, 0});
}

TEST_CASE("dag validation rejects malformed graphs") {
  DagSpec dag;
  dag.p = 3;
  dag.names = default_names(3);

  dag.parents = {{1}, {0}, {}};
  CHECK_THROWS_WITH(validate_dag(dag), ContainsSubstring("cycle"));

  dag.parents = {{}, {}, {1, 0}};
  CHECK_THROWS_WITH(validate_dag(dag), ContainsSubstring("sorted"));

  dag.parents = {{}, {}, {0, 0}};
  CHECK_THROWS_WITH(validate_dag(dag), ContainsSubstring("sorted"));

  dag.parents = {{}, {1}, {}};
  CHECK_THROWS_WITH(validate_dag(dag), ContainsSubstring("self loop"));

  dag.parents = {{7}, {}, {}};
  CHECK_THROWS_WITH(validate_dag(dag), ContainsSubstring("out of range"));

  dag.parents = {{}, {}};
  CHECK_THROWS_AS(validate_dag(dag), dimension_error);
}

TEST_CASE("random dags are valid, deterministic, and seed sensitive") {
  const DagSpec a = random_dag(12, 2.0, 5);
  const DagSpec b = random_dag(12, 2.0, 5);
  const DagSpec c = random_dag(12, 2.0, 6);
  CHECK(a.parents == b.parents);
  CHECK(a.parents != c.parents);
  CHECK(a.names == default_names(12));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CHECK_NOTHROW(validate_dag(random_dag(10, 2.5, seed)));
  }
}

TEST_CASE("random dag edge count follows the expected parent setting") {
  // expected_parents = p - 1 forces every forward pair to be linked.
  const DagSpec full = random_dag(6, 5.0, 3);
  CHECK(skeleton(full).edge_count() == 15);
  CHECK(skeleton(random_dag(6, 0.0, 3)).edge_count() == 0);

  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    total += static_cast<double>(skeleton(random_dag(8, 2.0, seed)).edge_count());
  }
  const double mean = total / 200.0;  // expected 28 * 2/7 = 8
  CHECK(mean > 7.0);
  CHECK(mean < 9.0);
}

TEST_CASE("random dag parameter guards") {
  CHECK_THROWS_AS(random_dag(1, 2.0, 0), dimension_error);
  CHECK_THROWS_AS(random_dag(5, -1.0, 0), value_error);
}

TEST_CASE("covariance model inverts a sparse positive definite precision") {
  const DagSpec dag = random_dag(10, 2.0, 11);
  const GoldStandard gold = skeleton(dag);
  const CovarianceModel model = dag_to_covariance(dag, 23);
  const int p = dag.p;

  for (int i = 0; i < p; ++i) {
    double offdiag = 0.0;
    for (int j = 0; j < p; ++j) {
      if (i == j) continue;
      offdiag += std::abs(model.omega(i, j));
      if (gold.has_edge(i, j)) {
        const double mag = std::abs(model.omega(i, j));
        CHECK(mag >= 0.2);
        CHECK(mag <= 0.8);
      } else {
        CHECK(model.omega(i, j) == 0.0);
      }
    }
    CHECK_THAT(model.omega(i, i), WithinAbs(offdiag + 0.1, 1e-12));
  }

  CHECK(oracle::positive_definite(model.omega));
  CHECK(oracle::positive_definite(model.covariance));

  const Eigen::MatrixXd prod = model.covariance * model.omega;
  CHECK((prod - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((model.covariance - model.covariance.transpose()).cwiseAbs().maxCoeff() == 0.0);

  const CovarianceModel again = dag_to_covariance(dag, 23);
  CHECK((again.omega.array() == model.omega.array()).all());
  CHECK_THROWS_AS(dag_to_covariance(dag, 23, 0.0, 0.8), value_error);
  CHECK_THROWS_AS(dag_to_covariance(dag, 23, 0.5, 0.2), value_error);
}

TEST_CASE("gaussian sampling is deterministic and matches the target covariance") {
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, 0.5, 0.5, 1.0;
  const Dataset d = sample_gaussian(cov, 20000, 31);
  CHECK(d.values.rows() == 20000);
  CHECK(d.names == std::vector<std::string>{"V1", "V2"});

  Eigen::MatrixXd centered = d.values.rowwise() - d.values.colwise().mean();
  Eigen::MatrixXd sample_cov =
      centered.transpose() * centered / static_cast<double>(d.values.rows() - 1);
  CHECK((sample_cov - cov).cwiseAbs().maxCoeff() < 0.05);

  const Dataset again = sample_gaussian(cov, 20000, 31);
  CHECK((again.values.array() == d.values.array()).all());
  const Dataset other = sample_gaussian(cov, 100, 32);
  CHECK(other.values(0, 0) != d.values(0, 0));

  const Dataset named = sample_gaussian(cov, 5, 0, {"A", "B"});
  CHECK(named.names == std::vector<std::string>{"A", "B"});
  CHECK_THROWS_AS(sample_gaussian(cov, 5, 0, {"A"}), dimension_error);

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(sample_gaussian(indefinite, 10, 0), numeric_error);
}

TEST_CASE("noise at sigma 0 leaves values untouched") {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(3, 3);
  Dataset d = sample_gaussian(cov, 10, 1);
  const Eigen::MatrixXd before = d.values;
  add_noise(d, 0.0, 99);
  CHECK((d.values.array() == before.array()).all());
  add_noise(d, 0.5, 99);
  CHECK((d.values.array() != before.array()).any());
  CHECK_THROWS_AS(add_noise(d, -0.1, 0), value_error);
}

TEST_CASE("benchmark topology has eleven nodes and thirteen edges") {
  const DagSpec dag = gs_topology();
  CHECK(dag.p == 11);
  CHECK(dag.names.front() == "G1");
  CHECK(dag.names.back() == "G11");
  CHECK(topological_order(dag) == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10});

  const GoldStandard gold = skeleton(dag);
  CHECK(gold.edge_count() == 13);
  CHECK(dag.parents[0].empty());
  CHECK(dag.parents[5] == std::vector<int>{3, 4});   // collider at G6
  CHECK(dag.parents[7] == std::vector<int>{5, 6});   // feed-forward close at G8
  CHECK(dag.parents[9] == std::vector<int>{1, 8});   // long-range edge into G10
  CHECK(dag.parents[4] == std::vector<int>{2});      // fork out of G3
}

TEST_CASE("edge function assignment is identical across calls") {
  const DagSpec dag = gs_topology();
  const auto f1 = gs_edge_functions(dag);
  const auto f2 = gs_edge_functions(dag);
  CHECK(f1 == f2);
  for (int c = 0; c < dag.p; ++c) {
    CHECK(f1[static_cast<std::size_t>(c)].size() ==
          dag.parents[static_cast<std::size_t>(c)].size());
  }
}

TEST_CASE("a squared edge with zero noise reproduces the parent exactly") {
  DagSpec dag;
  dag.p = 2;
  dag.names = {"A", "B"};
  dag.parents = {{}, {0}};
  const std::vector<std::vector<EdgeFunction>> functions = {{}, {EdgeFunction::square}};
  const Dataset d = simulate_from_dag(dag, functions, {50, 0.0, 5});

  const Eigen::VectorXd raw = d.values.col(0).array().square();
  const double mean = raw.mean();
  const double sd = std::sqrt((raw.array() - mean).square().sum() / 49.0);
  for (Eigen::Index i = 0; i < 50; ++i) {
    CHECK_THAT(d.values(i, 1), WithinAbs(raw(i) / sd, 1e-14));
  }
}

TEST_CASE("child columns are rescaled to unit sample variance") {
  const Simulation sim = simulate_gs({100, 1.0, 17});
  for (Eigen::Index j = 1; j < 11; ++j) {
    const Eigen::VectorXd col = sim.data.values.col(j);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / 99.0;
    CHECK_THAT(var, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("root draws do not depend on the noise level") {
  const Simulation quiet = simulate_gs({60, 0.0, 21});
  const Simulation loud = simulate_gs({60, 1.0, 21});
  CHECK((quiet.data.values.col(0).array() == loud.data.values.col(0).array()).all());
  CHECK((quiet.data.values.col(5).array() != loud.data.values.col(5).array()).any());
}

TEST_CASE("benchmark simulation is deterministic with a matching gold standard") {
  const Simulation a = simulate_gs({40, 1.0, 3});
  const Simulation b = simulate_gs({40, 1.0, 3});
  const Simulation c = simulate_gs({40, 1.0, 4});
  CHECK((a.data.values.array() == b.data.values.array()).all());
  CHECK((a.data.values.array() != c.data.values.array()).any());
  CHECK(a.gold.edges == skeleton(gs_topology()).edges);
  CHECK(a.data.names == default_names(11, "G"));
}

TEST_CASE("structural simulation input guards") {
  DagSpec dag;
  dag.p = 2;
  dag.names = {"A", "B"};
  dag.parents = {{}, {0}};
  const std::vector<std::vector<EdgeFunction>> functions = {{}, {EdgeFunction::square}};
  CHECK_THROWS_AS(simulate_from_dag(dag, {{}, {}}, {50, 0.0, 0}), dimension_error);
  CHECK_THROWS_AS(simulate_from_dag(dag, {{}}, {50, 0.0, 0}), dimension_error);
  CHECK_THROWS_AS(simulate_from_dag(dag, functions, {2, 0.0, 0}), dimension_error);
  CHECK_THROWS_AS(simulate_from_dag(dag, functions, {50, -1.0, 0}), value_error);
}
