#include <catch2/catch_amalgamated.hpp>

#include "dpmnet/dcov.hpp"
#include "dpmnet/rng.hpp"
#include "oracles.hpp"

using namespace dpmnet;
using Catch::Matchers::WithinAbs;

namespace {

Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
  rng::Engine eng(seed);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = eng.normal();
  return v;
}

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("pairwise distances of a two-point vector") {
  const DistanceMatrix a = pairwise_distances(vec({0, 1}));
  CHECK(a.entries(0, 0) == 0.0);
  CHECK(a.entries(0, 1) == 1.0);
  CHECK(a.entries(1, 0) == 1.0);
  CHECK(a.entries(1, 1) == 0.0);
}

TEST_CASE("double centering the two-point distance matrix") {
  const CenteredDistanceMatrix c = double_center(pairwise_distances(vec({0, 1})));
  CHECK(c.entries(0, 0) == -0.5);
  CHECK(c.entries(0, 1) == 0.5);
  CHECK(c.entries(1, 0) == 0.5);
  CHECK(c.entries(1, 1) == -0.5);
}

TEST_CASE("double centering x = (0, 1, 3)") {
  const CenteredDistanceMatrix c =
      double_center(pairwise_distances(vec({0, 1, 3})));
  Eigen::MatrixXd expect(3, 3);
  expect << -4.0 / 3.0, 0.0, 4.0 / 3.0,
             0.0, -2.0 / 3.0, 2.0 / 3.0,
             4.0 / 3.0, 2.0 / 3.0, -2.0;
  CHECK((c.entries - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("centered rows and columns sum to zero") {
  const Eigen::VectorXd x = random_vector(23, 11);
  const CenteredDistanceMatrix c = double_center(pairwise_distances(x));
  for (Eigen::Index i = 0; i < 23; ++i) {
    CHECK_THAT(c.entries.row(i).sum(), WithinAbs(0.0, 1e-10));
    CHECK_THAT(c.entries.col(i).sum(), WithinAbs(0.0, 1e-10));
  }
}

TEST_CASE("dcov^2 of two identical two-point vectors is 1/4") {
  const CenteredDistanceMatrix c = double_center(pairwise_distances(vec({0, 1})));
  CHECK_THAT(dcov2(c, c), WithinAbs(0.25, 1e-15));
}

TEST_CASE("dcor of strictly monotone two-point vectors is 1") {
  CHECK(dcor(vec({0, 1}), vec({1, 3})) == 1.0);
}

TEST_CASE("dcor is 0 when a variable is constant") {
  CHECK(dcor(vec({1, 1, 1}), vec({0, 5, 2})) == 0.0);
}

TEST_CASE("dcor matches the materialized formula on random data") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Eigen::Index n = 5 + static_cast<Eigen::Index>(seed % 40);
    const Eigen::VectorXd x = random_vector(n, seed);
    Eigen::VectorXd y = random_vector(n, seed + 1000);
    if (seed % 3 == 0) y = (x.array() * x.array()).matrix() + 0.3 * y;
    CHECK_THAT(dcor(x, y), WithinAbs(oracle::dcor(x, y), 1e-12));
  }
}

TEST_CASE("dcov^2 is nonnegative and bounded by its factors") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Eigen::VectorXd x = random_vector(30, seed);
    const Eigen::VectorXd y = random_vector(30, seed + 500);
    const double vxy = oracle::dcov2(x, y);
    CHECK(vxy >= 0.0);
    CHECK(vxy * vxy <= oracle::dcov2(x, x) * oracle::dcov2(y, y) + 1e-12);
    const double r = dcor(x, y);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("dcor is invariant to shift and scale and detects nonlinear links") {
  const Eigen::VectorXd x = random_vector(60, 3);
  const Eigen::VectorXd y = (x.array() * x.array()).matrix();
  const double base = dcor(x, y);
  CHECK(base > 0.4);
  const Eigen::VectorXd xs = 3.0 * x.array() - 7.0;
  const Eigen::VectorXd ys = 0.5 * y.array() + 2.0;
  CHECK_THAT(dcor(xs, ys), WithinAbs(base, 1e-12));
  // Pearson misses the symmetric square link almost entirely.
  CHECK(std::abs(oracle::pearson(x, y)) < 0.3);
}

TEST_CASE("squared dcor equals the correlation of flattened centered matrices") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Eigen::Index n = 8 + static_cast<Eigen::Index>(seed);
    const Eigen::VectorXd x = random_vector(n, seed);
    const Eigen::VectorXd y = random_vector(n, seed + 77);
    const Eigen::VectorXd vx =
        oracle::flatten(oracle::double_center(oracle::distances(x)));
    const Eigen::VectorXd vy =
        oracle::flatten(oracle::double_center(oracle::distances(y)));
    CHECK_THAT(vx.mean(), WithinAbs(0.0, 1e-12));
    const double r = dcor(x, y);
    CHECK_THAT(r * r, WithinAbs(oracle::pearson(vx, vy), 1e-12));
  }
}

TEST_CASE("euclidean row distances reduce to scalar distances for one column") {
  const Eigen::VectorXd x = random_vector(12, 9);
  const DistanceMatrix direct = pairwise_distances(x);
  const DistanceMatrix viarows = euclidean_row_distances(x);
  CHECK((direct.entries - viarows.entries).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("euclidean row distances on two columns") {
  Eigen::MatrixXd z(3, 2);
  z << 0, 0, 3, 4, 0, 8;
  const DistanceMatrix d = euclidean_row_distances(z);
  CHECK(d.entries(0, 1) == 5.0);
  CHECK(d.entries(1, 2) == 5.0);
  CHECK(d.entries(0, 2) == 8.0);
}

TEST_CASE("u-centered off-diagonal rows sum to zero and diagonal is zero") {
  const Eigen::VectorXd x = random_vector(15, 21);
  const UCenteredMatrix u = u_center(pairwise_distances(x));
  for (Eigen::Index i = 0; i < 15; ++i) {
    CHECK(u.entries(i, i) == 0.0);
    CHECK_THAT(u.entries.row(i).sum(), WithinAbs(0.0, 1e-10));
  }
  const Eigen::MatrixXd expect = oracle::u_center(oracle::distances(x));
  CHECK((u.entries - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("u-centering needs at least four samples") {
  CHECK_THROWS_AS(u_center(pairwise_distances(vec({0, 1, 2}))), dimension_error);
}

TEST_CASE("bias-corrected dcor^2 matches its materialized formula") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Eigen::Index n = 6 + static_cast<Eigen::Index>(seed);
    const Eigen::VectorXd x = random_vector(n, seed);
    const Eigen::VectorXd y = random_vector(n, seed + 333);
    CHECK_THAT(bias_corrected_dcor2(x, y),
               WithinAbs(oracle::bc_dcor2(x, y), 1e-12));
  }
}

TEST_CASE("bias-corrected dcor^2 can be negative for independent draws") {
  int negatives = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Eigen::VectorXd x = random_vector(10, seed);
    const Eigen::VectorXd y = random_vector(10, seed + 12345);
    if (bias_corrected_dcor2(x, y) < 0.0) ++negatives;
  }
  CHECK(negatives > 0);
}

TEST_CASE("dcor matrix agrees with pairwise dcor and is thread-count invariant") {
  rng::Engine eng(5);
  Dataset d;
  d.names = {"A", "B", "C", "D"};
  d.values.resize(25, 4);
  for (Eigen::Index i = 0; i < 25; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) d.values(i, j) = eng.normal();
  }
  const ScoreMatrix one = dcor_matrix(d, 1);
  const ScoreMatrix three = dcor_matrix(d, 3);
  CHECK(one.scores == three.scores);
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(one.scores(i, i) == 0.0);
    for (Eigen::Index j = i + 1; j < 4; ++j) {
      CHECK_THAT(one.scores(i, j),
                 WithinAbs(oracle::dcor(d.values.col(i), d.values.col(j)), 1e-12));
    }
  }
}

TEST_CASE("permutation p-value is small for dependent data and deterministic") {
  const Eigen::VectorXd x = random_vector(40, 8);
  const Eigen::VectorXd y = (x.array() * x.array()).matrix();
  const double p1 = permutation_pvalue(x, y, 99, 4);
  const double p2 = permutation_pvalue(x, y, 99, 4, 3);
  CHECK(p1 == p2);
  CHECK(p1 <= 0.05);
  const Eigen::VectorXd z = random_vector(40, 99);
  const double pnull = permutation_pvalue(x, z, 99, 4);
  CHECK(pnull > 0.05);
}

TEST_CASE("mismatched lengths are rejected") {
  CHECK_THROWS_AS(dcor(vec({1, 2, 3}), vec({1, 2})), dimension_error);
}
