#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "dpmnet/competitors.hpp"
#include "dpmnet/rng.hpp"
#include "oracles.hpp"

using namespace dpmnet;
using Catch::Matchers::WithinAbs;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

Dataset random_dataset(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  rng::Engine eng(seed);
  Dataset d;
  d.values.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) d.values(i, j) = eng.normal();
  }
  for (Eigen::Index j = 0; j < p; ++j) d.names.push_back("V" + std::to_string(j + 1));
  return d;
}

MIMatrix crafted_mi(std::initializer_list<double> upper,
                    std::initializer_list<std::string> names) {
  MIMatrix m;
  m.names = names;
  const auto p = static_cast<Eigen::Index>(m.names.size());
  m.bins = 4;
  m.entries = Eigen::MatrixXd::Zero(p, p);
  auto it = upper.begin();
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      m.entries(i, j) = *it;
      m.entries(j, i) = *it;
      ++it;
    }
  }
  return m;
}

}  // namespace

TEST_CASE("default bin count grows with the square root of n over 5") {
  CHECK(default_bins(5) == 2);
  CHECK(default_bins(20) == 2);
  CHECK(default_bins(21) == 3);
  CHECK(default_bins(80) == 4);
  CHECK(default_bins(500) == 10);
  CHECK(default_bins(3) == 2);
}

TEST_CASE("mutual information of a bijective map over 4 bins is log 4") {
  const Eigen::VectorXd x = vec({0, 1, 2, 3});
  CHECK_THAT(mutual_information(x, x, 4), WithinAbs(std::log(4.0), 1e-12));
}

TEST_CASE("mutual information of factorizing counts is 0") {
  const Eigen::VectorXd x = vec({0, 0, 1, 1});
  const Eigen::VectorXd y = vec({0, 1, 0, 1});
  CHECK_THAT(mutual_information(x, y, 2), WithinAbs(0.0, 1e-15));
}

TEST_CASE("mutual information with a constant variable is 0") {
  const Eigen::VectorXd x = vec({5, 5, 5, 5});
  const Eigen::VectorXd y = vec({1, 2, 3, 4});
  CHECK(mutual_information(x, y, 2) == 0.0);
}

TEST_CASE("mutual information is symmetric") {
  rng::Engine eng(3);
  Eigen::VectorXd x(30), y(30);
  for (Eigen::Index i = 0; i < 30; ++i) {
    x(i) = eng.normal();
    y(i) = x(i) * x(i) + 0.3 * eng.normal();
  }
  CHECK_THAT(mutual_information(x, y, 5),
             WithinAbs(mutual_information(y, x, 5), 1e-14));
  CHECK(mutual_information(x, y, 5) > 0.0);
}

TEST_CASE("the largest value lands in the last bin") {
  // With two bins over [0, 4], the split is at 2.
  const Eigen::VectorXd x = vec({0, 1, 2, 3, 4});
  const Eigen::VectorXd y = vec({0, 0, 1, 1, 1});
  // Identical grouping: x in {0,1} vs {2,3,4} matches y in {0} vs {1}.
  const double mi = mutual_information(x, y, 2);
  const double expect = 0.4 * std::log(0.4 / (0.4 * 0.4)) +
                        0.6 * std::log(0.6 / (0.6 * 0.6));
  CHECK_THAT(mi, WithinAbs(expect, 1e-12));
}

TEST_CASE("mutual information input guards") {
  const Eigen::VectorXd x = vec({1, 2, 3});
  CHECK_THROWS_AS(mutual_information(x, vec({1, 2}), 2), dimension_error);
  CHECK_THROWS_AS(mutual_information(x, x, 1), value_error);
  CHECK_THROWS_AS(mutual_information(x, x, 4), dimension_error);
}

TEST_CASE("mi matrix is symmetric with zero diagonal and recorded bins") {
  const Dataset d = random_dataset(50, 4, 7);
  const MIMatrix m = mi_matrix(d, 0, 1);
  CHECK(m.bins == default_bins(50));
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(m.entries(i, i) == 0.0);
    for (Eigen::Index j = i + 1; j < 4; ++j) {
      CHECK(m.entries(i, j) == m.entries(j, i));
      CHECK(m.entries(i, j) ==
            mutual_information(d.values.col(i), d.values.col(j), m.bins));
    }
  }
  CHECK((mi_matrix(d, 0, 3).entries.array() == m.entries.array()).all());
}

TEST_CASE("dpi removes the weakest side of every triangle") {
  const MIMatrix m = crafted_mi({0.6, 0.2, 0.5}, {"A", "B", "C"});
  // AB=0.6, AC=0.2, BC=0.5: AC is dominated through B.
  const ScoreMatrix pruned = apply_dpi(m, 0.0);
  CHECK(pruned.scores(0, 1) == 0.6);
  CHECK(pruned.scores(0, 2) == 0.0);
  CHECK(pruned.scores(1, 2) == 0.5);
}

TEST_CASE("dpi epsilon relaxes the removal margin") {
  const MIMatrix m = crafted_mi({0.6, 0.2, 0.5}, {"A", "B", "C"});
  CHECK(apply_dpi(m, 0.25).scores(0, 2) == 0.0);  // 0.2 <= 0.5 - 0.25
  CHECK(apply_dpi(m, 0.4).scores(0, 2) == 0.2);   // 0.2 >  0.5 - 0.4
}

TEST_CASE("an exact mi tie is removed at epsilon 0") {
  const MIMatrix m = crafted_mi({0.4, 0.4, 0.4}, {"A", "B", "C"});
  const ScoreMatrix pruned = apply_dpi(m, 0.0);
  CHECK(pruned.scores.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dpi marks come from the original matrix, so a chain survives") {
  const MIMatrix m = crafted_mi({0.9, 0.5, 0.3, 0.8, 0.4, 0.7},
                                {"A", "B", "C", "D"});
  // AB=0.9, AC=0.5, AD=0.3, BC=0.8, BD=0.4, CD=0.7
  const ScoreMatrix pruned = apply_dpi(m, 0.0);
  CHECK(pruned.scores(0, 1) == 0.9);
  CHECK(pruned.scores(1, 2) == 0.8);
  CHECK(pruned.scores(2, 3) == 0.7);
  CHECK(pruned.scores(0, 2) == 0.0);
  CHECK(pruned.scores(1, 3) == 0.0);
  CHECK(pruned.scores(0, 3) == 0.0);
}

TEST_CASE("aracne scores dependent pairs above independent ones") {
  rng::Engine eng(9);
  Dataset d;
  d.names = {"A", "B", "C"};
  d.values.resize(200, 3);
  for (Eigen::Index i = 0; i < 200; ++i) {
    d.values(i, 0) = eng.normal();
    d.values(i, 1) = d.values(i, 0) + 0.3 * eng.normal();
    d.values(i, 2) = eng.normal();
  }
  const ScoreMatrix m = aracne_matrix(d, 0, 0.0, 1);
  CHECK(m.scores(0, 1) > m.scores(0, 2));
  CHECK(m.scores(0, 1) > m.scores(1, 2));
  CHECK_THROWS_AS(aracne_matrix(d, 0, -0.1, 1), value_error);
}

TEST_CASE("nd eigenvalue map at lambda 1 gamma 1 is one half") {
  CHECK(detail::nd_eigen_map(1.0, 1.0) == 0.5);
}

TEST_CASE("nd gamma pins the binding eigenvalue at the beta bound") {
  Eigen::VectorXd ev(3);
  ev << 1.0, -0.5, 0.2;
  const double beta = 0.9;
  const double gamma = detail::nd_gamma(ev, beta);
  double largest = 0.0;
  for (Eigen::Index i = 0; i < 3; ++i) {
    const double mapped = detail::nd_eigen_map(ev(i), gamma);
    CHECK(std::abs(mapped) <= beta + 1e-12);
    largest = std::max(largest, std::abs(mapped));
  }
  CHECK_THAT(largest, WithinAbs(beta, 1e-12));
}

TEST_CASE("nd suppresses the transitive edge of a correlation chain") {
  rng::Engine eng(13);
  Dataset d;
  d.names = {"A", "B", "C"};
  d.values.resize(500, 3);
  for (Eigen::Index i = 0; i < 500; ++i) {
    d.values(i, 0) = eng.normal();
    d.values(i, 1) = 0.8 * d.values(i, 0) + 0.6 * eng.normal();
    d.values(i, 2) = 0.8 * d.values(i, 1) + 0.6 * eng.normal();
  }
  const ScoreMatrix m = nd_matrix(d, 0.9);
  CHECK(m.scores(0, 0) == 0.0);
  CHECK(m.scores(0, 1) == m.scores(1, 0));
  CHECK(std::abs(m.scores(0, 2)) < std::abs(m.scores(0, 1)));
  CHECK(std::abs(m.scores(0, 2)) < std::abs(m.scores(1, 2)));
}

TEST_CASE("nd beta must lie strictly between 0 and 1") {
  const Dataset d = random_dataset(20, 3, 15);
  CHECK_THROWS_AS(nd_matrix(d, 0.0), value_error);
  CHECK_THROWS_AS(nd_matrix(d, 1.0), value_error);
  CHECK_THROWS_AS(nd_matrix(d, -0.5), value_error);
  CHECK_NOTHROW(nd_matrix(d, 0.5));
}
