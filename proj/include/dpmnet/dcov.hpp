#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dpmnet/dataset.hpp"
#include "dpmnet/error.hpp"
#include "dpmnet/parallel.hpp"
#include "dpmnet/rng.hpp"
#include "dpmnet/score_matrix.hpp"

namespace dpmnet {

// Round-off slack for statistics that are nonnegative in exact arithmetic.
inline constexpr double kNegativeSlack = 1e-12;

struct DistanceMatrix {
  Eigen::MatrixXd entries;
  Eigen::Index n() const { return entries.rows(); }
};

struct CenteredDistanceMatrix {
  Eigen::MatrixXd entries;
  Eigen::Index n() const { return entries.rows(); }
};

struct UCenteredMatrix {
  Eigen::MatrixXd entries;
  Eigen::Index n() const { return entries.rows(); }
};

inline DistanceMatrix pairwise_distances(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  if (n < 2) throw dimension_error("pairwise_distances needs at least 2 values");
  DistanceMatrix d;
  d.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.entries(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::abs(x(i) - x(j));
      d.entries(i, j) = v;
      d.entries(j, i) = v;
    }
  }
  return d;
}

// Euclidean distances between the rows of a multivariate block.
inline DistanceMatrix euclidean_row_distances(const Eigen::MatrixXd& z) {
  const Eigen::Index n = z.rows();
  if (n < 2) throw dimension_error("euclidean_row_distances needs at least 2 rows");
  if (z.cols() < 1) throw dimension_error("conditioning block needs at least 1 column");
  DistanceMatrix d;
  d.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.entries(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = (z.row(i) - z.row(j)).norm();
      d.entries(i, j) = v;
      d.entries(j, i) = v;
    }
  }
  return d;
}

// a_ij - rowmean_i - colmean_j + grandmean
inline CenteredDistanceMatrix double_center(const DistanceMatrix& a) {
  const Eigen::VectorXd row_means = a.entries.rowwise().mean();
  const Eigen::RowVectorXd col_means = a.entries.colwise().mean();
  const double grand = a.entries.mean();
  CenteredDistanceMatrix c;
  c.entries = a.entries;
  c.entries.colwise() -= row_means;
  c.entries.rowwise() -= col_means;
  c.entries.array() += grand;
  return c;
}

// dcov^2_n = (1/n^2) sum_ij Ahat_ij * Bhat_ij; nonnegative up to round-off.
inline double dcov2(const CenteredDistanceMatrix& a, const CenteredDistanceMatrix& b) {
  if (a.n() != b.n()) {
    throw dimension_error("centered matrices differ in size: " +
                          std::to_string(a.n()) + " vs " + std::to_string(b.n()));
  }
  const double n2 = static_cast<double>(a.n()) * static_cast<double>(a.n());
  const double v = (a.entries.array() * b.entries.array()).sum() / n2;
  if (v < -kNegativeSlack) {
    throw numeric_error("dcov^2 is negative beyond round-off: " +
                        detail::format_double(v));
  }
  return v < 0.0 ? 0.0 : v;
}

namespace detail {

struct PairAccum {
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
};

// One O(n^2) sweep accumulating the three centered cross sums without
// materializing the n x n matrices; row means first, then per-row vector ops.
inline PairAccum dcov_pair_sums(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd arow = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd brow = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    arow(i) = (x.array() - x(i)).abs().sum();
    brow(i) = (y.array() - y(i)).abs().sum();
  }
  arow /= static_cast<double>(n);
  brow /= static_cast<double>(n);
  const double ag = arow.mean();
  const double bg = brow.mean();

  PairAccum acc;
  Eigen::ArrayXd va(n), vb(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    va = (x.array() - x(i)).abs() - arow.array() + (ag - arow(i));
    vb = (y.array() - y(i)).abs() - brow.array() + (bg - brow(i));
    acc.sab += (va * vb).sum();
    acc.saa += (va * va).sum();
    acc.sbb += (vb * vb).sum();
  }
  return acc;
}

inline double dcor_from_sums(const PairAccum& acc) {
  if (acc.saa <= 0.0 || acc.sbb <= 0.0) return 0.0;
  double r2 = acc.sab / std::sqrt(acc.saa * acc.sbb);
  if (r2 < 0.0) r2 = 0.0;
  if (r2 > 1.0) r2 = 1.0;
  return std::sqrt(r2);
}

}  // namespace detail

// Sample distance correlation in [0, 1]; 0 when either variable is constant.
inline double dcor(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) {
    throw dimension_error("dcor inputs differ in length: " +
                          std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (x.size() < 2) throw dimension_error("dcor needs at least 2 samples");
  return detail::dcor_from_sums(detail::dcov_pair_sums(x, y));
}

inline ScoreMatrix dcor_matrix(const Dataset& d, int threads = 1) {
  validate_dataset(d);
  const Eigen::Index p = d.p();
  ScoreMatrix m;
  m.names = d.names;
  m.method = "dcor";
  m.scores = Eigen::MatrixXd::Zero(p, p);

  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
  }
  parallel_for(static_cast<Eigen::Index>(pairs.size()), threads, [&](Eigen::Index k) {
    const auto [i, j] = pairs[static_cast<std::size_t>(k)];
    const double v = dcor(d.values.col(i), d.values.col(j));
    m.scores(i, j) = v;
    m.scores(j, i) = v;
  });
  return m;
}

// U-centering: off-diagonal a_ij - rowsum_i/(n-2) - colsum_j/(n-2)
// + grandsum/((n-1)(n-2)); zero diagonal.
inline UCenteredMatrix u_center(const DistanceMatrix& a) {
  const Eigen::Index n = a.n();
  if (n < 4) throw dimension_error("u_center needs at least 4 samples");
  const Eigen::VectorXd row_sums = a.entries.rowwise().sum();
  const Eigen::RowVectorXd col_sums = a.entries.colwise().sum();
  const double grand = a.entries.sum();
  const double d1 = static_cast<double>(n - 2);
  const double d2 = static_cast<double>(n - 1) * static_cast<double>(n - 2);
  UCenteredMatrix u;
  u.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      u.entries(i, j) = i == j ? 0.0
                               : a.entries(i, j) - row_sums(i) / d1 -
                                     col_sums(j) / d1 + grand / d2;
    }
  }
  return u;
}

namespace detail {

inline double bias_corrected_from_entries(const Eigen::MatrixXd& a,
                                          const Eigen::MatrixXd& b) {
  const Eigen::Index n = a.rows();
  const double scale = static_cast<double>(n) * static_cast<double>(n - 3);
  const double uab = (a.array() * b.array()).sum() / scale;
  const double uaa = (a.array() * a.array()).sum() / scale;
  const double ubb = (b.array() * b.array()).sum() / scale;
  if (uaa <= 0.0 || ubb <= 0.0) return 0.0;
  return std::clamp(uab / std::sqrt(uaa * ubb), -1.0, 1.0);
}

}  // namespace detail

// Bias-corrected squared distance correlation R*; may be negative.
inline double bias_corrected_dcor2(const UCenteredMatrix& a, const UCenteredMatrix& b) {
  if (a.n() != b.n()) {
    throw dimension_error("u-centered matrices differ in size: " +
                          std::to_string(a.n()) + " vs " + std::to_string(b.n()));
  }
  if (a.n() < 4) throw dimension_error("bias_corrected_dcor2 needs at least 4 samples");
  return detail::bias_corrected_from_entries(a.entries, b.entries);
}

inline double bias_corrected_dcor2(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw dimension_error("inputs differ in length");
  return bias_corrected_dcor2(u_center(pairwise_distances(x)),
                              u_center(pairwise_distances(y)));
}

// One-sided permutation p-value (1 + #{dcor_perm >= dcor_obs}) / (B + 1).
// Permutation b uses its own generator derived from (seed, b), so the result
// does not depend on evaluation order.
inline double permutation_pvalue(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                 int permutations, std::uint64_t seed,
                                 int threads = 1) {
  if (permutations < 1) throw value_error("permutation count must be positive");
  const double observed = dcor(x, y);
  const auto n = static_cast<std::size_t>(y.size());
  std::vector<int> hits(static_cast<std::size_t>(permutations), 0);
  parallel_for(permutations, threads, [&](Eigen::Index b) {
    rng::Engine eng(rng::derive_seed(seed, static_cast<std::uint64_t>(b)));
    std::vector<double> perm(y.data(), y.data() + n);
    eng.shuffle(perm);
    Eigen::Map<const Eigen::VectorXd> yb(perm.data(), static_cast<Eigen::Index>(n));
    if (dcor(x, yb) >= observed) hits[static_cast<std::size_t>(b)] = 1;
  });
  int count = 0;
  for (int h : hits) count += h;
  return (1.0 + count) / (static_cast<double>(permutations) + 1.0);
}

}  // namespace dpmnet
