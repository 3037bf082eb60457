#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "dpmnet/dcov.hpp"
#include "dpmnet/dataset.hpp"
#include "dpmnet/error.hpp"
#include "dpmnet/parallel.hpp"
#include "dpmnet/score_matrix.hpp"

namespace dpmnet {

enum class GramSource { correlation, dcor2 };
enum class InversionMode { naive, shrinkage };

inline constexpr double kMinEigenvalue = 1e-10;

// Unit-diagonal association Gram. pair_var_sums holds per-pair
// sum_k (w_k - wbar)^2 over the centered cross products of the underlying
// observation stream (rows for correlation, centered-matrix entries for
// dcor2); the shrinkage estimator needs these moments.
struct GramMatrix {
  Eigen::MatrixXd entries;
  GramSource source = GramSource::correlation;
  std::vector<std::string> names;
  std::int64_t effective_n = 0;
  Eigen::MatrixXd pair_var_sums;
  bool has_moments = false;

  Eigen::Index p() const { return entries.rows(); }
};

struct PrecisionMatrix {
  Eigen::MatrixXd entries;
  bool regularized = false;
  std::optional<double> shrinkage_intensity;
  std::vector<std::string> names;

  Eigen::Index p() const { return entries.rows(); }
};

// Pearson correlation Gram of the standardized columns.
inline GramMatrix correlation_gram(const Dataset& d) {
  const Dataset s = standardize_columns(d);
  const Eigen::Index n = s.n();
  const Eigen::Index p = s.p();
  const double denom = static_cast<double>(n - 1);

  GramMatrix g;
  g.source = GramSource::correlation;
  g.names = d.names;
  g.effective_n = n;
  g.entries.resize(p, p);
  g.pair_var_sums = Eigen::MatrixXd::Zero(p, p);
  g.has_moments = true;

  for (Eigen::Index i = 0; i < p; ++i) {
    g.entries(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const Eigen::ArrayXd w = s.values.col(i).array() * s.values.col(j).array();
      const double wsum = w.sum();
      const double wbar = wsum / static_cast<double>(n);
      const double r = wsum / denom;
      const double vs = (w - wbar).square().sum();
      g.entries(i, j) = g.entries(j, i) = std::clamp(r, -1.0, 1.0);
      g.pair_var_sums(i, j) = g.pair_var_sums(j, i) = vs;
    }
  }
  return g;
}

// dcor^2 Gram. Entry (i, j) is the inner product of the unit-normalized
// flattened double-centered matrices; accumulated pairwise so at most two
// n x n centered matrices are alive at a time.
inline GramMatrix dcor2_gram(const Dataset& d, int threads = 1) {
  validate_dataset(d);
  const Eigen::Index n = d.n();
  const Eigen::Index p = d.p();
  const double m = static_cast<double>(n) * static_cast<double>(n);

  GramMatrix g;
  g.source = GramSource::dcor2;
  g.names = d.names;
  g.effective_n = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n);
  g.entries = Eigen::MatrixXd::Identity(p, p);
  g.pair_var_sums = Eigen::MatrixXd::Zero(p, p);
  g.has_moments = true;

  std::vector<double> norms(static_cast<std::size_t>(p), 0.0);
  auto centered = [&d](Eigen::Index k) {
    return double_center(pairwise_distances(d.values.col(k))).entries;
  };
  for (Eigen::Index k = 0; k < p; ++k) {
    const double norm = centered(k).norm();
    if (norm <= 0.0) {
      throw value_error("constant column: " + d.names[static_cast<std::size_t>(k)]);
    }
    norms[static_cast<std::size_t>(k)] = norm;
  }

  parallel_for(p, threads, [&](Eigen::Index i) {
    const Eigen::MatrixXd ai = centered(i);
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const Eigen::MatrixXd aj = centered(j);
      const Eigen::ArrayXXd prod = ai.array() * aj.array();
      const double s = prod.sum();
      const double q = prod.square().sum();
      const double scale = norms[static_cast<std::size_t>(i)] *
                           norms[static_cast<std::size_t>(j)];
      const double r = std::clamp(s / scale, 0.0, 1.0);
      g.entries(i, j) = g.entries(j, i) = r;
      g.pair_var_sums(i, j) = g.pair_var_sums(j, i) =
          std::max(q / (scale * scale) - r * r / m, 0.0);
    }
  });
  return g;
}

// Schafer-Strimmer intensity toward the identity target:
// lambda* = clamp(sum var-hat(r_ij) / sum r_ij^2, 0, 1) over i != j, with
// var-hat built from the per-pair moments and the observation count.
inline std::pair<GramMatrix, double> shrink_gram(const GramMatrix& g,
                                                 std::int64_t effective_n) {
  if (!g.has_moments) {
    throw value_error("gram has no cross-product moments; rebuild it from data");
  }
  if (effective_n < 2) throw value_error("effective sample count must exceed 1");
  const double m = static_cast<double>(effective_n);
  const double c = g.source == GramSource::correlation ? 1.0 / (m - 1.0) : 1.0;
  const double var_scale = c * c * m / (m - 1.0);

  double num = 0.0, den = 0.0;
  const Eigen::Index p = g.p();
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (i == j) continue;
      num += var_scale * g.pair_var_sums(i, j);
      den += g.entries(i, j) * g.entries(i, j);
    }
  }

  GramMatrix out = g;
  out.has_moments = false;
  out.pair_var_sums.resize(0, 0);
  if (den == 0.0) return {std::move(out), 0.0};

  const double lambda = std::clamp(num / den, 0.0, 1.0);
  out.entries *= 1.0 - lambda;
  out.entries.diagonal().setOnes();
  return {std::move(out), lambda};
}

inline std::pair<GramMatrix, double> shrink_gram(const GramMatrix& g) {
  return shrink_gram(g, g.effective_n);
}

inline PrecisionMatrix invert_gram(const GramMatrix& g, InversionMode mode) {
  const Eigen::Index p = g.p();
  PrecisionMatrix out;
  out.names = g.names;

  const GramMatrix* target = &g;
  GramMatrix shrunk;
  if (mode == InversionMode::shrinkage) {
    auto [s, lambda] = shrink_gram(g, g.effective_n);
    shrunk = std::move(s);
    target = &shrunk;
    out.regularized = true;
    out.shrinkage_intensity = lambda;
  } else {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        target->entries, Eigen::EigenvaluesOnly);
    const double min_eig = eig.eigenvalues().minCoeff();
    if (min_eig <= kMinEigenvalue) {
      throw numeric_error(
          "gram matrix is singular or near-singular (min eigenvalue " +
          detail::format_double(min_eig) +
          "); use the shrinkage-regularized variant");
    }
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(target->entries);
  if (llt.info() != Eigen::Success) {
    throw numeric_error("Cholesky factorization failed; the gram matrix is not "
                        "positive definite");
  }
  out.entries = llt.solve(Eigen::MatrixXd::Identity(p, p));
  out.entries = ((out.entries + out.entries.transpose()) / 2.0).eval();
  return out;
}

// score(i, j) = -L_ij / sqrt(L_ii * L_jj)
inline ScoreMatrix partial_scores(const PrecisionMatrix& lam,
                                  const std::string& method = "") {
  const Eigen::Index p = lam.p();
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(lam.entries(i, i) > 0.0)) {
      throw numeric_error("precision diagonal must be positive, got " +
                          detail::format_double(lam.entries(i, i)) +
                          " at variable " + std::to_string(i + 1));
    }
  }
  ScoreMatrix m;
  m.names = lam.names;
  m.method = method;
  m.scores = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double v = -lam.entries(i, j) /
                       std::sqrt(lam.entries(i, i) * lam.entries(j, j));
      m.scores(i, j) = m.scores(j, i) = v;
    }
  }
  return m;
}

enum class GramMethod { cor, pcor, reg_pcor, dpm, reg_dpm };

struct MethodOutput {
  ScoreMatrix scores;
  std::optional<double> lambda;
};

// The correlation- and precision-based scorers share this dispatch; dpm is
// the partial-score transform of the inverted dcor^2 Gram.
inline MethodOutput method_matrix(const Dataset& d, GramMethod method,
                                  int threads = 1) {
  MethodOutput out;
  switch (method) {
    case GramMethod::cor: {
      const GramMatrix g = correlation_gram(d);
      out.scores.names = g.names;
      out.scores.method = "cor";
      out.scores.scores = g.entries;
      out.scores.scores.diagonal().setZero();
      return out;
    }
    case GramMethod::pcor:
    case GramMethod::reg_pcor: {
      const bool reg = method == GramMethod::reg_pcor;
      const GramMatrix g = correlation_gram(d);
      try {
        const PrecisionMatrix lam =
            invert_gram(g, reg ? InversionMode::shrinkage : InversionMode::naive);
        out.lambda = lam.shrinkage_intensity;
        out.scores = partial_scores(lam, reg ? "reg-pcor" : "pcor");
      } catch (const numeric_error& e) {
        if (reg) throw;
        throw numeric_error(std::string("pcor: ") + e.what() +
                            "; try method reg-pcor");
      }
      return out;
    }
    case GramMethod::dpm:
    case GramMethod::reg_dpm: {
      const bool reg = method == GramMethod::reg_dpm;
      const GramMatrix g = dcor2_gram(d, threads);
      try {
        const PrecisionMatrix lam =
            invert_gram(g, reg ? InversionMode::shrinkage : InversionMode::naive);
        out.lambda = lam.shrinkage_intensity;
        out.scores = partial_scores(lam, reg ? "reg-dpm" : "dpm");
      } catch (const numeric_error& e) {
        if (reg) throw;
        throw numeric_error(std::string("dpm: ") + e.what() +
                            "; try method reg-dpm");
      }
      return out;
    }
  }
  throw value_error("unknown gram method");
}

}  // namespace dpmnet
