#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dpmnet/dcov.hpp"
#include "dpmnet/dataset.hpp"
#include "dpmnet/error.hpp"
#include "dpmnet/parallel.hpp"
#include "dpmnet/score_matrix.hpp"

namespace dpmnet {

enum class PdcorVariant { residual, sr };

namespace detail {

inline double centered_cross(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                             double xmean, double ymean) {
  const double m = static_cast<double>(x.size());
  return (x.array() * y.array()).sum() - m * xmean * ymean;
}

// Partial association of the flattened centered matrices A and B given C:
// each is regressed on (intercept, C) via the 2x2 normal equations, and the
// residual vectors are correlated. Residuals falling below
// 1e-12 * ||input|| count as numerically zero and give 0.
inline double pdcor_residual_core(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                  const Eigen::MatrixXd& c) {
  const double am = a.mean();
  const double bm = b.mean();
  const double cm = c.mean();
  const double scc = centered_cross(c, c, cm, cm);
  const double sac = centered_cross(a, c, am, cm);
  const double sbc = centered_cross(b, c, bm, cm);
  const double sab = centered_cross(a, b, am, bm);
  const double saa = centered_cross(a, a, am, am);
  const double sbb = centered_cross(b, b, bm, bm);

  // constant regressor: the slope column drops out of the normal equations
  const bool degenerate_c = scc <= 0.0;
  const double rab = degenerate_c ? sab : sab - sac * sbc / scc;
  const double raa = degenerate_c ? saa : saa - sac * sac / scc;
  const double rbb = degenerate_c ? sbb : sbb - sbc * sbc / scc;

  const double norm_ra = std::sqrt(std::max(raa, 0.0));
  const double norm_rb = std::sqrt(std::max(rbb, 0.0));
  if (norm_ra < 1e-12 * a.norm() || norm_rb < 1e-12 * b.norm()) return 0.0;
  return std::clamp(rab / (norm_ra * norm_rb), -1.0, 1.0);
}

inline double pdcor_sr_core(double rxy, double rxz, double ryz) {
  const double dx = 1.0 - rxz * rxz;
  const double dy = 1.0 - ryz * ryz;
  if (dx <= 1e-12 || dy <= 1e-12) return 0.0;
  return std::clamp((rxy - rxz * ryz) / std::sqrt(dx * dy), -1.0, 1.0);
}

inline void check_conditioning(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                               const Eigen::MatrixXd& z, Eigen::Index min_n,
                               const char* what) {
  if (x.size() != y.size() || x.size() != z.rows()) {
    throw dimension_error(std::string(what) + ": inputs differ in sample count");
  }
  if (z.cols() < 1) {
    throw dimension_error(std::string(what) + ": conditioning block needs at least 1 column");
  }
  if (x.size() < min_n) {
    throw dimension_error(std::string(what) + ": needs at least " +
                          std::to_string(min_n) + " samples");
  }
}

}  // namespace detail

// Residual-based partial distance correlation: correlation of the flattened
// double-centered matrices of x and y after regressing out the one of z.
inline double pdcor_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             const Eigen::MatrixXd& z) {
  detail::check_conditioning(x, y, z, 3, "pdcor_residual");
  const auto a = double_center(pairwise_distances(x));
  const auto b = double_center(pairwise_distances(y));
  const auto c = double_center(euclidean_row_distances(z));
  return detail::pdcor_residual_core(a.entries, b.entries, c.entries);
}

// Szekely-Rizzo projection form on bias-corrected R*; 0 when a denominator
// factor vanishes (|R*(x,z)| or |R*(y,z)| at 1).
inline double pdcor_sr(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const Eigen::MatrixXd& z) {
  detail::check_conditioning(x, y, z, 4, "pdcor_sr");
  const auto ax = u_center(pairwise_distances(x));
  const auto ay = u_center(pairwise_distances(y));
  const auto uz = u_center(euclidean_row_distances(z));
  const double rxy = bias_corrected_dcor2(ax, ay);
  const double rxz = bias_corrected_dcor2(ax, uz);
  const double ryz = bias_corrected_dcor2(ay, uz);
  return detail::pdcor_sr_core(rxy, rxz, ryz);
}

// All pairs, conditioning each on the full remaining block. The block's
// squared distances are assembled as full - d_i^2 - d_j^2 from per-column
// squared difference matrices, so each pair costs O(n^2).
inline ScoreMatrix pdcor_matrix(const Dataset& d, PdcorVariant variant,
                                int threads = 1) {
  validate_dataset(d);
  const Eigen::Index p = d.p();
  const Eigen::Index n = d.n();
  if (p < 3) throw dimension_error("pdcor_matrix needs at least 3 variables");
  if (variant == PdcorVariant::sr && n < 4) {
    throw dimension_error("pdcor_matrix (sr) needs at least 4 samples");
  }

  std::vector<Eigen::MatrixXd> sq(static_cast<std::size_t>(p));
  std::vector<Eigen::MatrixXd> centered(static_cast<std::size_t>(p));
  Eigen::MatrixXd full2 = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < p; ++k) {
    const auto dist = pairwise_distances(d.values.col(k));
    sq[static_cast<std::size_t>(k)] = dist.entries.array().square();
    full2 += sq[static_cast<std::size_t>(k)];
    centered[static_cast<std::size_t>(k)] =
        variant == PdcorVariant::residual ? double_center(dist).entries
                                          : u_center(dist).entries;
  }

  ScoreMatrix m;
  m.names = d.names;
  m.method = variant == PdcorVariant::residual ? "pdcor-residual" : "pdcor-sr";
  m.scores = Eigen::MatrixXd::Zero(p, p);

  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
  }
  parallel_for(static_cast<Eigen::Index>(pairs.size()), threads, [&](Eigen::Index k) {
    const auto [i, j] = pairs[static_cast<std::size_t>(k)];
    DistanceMatrix dz;
    dz.entries = (full2 - sq[static_cast<std::size_t>(i)] -
                  sq[static_cast<std::size_t>(j)])
                     .array()
                     .max(0.0)
                     .sqrt();
    const auto& ai = centered[static_cast<std::size_t>(i)];
    const auto& aj = centered[static_cast<std::size_t>(j)];
    double v;
    if (variant == PdcorVariant::residual) {
      const auto cz = double_center(dz);
      v = detail::pdcor_residual_core(ai, aj, cz.entries);
    } else {
      const auto uz = u_center(dz);
      const double rxy = detail::bias_corrected_from_entries(ai, aj);
      const double rxz = detail::bias_corrected_from_entries(ai, uz.entries);
      const double ryz = detail::bias_corrected_from_entries(aj, uz.entries);
      v = detail::pdcor_sr_core(rxy, rxz, ryz);
    }
    m.scores(i, j) = v;
    m.scores(j, i) = v;
  });
  return m;
}

}  // namespace dpmnet
