#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "dpmnet/dataset.hpp"
#include "dpmnet/error.hpp"
#include "dpmnet/parallel.hpp"
#include "dpmnet/score_matrix.hpp"

namespace dpmnet {

struct MIMatrix {
  Eigen::MatrixXd entries;
  int bins = 0;
  std::vector<std::string> names;

  Eigen::Index p() const { return entries.rows(); }
};

inline int default_bins(Eigen::Index n) {
  const int b = static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(n) / 5.0)));
  return std::max(2, b);
}

namespace detail {

inline int bin_of(double v, double lo, double width, int bins) {
  if (width <= 0.0) return 0;
  int b = static_cast<int>((v - lo) / width);
  return std::clamp(b, 0, bins - 1);
}

}  // namespace detail

// Plug-in estimate in nats from an equal-width 2-D histogram over each
// variable's observed range. A constant variable lands in one bin and the
// estimate is 0.
inline double mutual_information(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                 int bins) {
  if (x.size() != y.size()) {
    throw dimension_error("mutual_information inputs differ in length");
  }
  if (bins < 2) throw value_error("bins must be at least 2");
  const Eigen::Index n = x.size();
  if (n < bins) {
    throw dimension_error("mutual_information needs at least as many samples as bins");
  }

  const double xlo = x.minCoeff(), xw = (x.maxCoeff() - xlo) / bins;
  const double ylo = y.minCoeff(), yw = (y.maxCoeff() - ylo) / bins;

  std::vector<double> joint(static_cast<std::size_t>(bins) * bins, 0.0);
  std::vector<double> px(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> py(static_cast<std::size_t>(bins), 0.0);
  const double w = 1.0 / static_cast<double>(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const int i = detail::bin_of(x(k), xlo, xw, bins);
    const int j = detail::bin_of(y(k), ylo, yw, bins);
    joint[static_cast<std::size_t>(i) * bins + j] += w;
    px[static_cast<std::size_t>(i)] += w;
    py[static_cast<std::size_t>(j)] += w;
  }

  double mi = 0.0;
  for (int i = 0; i < bins; ++i) {
    for (int j = 0; j < bins; ++j) {
      const double pij = joint[static_cast<std::size_t>(i) * bins + j];
      if (pij <= 0.0) continue;
      mi += pij * std::log(pij / (px[static_cast<std::size_t>(i)] *
                                  py[static_cast<std::size_t>(j)]));
    }
  }
  return std::max(mi, 0.0);
}

// bins <= 0 selects the ceil(sqrt(n/5)) default.
inline MIMatrix mi_matrix(const Dataset& d, int bins = 0, int threads = 1) {
  validate_dataset(d);
  const int used_bins = bins > 0 ? bins : default_bins(d.n());
  const Eigen::Index p = d.p();

  MIMatrix m;
  m.bins = used_bins;
  m.names = d.names;
  m.entries = Eigen::MatrixXd::Zero(p, p);

  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
  }
  parallel_for(static_cast<Eigen::Index>(pairs.size()), threads, [&](Eigen::Index k) {
    const auto [i, j] = pairs[static_cast<std::size_t>(k)];
    const double v = mutual_information(d.values.col(i), d.values.col(j), used_bins);
    m.entries(i, j) = v;
    m.entries(j, i) = v;
  });
  return m;
}

// Data processing inequality pruning: an edge is removed when some third node
// k makes it the weakest side of the triangle, MI_ij <= min(MI_ik, MI_jk) - eps.
// All marks are evaluated against the original MI values, then applied.
inline ScoreMatrix apply_dpi(const MIMatrix& mi, double dpi_epsilon) {
  const Eigen::Index p = mi.p();
  Eigen::MatrixXi removed = Eigen::MatrixXi::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      for (Eigen::Index k = 0; k < p; ++k) {
        if (k == i || k == j) continue;
        const double other = std::min(mi.entries(i, k), mi.entries(j, k));
        if (mi.entries(i, j) <= other - dpi_epsilon) {
          removed(i, j) = 1;
          break;
        }
      }
    }
  }
  ScoreMatrix out;
  out.names = mi.names;
  out.method = "aracne";
  out.scores = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double v = removed(i, j) ? 0.0 : mi.entries(i, j);
      out.scores(i, j) = v;
      out.scores(j, i) = v;
    }
  }
  return out;
}

inline ScoreMatrix aracne_matrix(const Dataset& d, int bins = 0,
                                 double dpi_epsilon = 0.0, int threads = 1) {
  if (dpi_epsilon < 0.0) throw value_error("dpi epsilon must be nonnegative");
  return apply_dpi(mi_matrix(d, bins, threads), dpi_epsilon);
}

namespace detail {

// gamma * lambda / (1 + gamma * lambda)
inline double nd_eigen_map(double lambda, double gamma) {
  return gamma * lambda / (1.0 + gamma * lambda);
}

// Largest gamma keeping every mapped eigenvalue magnitude at or below beta;
// the binding eigenvalue maps exactly to +-beta.
inline double nd_gamma(const Eigen::VectorXd& eigenvalues, double beta) {
  double gamma = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double lam = eigenvalues(i);
    if (std::abs(lam) < 1e-12) continue;
    const double bound = lam > 0.0 ? beta / ((1.0 - beta) * lam)
                                   : beta / ((1.0 + beta) * (-lam));
    gamma = std::min(gamma, bound);
  }
  return std::isfinite(gamma) ? gamma : 1.0;
}

}  // namespace detail

// Network deconvolution of the correlation matrix: map each eigenvalue
// lambda to gamma*lambda/(1+gamma*lambda) with gamma scaled so the largest
// mapped magnitude is beta, then reassemble and zero the diagonal.
inline ScoreMatrix nd_matrix(const Dataset& d, double beta = 0.9) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw value_error("nd beta must lie in (0, 1)");
  }
  const Dataset s = standardize_columns(d);
  const Eigen::Index p = s.p();
  Eigen::MatrixXd corr =
      s.values.transpose() * s.values / static_cast<double>(s.n() - 1);
  corr = ((corr + corr.transpose()) / 2.0).eval();
  corr.diagonal().setZero();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  if (eig.info() != Eigen::Success) {
    throw numeric_error("eigendecomposition failed");
  }
  const double gamma = detail::nd_gamma(eig.eigenvalues(), beta);
  Eigen::VectorXd mapped(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    mapped(i) = detail::nd_eigen_map(eig.eigenvalues()(i), gamma);
  }

  ScoreMatrix out;
  out.names = d.names;
  out.method = "nd";
  Eigen::MatrixXd direct =
      eig.eigenvectors() * mapped.asDiagonal() * eig.eigenvectors().transpose();
  direct = ((direct + direct.transpose()) / 2.0).eval();
  direct.diagonal().setZero();
  out.scores = direct;
  return out;
}

}  // namespace dpmnet
