#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "dpmnet/error.hpp"
#include "dpmnet/gold_standard.hpp"
#include "dpmnet/score_matrix.hpp"

namespace dpmnet {

struct RankedEdge {
  int i = 0;  // indices into the score matrix, i < j
  int j = 0;
  double score = 0.0;
  bool is_true = false;
};

struct RankedEdges {
  std::vector<RankedEdge> edges;  // descending magnitude, name tie-break
  std::vector<std::string> names;
  Eigen::Index positives = 0;
  Eigen::Index negatives = 0;
};

namespace detail {

inline void check_same_nodes(const std::vector<std::string>& score_names,
                             const std::vector<std::string>& gold_names) {
  const std::set<std::string> s(score_names.begin(), score_names.end());
  const std::set<std::string> g(gold_names.begin(), gold_names.end());
  if (s == g) return;
  std::string msg = "score and reference node sets differ;";
  std::string only_scores, only_gold;
  for (const auto& name : s) {
    if (!g.count(name)) only_scores += " " + name;
  }
  for (const auto& name : g) {
    if (!s.count(name)) only_gold += " " + name;
  }
  if (!only_scores.empty()) msg += " only in scores:" + only_scores + ";";
  if (!only_gold.empty()) msg += " only in reference:" + only_gold + ";";
  msg.pop_back();
  throw value_error(msg);
}

}  // namespace detail

inline RankedEdges rank_edges(const ScoreMatrix& m, const GoldStandard& gold) {
  validate_scores(m);
  detail::check_same_nodes(m.names, gold.nodes);
  std::unordered_map<std::string, int> gold_index;
  for (std::size_t k = 0; k < gold.nodes.size(); ++k) {
    gold_index[gold.nodes[k]] = static_cast<int>(k);
  }

  RankedEdges r;
  r.names = m.names;
  for (const auto& pair : detail::ordered_pairs(m)) {
    const int gi = gold_index.at(m.names[static_cast<std::size_t>(pair.i)]);
    const int gj = gold_index.at(m.names[static_cast<std::size_t>(pair.j)]);
    const bool is_true = gold.has_edge(gi, gj);
    r.edges.push_back({pair.i, pair.j, pair.score, is_true});
    ++(is_true ? r.positives : r.negatives);
  }
  return r;
}

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

struct Evaluation {
  std::vector<CurvePoint> roc;  // (fpr, tpr), starting at (0, 0)
  std::vector<CurvePoint> pr;   // (recall, precision), anchored at (0, 1)
  double auroc = 0.0;
  double auprc = 0.0;
  Eigen::Index positives = 0;
  Eigen::Index negatives = 0;
};

// Curves advance one vertex per tie block (a maximal run of equal score
// magnitudes), so tied edges move diagonally in one step instead of in an
// order-dependent staircase. AUROC is the trapezoidal area; AUPRC is the
// step sum of block precision times recall gained.
inline Evaluation roc_pr(const RankedEdges& r) {
  if (r.positives == 0) {
    throw value_error("reference contains no true edges");
  }
  if (r.negatives == 0) {
    throw value_error("reference marks every pair as a true edge");
  }
  Evaluation ev;
  ev.positives = r.positives;
  ev.negatives = r.negatives;
  ev.roc.push_back({0.0, 0.0});
  ev.pr.push_back({0.0, 1.0});

  const double pos = static_cast<double>(r.positives);
  const double neg = static_cast<double>(r.negatives);
  std::size_t k = 0;
  long tp = 0, fp = 0;
  double prev_fpr = 0.0, prev_tpr = 0.0, prev_recall = 0.0;
  while (k < r.edges.size()) {
    const double mag = std::abs(r.edges[k].score);
    while (k < r.edges.size() && std::abs(r.edges[k].score) == mag) {
      ++(r.edges[k].is_true ? tp : fp);
      ++k;
    }
    const double fpr = fp / neg;
    const double tpr = tp / pos;
    const double recall = tp / pos;
    const double precision = static_cast<double>(tp) / (tp + fp);
    ev.roc.push_back({fpr, tpr});
    ev.pr.push_back({recall, precision});
    ev.auroc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
    ev.auprc += (recall - prev_recall) * precision;
    prev_fpr = fpr;
    prev_tpr = tpr;
    prev_recall = recall;
  }
  return ev;
}

inline Evaluation evaluate_scores(const ScoreMatrix& m, const GoldStandard& gold) {
  return roc_pr(rank_edges(m, gold));
}

struct Density {
  Eigen::VectorXd grid;
  Eigen::VectorXd density;
  double bandwidth = 0.0;
};

// Gaussian kernel density of the score magnitudes on a 512-point grid from 0
// to 1.05 times the largest magnitude. Bandwidth defaults to the normal
// reference rule 1.06 * sd * m^(-1/5).
inline Density score_density(const ScoreMatrix& m,
                             std::optional<double> bandwidth = std::nullopt) {
  validate_scores(m);
  std::vector<double> mags;
  const Eigen::Index p = m.p();
  mags.reserve(static_cast<std::size_t>(p) * (p - 1) / 2);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      mags.push_back(std::abs(m.scores(i, j)));
    }
  }
  const std::set<double> distinct(mags.begin(), mags.end());
  if (distinct.size() < 2) {
    throw value_error("density needs at least two distinct score magnitudes");
  }
  const double count = static_cast<double>(mags.size());

  double h;
  if (bandwidth) {
    if (!(*bandwidth > 0.0)) throw value_error("bandwidth must be positive");
    h = *bandwidth;
  } else {
    double mean = 0.0;
    for (double v : mags) mean += v;
    mean /= count;
    double ss = 0.0;
    for (double v : mags) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (count - 1.0));
    h = 1.06 * sd * std::pow(count, -0.2);
  }

  const double top = 1.05 * *std::max_element(mags.begin(), mags.end());
  constexpr int kPoints = 512;
  Density d;
  d.bandwidth = h;
  d.grid.resize(kPoints);
  d.density.resize(kPoints);
  const double inv_norm = 1.0 / (count * h * std::sqrt(2.0 * std::numbers::pi));
  for (int t = 0; t < kPoints; ++t) {
    const double g = top * t / (kPoints - 1);
    double sum = 0.0;
    for (double v : mags) {
      const double u = (g - v) / h;
      sum += std::exp(-0.5 * u * u);
    }
    d.grid(t) = g;
    d.density(t) = sum * inv_norm;
  }
  return d;
}

enum class EdgeLabel { tp, fp, fn, unlabeled };

struct ThresholdEdge {
  std::string a;
  std::string b;
  double score = 0.0;
  EdgeLabel label = EdgeLabel::unlabeled;
};

// Edges with magnitude at or above the threshold, in ranking order. With a
// reference, kept edges are tp or fp and missed true edges follow as fn.
inline std::vector<ThresholdEdge> apply_threshold(const ScoreMatrix& m,
                                                  double threshold,
                                                  const GoldStandard* gold = nullptr) {
  validate_scores(m);
  if (std::isnan(threshold)) throw value_error("threshold must be a number");
  std::unordered_map<std::string, int> gold_index;
  if (gold) {
    detail::check_same_nodes(m.names, gold->nodes);
    for (std::size_t k = 0; k < gold->nodes.size(); ++k) {
      gold_index[gold->nodes[k]] = static_cast<int>(k);
    }
  }
  const auto name = [&m](int idx) {
    return m.names[static_cast<std::size_t>(idx)];
  };
  const auto is_true = [&](const detail::ScoredPair& pair) {
    return gold->has_edge(gold_index.at(name(pair.i)),
                          gold_index.at(name(pair.j)));
  };

  std::vector<ThresholdEdge> out;
  std::vector<detail::ScoredPair> missed;
  for (const auto& pair : detail::ordered_pairs(m)) {
    if (std::abs(pair.score) >= threshold) {
      EdgeLabel label = EdgeLabel::unlabeled;
      if (gold) label = is_true(pair) ? EdgeLabel::tp : EdgeLabel::fp;
      out.push_back({name(pair.i), name(pair.j), pair.score, label});
    } else if (gold && is_true(pair)) {
      missed.push_back(pair);
    }
  }
  for (const auto& pair : missed) {
    out.push_back({name(pair.i), name(pair.j), pair.score, EdgeLabel::fn});
  }
  return out;
}

inline std::string edge_label_name(EdgeLabel label) {
  switch (label) {
    case EdgeLabel::tp: return "tp";
    case EdgeLabel::fp: return "fp";
    case EdgeLabel::fn: return "fn";
    case EdgeLabel::unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

}  // namespace dpmnet
