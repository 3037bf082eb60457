#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "dpmnet/dataset.hpp"
#include "dpmnet/error.hpp"
#include "dpmnet/gold_standard.hpp"
#include "dpmnet/rng.hpp"

namespace dpmnet {

struct DagSpec {
  int p = 0;
  std::vector<std::vector<int>> parents;  // parents[c] sorted ascending
  std::vector<std::string> names;
};

inline void validate_dag(const DagSpec& dag);

// Kahn's algorithm, always expanding the smallest ready index, so the order
// is a deterministic function of the graph.
inline std::vector<int> topological_order(const DagSpec& dag) {
  const int p = dag.p;
  std::vector<int> remaining(static_cast<std::size_t>(p), 0);
  std::vector<std::vector<int>> children(static_cast<std::size_t>(p));
  for (int c = 0; c < p; ++c) {
    remaining[static_cast<std::size_t>(c)] =
        static_cast<int>(dag.parents[static_cast<std::size_t>(c)].size());
    for (int par : dag.parents[static_cast<std::size_t>(c)]) {
      children[static_cast<std::size_t>(par)].push_back(c);
    }
  }
  std::set<int> ready;
  for (int v = 0; v < p; ++v) {
    if (remaining[static_cast<std::size_t>(v)] == 0) ready.insert(v);
  }
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(p));
  while (!ready.empty()) {
    const int v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (int c : children[static_cast<std::size_t>(v)]) {
      if (--remaining[static_cast<std::size_t>(c)] == 0) ready.insert(c);
    }
  }
  if (static_cast<int>(order.size()) != p) {
    throw value_error("graph contains a cycle");
  }
  return order;
}

inline void validate_dag(const DagSpec& dag) {
  if (dag.p < 1) throw dimension_error("graph needs at least one node");
  if (static_cast<int>(dag.parents.size()) != dag.p) {
    throw dimension_error("parent lists do not match node count");
  }
  if (static_cast<int>(dag.names.size()) != dag.p) {
    throw dimension_error("node names do not match node count");
  }
  for (int c = 0; c < dag.p; ++c) {
    const auto& ps = dag.parents[static_cast<std::size_t>(c)];
    for (int par : ps) {
      if (par < 0 || par >= dag.p) {
        throw value_error("parent index out of range for node " +
                          dag.names[static_cast<std::size_t>(c)]);
      }
      if (par == c) {
        throw value_error("self loop at node " +
                          dag.names[static_cast<std::size_t>(c)]);
      }
    }
    if (!std::is_sorted(ps.begin(), ps.end()) ||
        std::adjacent_find(ps.begin(), ps.end()) != ps.end()) {
      throw value_error("parent list must be sorted and unique for node " +
                        dag.names[static_cast<std::size_t>(c)]);
    }
  }
  topological_order(dag);
}

inline std::vector<std::string> default_names(int p, const std::string& prefix = "V") {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) names.push_back(prefix + std::to_string(i + 1));
  return names;
}

// Uniformly random topological order, then each forward pair becomes an edge
// independently with probability expected_parents / (p - 1), capped at 1.
inline DagSpec random_dag(int p, double expected_parents, std::uint64_t seed) {
  if (p < 2) throw dimension_error("random graph needs at least two nodes");
  if (expected_parents < 0.0) {
    throw value_error("expected parent count must be nonnegative");
  }
  Engine eng(seed);
  std::vector<int> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  eng.shuffle(order);

  const double q = std::min(1.0, expected_parents / static_cast<double>(p - 1));
  DagSpec dag;
  dag.p = p;
  dag.parents.assign(static_cast<std::size_t>(p), {});
  dag.names = default_names(p);
  for (int a = 0; a + 1 < p; ++a) {
    for (int b = a + 1; b < p; ++b) {
      if (eng.uniform01() < q) {
        dag.parents[static_cast<std::size_t>(order[static_cast<std::size_t>(b)])]
            .push_back(order[static_cast<std::size_t>(a)]);
      }
    }
  }
  for (auto& ps : dag.parents) std::sort(ps.begin(), ps.end());
  return dag;
}

inline GoldStandard skeleton(const DagSpec& dag) {
  validate_dag(dag);
  std::vector<std::pair<int, int>> edges;
  for (int c = 0; c < dag.p; ++c) {
    for (int par : dag.parents[static_cast<std::size_t>(c)]) {
      edges.emplace_back(par, c);
    }
  }
  return make_gold_standard(dag.names, edges);
}

struct CovarianceModel {
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd omega;  // the precision matrix the covariance inverts
};

// Gaussian graphical model over the skeleton: edge entries of the precision
// matrix get weights with magnitude in [lo, hi] and random sign, and the
// diagonal is lifted above the absolute row sums so the matrix is positive
// definite. Off the skeleton the precision matrix is exactly zero.
inline CovarianceModel dag_to_covariance(const DagSpec& dag, std::uint64_t seed,
                                         double lo = 0.2, double hi = 0.8) {
  validate_dag(dag);
  if (!(lo > 0.0) || !(hi >= lo)) {
    throw value_error("weight magnitude range must satisfy 0 < lo <= hi");
  }
  const int p = dag.p;
  Engine eng(seed);
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(p, p);
  for (int c = 0; c < p; ++c) {
    for (int par : dag.parents[static_cast<std::size_t>(c)]) {
      const double mag = eng.uniform(lo, hi);
      const double w = eng.uniform01() < 0.5 ? -mag : mag;
      omega(c, par) = w;
      omega(par, c) = w;
    }
  }
  for (int i = 0; i < p; ++i) {
    omega(i, i) = omega.row(i).cwiseAbs().sum() + 0.1;
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(omega);
  if (llt.info() != Eigen::Success) {
    throw numeric_error("precision matrix is not positive definite");
  }
  Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(p, p));
  cov = ((cov + cov.transpose()) / 2.0).eval();
  return {std::move(cov), std::move(omega)};
}

// Rows of Z are standard normal draws in row-major order; X = Z L^T for the
// lower Cholesky factor L of the covariance.
inline Dataset sample_gaussian(const Eigen::MatrixXd& covariance, Eigen::Index n,
                               std::uint64_t seed,
                               std::vector<std::string> names = {}) {
  if (covariance.rows() != covariance.cols()) {
    throw dimension_error("covariance must be square");
  }
  const Eigen::Index p = covariance.rows();
  if (p < 1) throw dimension_error("covariance must be nonempty");
  if (n < 1) throw dimension_error("sample count must be positive");
  if (names.empty()) names = default_names(static_cast<int>(p));
  if (static_cast<Eigen::Index>(names.size()) != p) {
    throw dimension_error("name count does not match covariance size");
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw numeric_error("covariance is not positive definite");
  }
  Engine eng(seed);
  Eigen::MatrixXd z(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(i, j) = eng.normal();
  }
  Dataset d;
  d.values = z * Eigen::MatrixXd(llt.matrixL()).transpose();
  d.names = std::move(names);
  return d;
}

// Adds sigma * N(0,1) noise elementwise, drawn in row-major order. The draws
// happen even at sigma 0 so seeded streams stay aligned across noise levels.
inline void add_noise(Dataset& d, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw value_error("noise level must be nonnegative");
  Engine eng(seed);
  for (Eigen::Index i = 0; i < d.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.values.cols(); ++j) {
      d.values(i, j) += sigma * eng.normal();
    }
  }
}

enum class EdgeFunction { square, sin2, abs_value, tanh2, cos2 };

inline double apply_edge_function(EdgeFunction f, double x) {
  switch (f) {
    case EdgeFunction::square: return x * x;
    case EdgeFunction::sin2: return std::sin(2.0 * x);
    case EdgeFunction::abs_value: return std::abs(x);
    case EdgeFunction::tanh2: return std::tanh(2.0 * x);
    case EdgeFunction::cos2: return std::cos(2.0 * x);
  }
  throw value_error("unknown edge function");
}

struct SimulationConfig {
  Eigen::Index n = 0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

// Nonlinear structural simulation. Nodes are filled in deterministic
// topological order: a root column is n standard normal draws; a child column
// sums its per-edge transformed parent columns plus sigma-scaled noise (noise
// is drawn even at sigma 0 so streams stay aligned), then is rescaled to unit
// sample variance. functions[c][k] transforms parent parents[c][k].
inline Dataset simulate_from_dag(const DagSpec& dag,
                                 const std::vector<std::vector<EdgeFunction>>& functions,
                                 const SimulationConfig& cfg) {
  validate_dag(dag);
  if (static_cast<int>(functions.size()) != dag.p) {
    throw dimension_error("edge function lists do not match node count");
  }
  for (int c = 0; c < dag.p; ++c) {
    if (functions[static_cast<std::size_t>(c)].size() !=
        dag.parents[static_cast<std::size_t>(c)].size()) {
      throw dimension_error("edge function count does not match parent count for node " +
                            dag.names[static_cast<std::size_t>(c)]);
    }
  }
  if (cfg.n < 3) throw dimension_error("simulation needs at least 3 samples");
  if (cfg.noise_sigma < 0.0) throw value_error("noise level must be nonnegative");

  const Eigen::Index n = cfg.n;
  Engine eng(cfg.seed);
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, dag.p);
  for (int node : topological_order(dag)) {
    const auto& ps = dag.parents[static_cast<std::size_t>(node)];
    Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
    if (ps.empty()) {
      for (Eigen::Index i = 0; i < n; ++i) col(i) = eng.normal();
      values.col(node) = col;
      continue;
    }
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const EdgeFunction f = functions[static_cast<std::size_t>(node)][k];
      const Eigen::VectorXd& parent = values.col(ps[k]);
      for (Eigen::Index i = 0; i < n; ++i) {
        col(i) += apply_edge_function(f, parent(i));
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      col(i) += cfg.noise_sigma * eng.normal();
    }
    const double mean = col.mean();
    const double var =
        (col.array() - mean).square().sum() / static_cast<double>(n - 1);
    const double sd = std::sqrt(var);
    if (sd > 0.0) col /= sd;
    values.col(node) = col;
  }

  Dataset d;
  d.values = std::move(values);
  d.names = dag.names;
  return d;
}

// Eleven-node benchmark graph with a chain, a fork, two colliders, and a
// feed-forward triangle. Indices are already topological.
inline DagSpec gs_topology() {
  DagSpec dag;
  dag.p = 11;
  dag.names = default_names(11, "G");
  dag.parents.assign(11, {});
  const std::vector<std::pair<int, int>> edges = {
      {0, 1},  // G1 -> G2
      {1, 2},  // G2 -> G3
      {2, 3},  // G3 -> G4
      {2, 4},  // G3 -> G5
      {3, 5},  // G4 -> G6
      {4, 5},  // G5 -> G6
      {5, 6},  // G6 -> G7
      {6, 7},  // G7 -> G8
      {5, 7},  // G6 -> G8
      {7, 8},  // G8 -> G9
      {8, 9},  // G9 -> G10
      {1, 9},  // G2 -> G10
      {9, 10}  // G10 -> G11
  };
  for (const auto& [par, child] : edges) {
    dag.parents[static_cast<std::size_t>(child)].push_back(par);
  }
  for (auto& ps : dag.parents) std::sort(ps.begin(), ps.end());
  validate_dag(dag);
  return dag;
}

namespace detail {

inline constexpr std::uint64_t kGsFunctionSeed = 41;

}  // namespace detail

// Fixed assignment of nonlinear functions to the benchmark edges, drawn once
// from an internal constant seed in canonical edge order (child ascending,
// parents sorted within a child), so every run sees the same topology.
inline std::vector<std::vector<EdgeFunction>> gs_edge_functions(const DagSpec& dag) {
  Engine eng(detail::kGsFunctionSeed);
  std::vector<std::vector<EdgeFunction>> functions(
      static_cast<std::size_t>(dag.p));
  for (int c = 0; c < dag.p; ++c) {
    for (std::size_t k = 0; k < dag.parents[static_cast<std::size_t>(c)].size();
         ++k) {
      functions[static_cast<std::size_t>(c)].push_back(
          static_cast<EdgeFunction>(eng.below(5)));
    }
  }
  return functions;
}

struct Simulation {
  Dataset data;
  GoldStandard gold;
};

inline Simulation simulate_gs(const SimulationConfig& cfg) {
  const DagSpec dag = gs_topology();
  Simulation sim;
  sim.data = simulate_from_dag(dag, gs_edge_functions(dag), cfg);
  sim.gold = skeleton(dag);
  return sim;
}

}  // namespace dpmnet
