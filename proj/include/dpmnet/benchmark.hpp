#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpmnet/dataset.hpp"
#include "dpmnet/error.hpp"
#include "dpmnet/evaluate.hpp"
#include "dpmnet/gold_standard.hpp"
#include "dpmnet/methods.hpp"
#include "dpmnet/rng.hpp"
#include "dpmnet/simulate.hpp"
#include "dpmnet/text.hpp"

namespace dpmnet {

enum class Generator { gaussian, gs, external };

inline Generator parse_generator(const std::string& s) {
  if (s == "gaussian") return Generator::gaussian;
  if (s == "gs") return Generator::gs;
  if (s == "external") return Generator::external;
  throw value_error("unknown generator '" + s +
                    "'; valid generators are gaussian gs external");
}

inline std::string generator_name(Generator g) {
  switch (g) {
    case Generator::gaussian: return "gaussian";
    case Generator::gs: return "gs";
    case Generator::external: return "external";
  }
  return "gaussian";
}

struct BenchmarkPlan {
  Generator generator = Generator::gaussian;
  std::vector<std::string> methods;  // empty selects every method
  int replicates = 20;
  Eigen::Index samples = 200;
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;
  int nodes = 50;
  double expected_parents = 2.0;
  double weight_lo = 0.2;
  double weight_hi = 0.8;
  int bins = 0;
  double dpi_epsilon = 0.0;
  double nd_beta = 0.9;
  int threads = 1;
  std::string data_path;
  std::string gold_path;
  std::string sweep_parameter;  // "samples" or "noise-sigma"; empty for none
  std::vector<double> sweep_values;
};

namespace detail {

inline std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string piece =
        trim(s.substr(start, comma == std::string::npos ? std::string::npos
                                                        : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double plan_number(const NumberedLine& line, const std::string& value) {
  const auto parsed = parse_double(value);
  if (!parsed) {
    throw parse_error("line " + std::to_string(line.number) +
                      ": expected a number, got '" + value + "'");
  }
  return *parsed;
}

inline std::int64_t plan_integer(const NumberedLine& line, const std::string& value) {
  const double v = plan_number(line, value);
  if (v != std::floor(v)) {
    throw parse_error("line " + std::to_string(line.number) +
                      ": expected an integer, got '" + value + "'");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace detail

inline void validate_plan(const BenchmarkPlan& plan) {
  for (const auto& method : plan.methods) {
    const auto& ids = method_ids();
    if (std::find(ids.begin(), ids.end(), method) == ids.end()) {
      std::string msg = "unknown method '" + method + "'; valid methods are";
      for (const auto& id : ids) msg += " " + id;
      throw value_error(msg);
    }
  }
  if (plan.replicates < 1) throw value_error("replicates must be positive");
  if (plan.samples < 3) throw value_error("samples must be at least 3");
  if (plan.noise_sigma < 0.0) throw value_error("noise level must be nonnegative");
  if (plan.generator == Generator::gaussian && plan.nodes < 2) {
    throw value_error("nodes must be at least 2");
  }
  if (plan.expected_parents < 0.0) {
    throw value_error("expected parent count must be nonnegative");
  }
  if (plan.generator == Generator::external) {
    if (plan.data_path.empty() || plan.gold_path.empty()) {
      throw value_error("external generator needs data and gold paths");
    }
  }
  if (!plan.sweep_parameter.empty()) {
    if (plan.sweep_parameter != "samples" && plan.sweep_parameter != "noise-sigma") {
      throw value_error("sweep parameter must be samples or noise-sigma");
    }
    if (plan.sweep_values.empty()) {
      throw value_error("sweep needs at least one value");
    }
    if (plan.generator == Generator::external) {
      throw value_error("external generator cannot sweep");
    }
    for (double v : plan.sweep_values) {
      if (plan.sweep_parameter == "samples" && (v != std::floor(v) || v < 3)) {
        throw value_error("swept sample counts must be integers of at least 3");
      }
      if (plan.sweep_parameter == "noise-sigma" && v < 0.0) {
        throw value_error("swept noise levels must be nonnegative");
      }
    }
  }
}

// Plan files are "key = value" lines with '#' comments. Keys mirror the
// long CLI flags (generator, methods, replicates, samples, noise-sigma, seed,
// nodes, expected-parents, weight-lo, weight-hi, bins, dpi-epsilon, nd-beta,
// threads, data, gold, sweep, sweep-values).
inline BenchmarkPlan parse_plan(std::istream& in) {
  BenchmarkPlan plan;
  for (const auto& line : detail::read_lines(in)) {
    std::string text = line.text;
    const std::size_t hash = text.find('#');
    if (hash != std::string::npos) text = text.substr(0, hash);
    text = detail::trim(text);
    if (text.empty()) continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw parse_error("line " + std::to_string(line.number) +
                        ": expected 'key = value'");
    }
    const std::string key = detail::trim(text.substr(0, eq));
    const std::string value = detail::trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw parse_error("line " + std::to_string(line.number) +
                        ": expected 'key = value'");
    }

    if (key == "generator") {
      plan.generator = parse_generator(value);
    } else if (key == "methods") {
      plan.methods = detail::split_commas(value);
    } else if (key == "replicates") {
      plan.replicates = static_cast<int>(detail::plan_integer(line, value));
    } else if (key == "samples") {
      plan.samples = static_cast<Eigen::Index>(detail::plan_integer(line, value));
    } else if (key == "noise-sigma") {
      plan.noise_sigma = detail::plan_number(line, value);
    } else if (key == "seed") {
      plan.seed = static_cast<std::uint64_t>(detail::plan_integer(line, value));
    } else if (key == "nodes") {
      plan.nodes = static_cast<int>(detail::plan_integer(line, value));
    } else if (key == "expected-parents") {
      plan.expected_parents = detail::plan_number(line, value);
    } else if (key == "weight-lo") {
      plan.weight_lo = detail::plan_number(line, value);
    } else if (key == "weight-hi") {
      plan.weight_hi = detail::plan_number(line, value);
    } else if (key == "bins") {
      plan.bins = static_cast<int>(detail::plan_integer(line, value));
    } else if (key == "dpi-epsilon") {
      plan.dpi_epsilon = detail::plan_number(line, value);
    } else if (key == "nd-beta") {
      plan.nd_beta = detail::plan_number(line, value);
    } else if (key == "threads") {
      plan.threads = static_cast<int>(detail::plan_integer(line, value));
    } else if (key == "data") {
      plan.data_path = value;
    } else if (key == "gold") {
      plan.gold_path = value;
    } else if (key == "sweep") {
      plan.sweep_parameter = value;
    } else if (key == "sweep-values") {
      plan.sweep_values.clear();
      for (const auto& piece : detail::split_commas(value)) {
        plan.sweep_values.push_back(detail::plan_number(line, piece));
      }
    } else {
      throw parse_error("line " + std::to_string(line.number) +
                        ": unknown key '" + key + "'");
    }
  }
  validate_plan(plan);
  return plan;
}

inline BenchmarkPlan read_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  try {
    return parse_plan(in);
  } catch (const parse_error& e) {
    throw parse_error(path + ": " + e.what());
  }
}

struct ReplicateFailure {
  int replicate = 0;
  std::string message;
};

struct MethodCell {
  std::vector<std::optional<double>> aurocs;   // null where the run failed
  std::vector<std::optional<double>> auprcs;
  std::vector<std::optional<double>> lambdas;
  std::vector<ReplicateFailure> failures;
  double auroc_mean = 0.0;
  double auroc_sd = 0.0;
  double auprc_mean = 0.0;
  double auprc_sd = 0.0;
  int succeeded = 0;
};

struct SweepCell {
  Eigen::Index samples = 0;
  double noise_sigma = 0.0;
  std::vector<std::uint64_t> rep_seeds;
  std::vector<std::pair<std::string, MethodCell>> methods;  // plan order
};

struct BenchmarkResult {
  BenchmarkPlan plan;
  std::vector<std::string> methods;  // resolved list
  std::vector<SweepCell> cells;
};

namespace detail {

inline void finish_cell(MethodCell& cell) {
  double sum_roc = 0.0, sum_prc = 0.0;
  int count = 0;
  for (std::size_t k = 0; k < cell.aurocs.size(); ++k) {
    if (!cell.aurocs[k]) continue;
    sum_roc += *cell.aurocs[k];
    sum_prc += *cell.auprcs[k];
    ++count;
  }
  cell.succeeded = count;
  if (count == 0) return;
  cell.auroc_mean = sum_roc / count;
  cell.auprc_mean = sum_prc / count;
  if (count < 2) return;
  double ss_roc = 0.0, ss_prc = 0.0;
  for (std::size_t k = 0; k < cell.aurocs.size(); ++k) {
    if (!cell.aurocs[k]) continue;
    ss_roc += (*cell.aurocs[k] - cell.auroc_mean) * (*cell.aurocs[k] - cell.auroc_mean);
    ss_prc += (*cell.auprcs[k] - cell.auprc_mean) * (*cell.auprcs[k] - cell.auprc_mean);
  }
  cell.auroc_sd = std::sqrt(ss_roc / (count - 1));
  cell.auprc_sd = std::sqrt(ss_prc / (count - 1));
}

struct ReplicateData {
  Dataset data;
  GoldStandard gold;
};

// Sub-streams keep the draws for structure, weights, sampling, and noise
// independent, so sweeping one knob leaves the others' draws untouched.
inline ReplicateData generate_replicate(const BenchmarkPlan& plan,
                                        Eigen::Index samples, double sigma,
                                        std::uint64_t rep_seed) {
  ReplicateData out;
  if (plan.generator == Generator::gaussian) {
    const DagSpec dag =
        random_dag(plan.nodes, plan.expected_parents, derive_seed(rep_seed, 1));
    const CovarianceModel model = dag_to_covariance(
        dag, derive_seed(rep_seed, 2), plan.weight_lo, plan.weight_hi);
    out.data = sample_gaussian(model.covariance, samples,
                               derive_seed(rep_seed, 3), dag.names);
    add_noise(out.data, sigma, derive_seed(rep_seed, 4));
    out.gold = skeleton(dag);
  } else {
    Simulation sim = simulate_gs({samples, sigma, rep_seed});
    out.data = std::move(sim.data);
    out.gold = std::move(sim.gold);
  }
  return out;
}

}  // namespace detail

// Replicate r always uses seed plan.seed + r, at every sweep point, so sweep
// cells are paired. A method failure on one replicate is recorded and that
// replicate is excluded from the method's aggregates.
inline BenchmarkResult run_benchmark(const BenchmarkPlan& plan) {
  validate_plan(plan);
  BenchmarkResult result;
  result.plan = plan;
  result.methods = plan.methods.empty() ? method_ids() : plan.methods;

  const bool external = plan.generator == Generator::external;
  Dataset external_data;
  GoldStandard external_gold;
  if (external) {
    external_data = read_dataset(plan.data_path, Layout::samples_in_rows);
    external_gold = read_gold_standard(plan.gold_path, external_data.names);
  }
  const int replicates = external ? 1 : plan.replicates;

  std::vector<std::pair<Eigen::Index, double>> points;
  if (plan.sweep_parameter == "samples") {
    for (double v : plan.sweep_values) {
      points.emplace_back(static_cast<Eigen::Index>(v), plan.noise_sigma);
    }
  } else if (plan.sweep_parameter == "noise-sigma") {
    for (double v : plan.sweep_values) points.emplace_back(plan.samples, v);
  } else {
    points.emplace_back(plan.samples, plan.noise_sigma);
  }

  MethodParams params;
  params.bins = plan.bins;
  params.dpi_epsilon = plan.dpi_epsilon;
  params.nd_beta = plan.nd_beta;
  params.threads = plan.threads;

  for (const auto& [samples, sigma] : points) {
    SweepCell cell;
    cell.samples = samples;
    cell.noise_sigma = sigma;
    for (const auto& method : result.methods) {
      MethodCell mc;
      mc.aurocs.assign(static_cast<std::size_t>(replicates), std::nullopt);
      mc.auprcs.assign(static_cast<std::size_t>(replicates), std::nullopt);
      mc.lambdas.assign(static_cast<std::size_t>(replicates), std::nullopt);
      cell.methods.emplace_back(method, std::move(mc));
    }

    for (int rep = 0; rep < replicates; ++rep) {
      const std::uint64_t rep_seed = plan.seed + static_cast<std::uint64_t>(rep);
      cell.rep_seeds.push_back(rep_seed);
      Dataset data;
      const GoldStandard* gold = nullptr;
      detail::ReplicateData generated;
      if (external) {
        data = external_data;
        gold = &external_gold;
      } else {
        generated = detail::generate_replicate(plan, samples, sigma, rep_seed);
        data = std::move(generated.data);
        gold = &generated.gold;
      }

      for (auto& [method, mc] : cell.methods) {
        try {
          const MethodResult scored = score_method(data, method, params);
          const Evaluation ev = evaluate_scores(scored.scores, *gold);
          mc.aurocs[static_cast<std::size_t>(rep)] = ev.auroc;
          mc.auprcs[static_cast<std::size_t>(rep)] = ev.auprc;
          if (scored.lambda) {
            mc.lambdas[static_cast<std::size_t>(rep)] = *scored.lambda;
          }
        } catch (const error& e) {
          mc.failures.push_back({rep, e.what()});
        }
      }
    }
    for (auto& [method, mc] : cell.methods) detail::finish_cell(mc);
    result.cells.push_back(std::move(cell));
  }
  return result;
}

namespace detail {

inline nlohmann::ordered_json optional_array(
    const std::vector<std::optional<double>>& values) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& v : values) {
    if (v) arr.push_back(*v);
    else arr.push_back(nullptr);
  }
  return arr;
}

}  // namespace detail

inline nlohmann::ordered_json benchmark_json(const BenchmarkResult& result) {
  using json = nlohmann::ordered_json;
  const BenchmarkPlan& plan = result.plan;
  json root;
  root["generator"] = generator_name(plan.generator);
  root["methods"] = result.methods;
  root["replicates"] = plan.replicates;
  root["seed"] = plan.seed;
  json settings;
  settings["samples"] = plan.samples;
  settings["noise-sigma"] = plan.noise_sigma;
  if (plan.generator == Generator::gaussian) {
    settings["nodes"] = plan.nodes;
    settings["expected-parents"] = plan.expected_parents;
    settings["weight-lo"] = plan.weight_lo;
    settings["weight-hi"] = plan.weight_hi;
  }
  if (plan.generator == Generator::external) {
    settings["data"] = plan.data_path;
    settings["gold"] = plan.gold_path;
  }
  settings["bins"] = plan.bins;
  settings["dpi-epsilon"] = plan.dpi_epsilon;
  settings["nd-beta"] = plan.nd_beta;
  root["settings"] = settings;
  if (plan.sweep_parameter.empty()) {
    root["sweep"] = nullptr;
  } else {
    root["sweep"] = {{"parameter", plan.sweep_parameter},
                     {"values", plan.sweep_values}};
  }

  json cells = json::array();
  for (const auto& cell : result.cells) {
    json c;
    c["samples"] = cell.samples;
    c["noise-sigma"] = cell.noise_sigma;
    c["rep-seeds"] = cell.rep_seeds;
    json methods;
    for (const auto& [method, mc] : cell.methods) {
      json m;
      m["auroc"] = {{"mean", mc.succeeded ? json(mc.auroc_mean) : json(nullptr)},
                    {"sd", mc.succeeded ? json(mc.auroc_sd) : json(nullptr)},
                    {"raw", detail::optional_array(mc.aurocs)}};
      m["auprc"] = {{"mean", mc.succeeded ? json(mc.auprc_mean) : json(nullptr)},
                    {"sd", mc.succeeded ? json(mc.auprc_sd) : json(nullptr)},
                    {"raw", detail::optional_array(mc.auprcs)}};
      if (std::any_of(mc.lambdas.begin(), mc.lambdas.end(),
                      [](const auto& v) { return v.has_value(); })) {
        m["lambda"] = detail::optional_array(mc.lambdas);
      }
      m["succeeded"] = mc.succeeded;
      json failures = json::array();
      for (const auto& f : mc.failures) {
        failures.push_back({{"replicate", f.replicate}, {"message", f.message}});
      }
      m["failures"] = failures;
      methods[method] = m;
    }
    c["methods"] = methods;
    cells.push_back(c);
  }
  root["cells"] = cells;
  return root;
}

inline void write_benchmark_csv(const BenchmarkResult& result, std::ostream& out) {
  out << "sweep_parameter,sweep_value,samples,noise_sigma,method,replicates,"
         "succeeded,auroc_mean,auroc_sd,auprc_mean,auprc_sd\n";
  const std::string param = result.plan.sweep_parameter.empty()
                                ? "none"
                                : result.plan.sweep_parameter;
  for (std::size_t ci = 0; ci < result.cells.size(); ++ci) {
    const SweepCell& cell = result.cells[ci];
    std::string sweep_value;
    if (!result.plan.sweep_parameter.empty()) {
      sweep_value = detail::format_double(result.plan.sweep_values[ci]);
    }
    for (const auto& [method, mc] : cell.methods) {
      out << param << ',' << sweep_value << ',' << cell.samples << ','
          << detail::format_double(cell.noise_sigma) << ',' << method << ','
          << mc.aurocs.size() << ',' << mc.succeeded << ',';
      if (mc.succeeded) {
        out << detail::format_double(mc.auroc_mean) << ','
            << detail::format_double(mc.auroc_sd) << ','
            << detail::format_double(mc.auprc_mean) << ','
            << detail::format_double(mc.auprc_sd) << '\n';
      } else {
        out << ",,,\n";
      }
    }
  }
}

}  // namespace dpmnet
