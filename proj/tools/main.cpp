#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpmnet/dpmnet.hpp"

namespace {

using dpmnet::detail::format_double;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw dpmnet::io_error("cannot write " + path);
  return out;
}

dpmnet::Layout parse_layout(const std::string& s) {
  return s == "variables" ? dpmnet::Layout::variables_in_rows
                          : dpmnet::Layout::samples_in_rows;
}

struct SimulateOpts {
  std::string kind = "gaussian";
  int nodes = 50;
  Eigen::Index samples = 200;
  double noise_sigma = 1.0;
  double expected_parents = 2.0;
  double weight_lo = 0.2;
  double weight_hi = 0.8;
  std::string out_data;
  std::string out_gold;
};

void run_simulate(const SimulateOpts& opt, std::uint64_t seed) {
  dpmnet::Dataset data;
  dpmnet::GoldStandard gold;
  if (opt.kind == "gaussian") {
    const dpmnet::DagSpec dag = dpmnet::random_dag(
        opt.nodes, opt.expected_parents, dpmnet::derive_seed(seed, 1));
    const dpmnet::CovarianceModel model = dpmnet::dag_to_covariance(
        dag, dpmnet::derive_seed(seed, 2), opt.weight_lo, opt.weight_hi);
    data = dpmnet::sample_gaussian(model.covariance, opt.samples,
                                   dpmnet::derive_seed(seed, 3), dag.names);
    dpmnet::add_noise(data, opt.noise_sigma, dpmnet::derive_seed(seed, 4));
    gold = dpmnet::skeleton(dag);
  } else {
    dpmnet::Simulation sim =
        dpmnet::simulate_gs({opt.samples, opt.noise_sigma, seed});
    data = std::move(sim.data);
    gold = std::move(sim.gold);
  }
  dpmnet::write_dataset(data, opt.out_data);
  auto out = open_output(opt.out_gold);
  dpmnet::write_gold_standard(gold, out);
}

struct ScoreOpts {
  std::string in_path;
  std::string layout = "samples";
  std::string method;
  std::string format = "edge-list";
  std::string out_path;
  int bins = 0;
  double dpi_epsilon = 0.0;
  double nd_beta = 0.9;
};

void run_score(const ScoreOpts& opt, std::uint64_t seed, int threads) {
  const dpmnet::Dataset data =
      dpmnet::read_dataset(opt.in_path, parse_layout(opt.layout));
  dpmnet::MethodParams params;
  params.bins = opt.bins;
  params.dpi_epsilon = opt.dpi_epsilon;
  params.nd_beta = opt.nd_beta;
  params.threads = threads;
  const dpmnet::MethodResult result =
      dpmnet::score_method(data, opt.method, params);

  dpmnet::Metadata meta;
  meta.emplace_back("method", opt.method);
  meta.emplace_back("format", opt.format);
  meta.emplace_back("n", std::to_string(data.n()));
  meta.emplace_back("p", std::to_string(data.p()));
  meta.emplace_back("seed", std::to_string(seed));
  if (result.lambda) meta.emplace_back("lambda", format_double(*result.lambda));
  for (const auto& kv : result.metadata) meta.push_back(kv);

  const dpmnet::ScoreFormat fmt = opt.format == "matrix"
                                      ? dpmnet::ScoreFormat::matrix
                                      : dpmnet::ScoreFormat::edge_list;
  if (opt.out_path.empty() || opt.out_path == "-") {
    dpmnet::write_scores(result.scores, std::cout, fmt, meta);
  } else {
    auto out = open_output(opt.out_path);
    dpmnet::write_scores(result.scores, out, fmt, meta);
  }
}

struct EvalOpts {
  std::string scores_path;
  std::string gold_path;
  std::string out_path;
  std::string roc_csv;
  std::string pr_csv;
};

void run_eval(const EvalOpts& opt) {
  const dpmnet::ScoreMatrix scores = dpmnet::read_scores(opt.scores_path);
  const dpmnet::GoldStandard gold =
      dpmnet::read_gold_standard(opt.gold_path, scores.names);
  const dpmnet::Evaluation ev = dpmnet::evaluate_scores(scores, gold);

  nlohmann::ordered_json root;
  if (!scores.method.empty()) root["method"] = scores.method;
  root["pairs"] = scores.p() * (scores.p() - 1) / 2;
  root["positives"] = ev.positives;
  root["negatives"] = ev.negatives;
  root["auroc"] = ev.auroc;
  root["auprc"] = ev.auprc;
  if (opt.out_path.empty() || opt.out_path == "-") {
    std::cout << root.dump(2) << '\n';
  } else {
    auto out = open_output(opt.out_path);
    out << root.dump(2) << '\n';
  }

  if (!opt.roc_csv.empty()) {
    auto out = open_output(opt.roc_csv);
    out << "fpr,tpr\n";
    for (const auto& pt : ev.roc) {
      out << format_double(pt.x) << ',' << format_double(pt.y) << '\n';
    }
  }
  if (!opt.pr_csv.empty()) {
    auto out = open_output(opt.pr_csv);
    out << "recall,precision\n";
    for (const auto& pt : ev.pr) {
      out << format_double(pt.x) << ',' << format_double(pt.y) << '\n';
    }
  }
}

struct DensityOpts {
  std::string in_path;
  std::string bandwidth = "auto";
  std::string out_path;
};

void run_density(const DensityOpts& opt) {
  const dpmnet::ScoreMatrix scores = dpmnet::read_scores(opt.in_path);
  std::optional<double> bandwidth;
  if (opt.bandwidth != "auto") {
    const auto parsed = dpmnet::detail::parse_double(opt.bandwidth);
    if (!parsed) {
      throw dpmnet::value_error("bandwidth must be 'auto' or a positive number");
    }
    bandwidth = *parsed;
  }
  const dpmnet::Density d = dpmnet::score_density(scores, bandwidth);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!opt.out_path.empty() && opt.out_path != "-") {
    file = open_output(opt.out_path);
    out = &file;
  }
  *out << "# bandwidth: " << format_double(d.bandwidth) << '\n';
  *out << "grid,density\n";
  for (Eigen::Index t = 0; t < d.grid.size(); ++t) {
    *out << format_double(d.grid(t)) << ',' << format_double(d.density(t))
         << '\n';
  }
}

struct ThresholdOpts {
  std::string in_path;
  double threshold = 0.0;
  std::string gold_path;
  std::string out_path;
};

void run_threshold(const ThresholdOpts& opt) {
  const dpmnet::ScoreMatrix scores = dpmnet::read_scores(opt.in_path);
  dpmnet::GoldStandard gold;
  const dpmnet::GoldStandard* gold_ptr = nullptr;
  if (!opt.gold_path.empty()) {
    gold = dpmnet::read_gold_standard(opt.gold_path, scores.names);
    gold_ptr = &gold;
  }
  const auto edges = dpmnet::apply_threshold(scores, opt.threshold, gold_ptr);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!opt.out_path.empty() && opt.out_path != "-") {
    file = open_output(opt.out_path);
    out = &file;
  }
  for (const auto& e : edges) {
    *out << e.a << '\t' << e.b << '\t' << format_double(e.score) << '\t'
         << dpmnet::edge_label_name(e.label) << '\n';
  }
}

struct BenchOpts {
  std::string plan_path;
  std::string generator;
  std::vector<std::string> methods;
  int replicates = 0;
  Eigen::Index samples = 0;
  double noise_sigma = -1.0;
  int nodes = 0;
  double expected_parents = -1.0;
  double weight_lo = -1.0;
  double weight_hi = -1.0;
  int bins = -1;
  double dpi_epsilon = -1.0;
  double nd_beta = -1.0;
  std::string data_path;
  std::string gold_path;
  std::string sweep;
  std::vector<double> sweep_values;
  std::string out_json;
  std::string out_csv;
};

void run_bench(const BenchOpts& opt, const CLI::App* cmd, std::uint64_t seed,
               bool seed_given, int threads) {
  dpmnet::BenchmarkPlan plan;
  if (!opt.plan_path.empty()) plan = dpmnet::read_plan(opt.plan_path);
  const auto given = [&](const std::string& flag) {
    return cmd->count(flag) > 0;
  };
  if (given("--generator")) plan.generator = dpmnet::parse_generator(opt.generator);
  if (given("--methods")) plan.methods = opt.methods;
  if (given("--replicates")) plan.replicates = opt.replicates;
  if (given("--samples")) plan.samples = opt.samples;
  if (given("--noise-sigma")) plan.noise_sigma = opt.noise_sigma;
  if (given("--nodes")) plan.nodes = opt.nodes;
  if (given("--expected-parents")) plan.expected_parents = opt.expected_parents;
  if (given("--weight-lo")) plan.weight_lo = opt.weight_lo;
  if (given("--weight-hi")) plan.weight_hi = opt.weight_hi;
  if (given("--bins")) plan.bins = opt.bins;
  if (given("--dpi-epsilon")) plan.dpi_epsilon = opt.dpi_epsilon;
  if (given("--nd-beta")) plan.nd_beta = opt.nd_beta;
  if (given("--data")) plan.data_path = opt.data_path;
  if (given("--gold")) plan.gold_path = opt.gold_path;
  if (given("--sweep")) plan.sweep_parameter = opt.sweep;
  if (given("--sweep-values")) plan.sweep_values = opt.sweep_values;
  if (seed_given || opt.plan_path.empty()) plan.seed = seed;
  plan.threads = threads;

  const dpmnet::BenchmarkResult result = dpmnet::run_benchmark(plan);
  const nlohmann::ordered_json root = dpmnet::benchmark_json(result);
  if (opt.out_json.empty() || opt.out_json == "-") {
    std::cout << root.dump(2) << '\n';
  } else {
    auto out = open_output(opt.out_json);
    out << root.dump(2) << '\n';
  }
  if (!opt.out_csv.empty()) {
    auto out = open_output(opt.out_csv);
    dpmnet::write_benchmark_csv(result, out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network reconstruction from pairwise association scores"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--seed", seed, "Seed for every random draw")
      ->capture_default_str();
  app.add_option("--threads", threads,
                 "Worker threads; 0 uses the hardware count. Results do not "
                 "depend on this")
      ->capture_default_str();

  SimulateOpts sims;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Generate a dataset and its reference network");
  sim->fallthrough();
  sim->add_option("--kind", sims.kind, "Simulator: gaussian or gs")
      ->check(CLI::IsMember({"gaussian", "gs"}))
      ->capture_default_str();
  sim->add_option("--nodes", sims.nodes, "Node count (gaussian)")
      ->capture_default_str();
  sim->add_option("--samples", sims.samples, "Sample count")
      ->capture_default_str();
  sim->add_option("--noise-sigma", sims.noise_sigma, "Additive noise level")
      ->capture_default_str();
  sim->add_option("--expected-parents", sims.expected_parents,
                  "Mean parents per node (gaussian)")
      ->capture_default_str();
  sim->add_option("--weight-lo", sims.weight_lo,
                  "Smallest precision weight magnitude (gaussian)")
      ->capture_default_str();
  sim->add_option("--weight-hi", sims.weight_hi,
                  "Largest precision weight magnitude (gaussian)")
      ->capture_default_str();
  sim->add_option("--out-data", sims.out_data, "Dataset TSV path")->required();
  sim->add_option("--out-gold", sims.out_gold, "Reference edge TSV path")
      ->required();

  ScoreOpts scores;
  CLI::App* score = app.add_subcommand("score", "Score all variable pairs");
  score->fallthrough();
  score->add_option("--in", scores.in_path, "Dataset TSV path")->required();
  score->add_option("--layout", scores.layout,
                    "Input orientation: samples or variables in rows")
      ->check(CLI::IsMember({"samples", "variables"}))
      ->capture_default_str();
  score->add_option("--method", scores.method, "Scoring method")->required();
  score->add_option("--format", scores.format, "Output format")
      ->check(CLI::IsMember({"edge-list", "matrix"}))
      ->capture_default_str();
  score->add_option("--out", scores.out_path, "Output path; '-' for stdout");
  score->add_option("--bins", scores.bins,
                    "Histogram bins for aracne; 0 picks a default from n")
      ->capture_default_str();
  score->add_option("--dpi-epsilon", scores.dpi_epsilon,
                    "Pruning tolerance for aracne")
      ->capture_default_str();
  score->add_option("--nd-beta", scores.nd_beta,
                    "Largest mapped eigenvalue magnitude for nd")
      ->capture_default_str();

  EvalOpts evals;
  CLI::App* eval = app.add_subcommand(
      "eval", "Compare scores against a reference network");
  eval->fallthrough();
  eval->add_option("--scores", evals.scores_path, "Score file path")->required();
  eval->add_option("--gold", evals.gold_path, "Reference edge TSV path")
      ->required();
  eval->add_option("--out", evals.out_path, "Summary JSON path; '-' for stdout");
  eval->add_option("--roc-csv", evals.roc_csv, "ROC curve CSV path");
  eval->add_option("--pr-csv", evals.pr_csv, "PR curve CSV path");

  DensityOpts densities;
  CLI::App* density = app.add_subcommand(
      "density", "Kernel density of score magnitudes");
  density->fallthrough();
  density->add_option("--in", densities.in_path, "Score file path")->required();
  density->add_option("--bandwidth", densities.bandwidth,
                      "'auto' or a positive number")
      ->capture_default_str();
  density->add_option("--out", densities.out_path, "CSV path; '-' for stdout");

  ThresholdOpts thresholds;
  CLI::App* threshold = app.add_subcommand(
      "threshold", "Keep edges at or above a score magnitude");
  threshold->fallthrough();
  threshold->add_option("--in", thresholds.in_path, "Score file path")
      ->required();
  threshold->add_option("--t", thresholds.threshold, "Magnitude cutoff")
      ->required();
  threshold->add_option("--gold", thresholds.gold_path,
                        "Reference edge TSV path for tp/fp/fn labels");
  threshold->add_option("--out", thresholds.out_path,
                        "Output TSV path; '-' for stdout");

  BenchOpts benches;
  CLI::App* bench = app.add_subcommand(
      "bench", "Replicated method comparison with optional parameter sweep");
  bench->fallthrough();
  bench->add_option("--plan", benches.plan_path, "Plan file path");
  bench->add_option("--generator", benches.generator,
                    "Data source: gaussian, gs, or external")
      ->check(CLI::IsMember({"gaussian", "gs", "external"}));
  bench->add_option("--methods", benches.methods, "Methods to run")
      ->delimiter(',');
  bench->add_option("--replicates", benches.replicates, "Replicates per cell");
  bench->add_option("--samples", benches.samples, "Sample count");
  bench->add_option("--noise-sigma", benches.noise_sigma, "Additive noise level");
  bench->add_option("--nodes", benches.nodes, "Node count (gaussian)");
  bench->add_option("--expected-parents", benches.expected_parents,
                    "Mean parents per node (gaussian)");
  bench->add_option("--weight-lo", benches.weight_lo,
                    "Smallest precision weight magnitude (gaussian)");
  bench->add_option("--weight-hi", benches.weight_hi,
                    "Largest precision weight magnitude (gaussian)");
  bench->add_option("--bins", benches.bins, "Histogram bins for aracne");
  bench->add_option("--dpi-epsilon", benches.dpi_epsilon,
                    "Pruning tolerance for aracne");
  bench->add_option("--nd-beta", benches.nd_beta,
                    "Largest mapped eigenvalue magnitude for nd");
  bench->add_option("--data", benches.data_path, "Dataset TSV (external)");
  bench->add_option("--gold", benches.gold_path, "Reference TSV (external)");
  bench->add_option("--sweep", benches.sweep,
                    "Swept parameter: samples or noise-sigma")
      ->check(CLI::IsMember({"samples", "noise-sigma"}));
  bench->add_option("--sweep-values", benches.sweep_values, "Swept values")
      ->delimiter(',');
  bench->add_option("--out-json", benches.out_json,
                    "Full results JSON path; '-' for stdout");
  bench->add_option("--out-csv", benches.out_csv, "Summary CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const int worker_threads = dpmnet::resolve_threads(threads);
    if (sim->parsed()) {
      run_simulate(sims, seed);
    } else if (score->parsed()) {
      run_score(scores, seed, worker_threads);
    } else if (eval->parsed()) {
      run_eval(evals);
    } else if (density->parsed()) {
      run_density(densities);
    } else if (threshold->parsed()) {
      run_threshold(thresholds);
    } else if (bench->parsed()) {
      run_bench(benches, bench, seed, app.count("--seed") > 0, worker_threads);
    }
  } catch (const dpmnet::numeric_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const dpmnet::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
