#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dpmnet/competitors.hpp"
#include "dpmnet/dataset.hpp"
#include "dpmnet/dcov.hpp"
#include "dpmnet/error.hpp"
#include "dpmnet/partial_distance.hpp"
#include "dpmnet/precision.hpp"
#include "dpmnet/score_matrix.hpp"

namespace dpmnet {

inline const std::vector<std::string>& method_ids() {
  static const std::vector<std::string> ids = {
      "cor",      "pcor",          "reg-pcor", "dcor", "pdcor-residual",
      "pdcor-sr", "dpm",           "reg-dpm",  "aracne", "nd"};
  return ids;
}

struct MethodParams {
  int bins = 0;            // 0 selects the sample-size default
  double dpi_epsilon = 0.0;
  double nd_beta = 0.9;
  int threads = 1;
};

struct MethodResult {
  ScoreMatrix scores;
  std::optional<double> lambda;
  Metadata metadata;
};

inline MethodResult score_method(const Dataset& d, const std::string& method,
                                 const MethodParams& params = {}) {
  MethodResult r;
  if (method == "cor" || method == "pcor" || method == "reg-pcor" ||
      method == "dpm" || method == "reg-dpm") {
    GramMethod gm = GramMethod::cor;
    if (method == "pcor") gm = GramMethod::pcor;
    else if (method == "reg-pcor") gm = GramMethod::reg_pcor;
    else if (method == "dpm") gm = GramMethod::dpm;
    else if (method == "reg-dpm") gm = GramMethod::reg_dpm;
    MethodOutput out = method_matrix(d, gm, params.threads);
    r.scores = std::move(out.scores);
    r.lambda = out.lambda;
  } else if (method == "dcor") {
    r.scores = dcor_matrix(d, params.threads);
  } else if (method == "pdcor-residual") {
    r.scores = pdcor_matrix(d, PdcorVariant::residual, params.threads);
    r.metadata.emplace_back("conditioning",
                            "full remaining block, euclidean row distances");
  } else if (method == "pdcor-sr") {
    r.scores = pdcor_matrix(d, PdcorVariant::sr, params.threads);
    r.metadata.emplace_back("conditioning",
                            "full remaining block, euclidean row distances");
  } else if (method == "aracne") {
    r.scores = aracne_matrix(d, params.bins, params.dpi_epsilon, params.threads);
    const int used = params.bins > 0 ? params.bins : default_bins(d.n());
    r.metadata.emplace_back("bins", std::to_string(used));
  } else if (method == "nd") {
    r.scores = nd_matrix(d, params.nd_beta);
  } else {
    std::string msg = "unknown method '" + method + "'; valid methods are";
    for (const auto& id : method_ids()) msg += " " + id;
    throw value_error(msg);
  }
  r.scores.method = method;
  return r;
}

}  // namespace dpmnet
