#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dpmnet/dataset.hpp"
#include "dpmnet/error.hpp"
#include "dpmnet/text.hpp"

namespace dpmnet {

enum class ScoreFormat { edge_list, matrix };

// Symmetric pairwise association scores with a zero diagonal.
struct ScoreMatrix {
  Eigen::MatrixXd scores;
  std::vector<std::string> names;
  std::string method;

  Eigen::Index p() const { return scores.rows(); }
};

inline void validate_scores(const ScoreMatrix& m) {
  if (m.scores.rows() != m.scores.cols()) {
    throw dimension_error("score matrix is not square");
  }
  if (static_cast<Eigen::Index>(m.names.size()) != m.p()) {
    throw dimension_error("score matrix has " + std::to_string(m.names.size()) +
                          " names for " + std::to_string(m.p()) + " variables");
  }
  for (Eigen::Index i = 0; i < m.p(); ++i) {
    if (m.scores(i, i) != 0.0) throw value_error("score diagonal must be 0");
    for (Eigen::Index j = i + 1; j < m.p(); ++j) {
      if (m.scores(i, j) != m.scores(j, i)) {
        throw value_error("score matrix is not symmetric at (" +
                          std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      if (!std::isfinite(m.scores(i, j))) {
        throw value_error("non-finite score at (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")");
      }
    }
  }
}

namespace detail {

struct ScoredPair {
  int i = 0;
  int j = 0;
  double score = 0.0;
};

// Descending magnitude; ties broken by the lexicographic name pair so every
// ordering in the toolkit is total and reproducible.
inline std::vector<ScoredPair> ordered_pairs(const ScoreMatrix& m) {
  std::vector<ScoredPair> pairs;
  const int p = static_cast<int>(m.p());
  pairs.reserve(static_cast<std::size_t>(p) * (p - 1) / 2);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      pairs.push_back({i, j, m.scores(i, j)});
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [&m](const ScoredPair& a, const ScoredPair& b) {
              const double ma = std::abs(a.score), mb = std::abs(b.score);
              if (ma != mb) return ma > mb;
              const auto& an1 = m.names[static_cast<std::size_t>(a.i)];
              const auto& an2 = m.names[static_cast<std::size_t>(a.j)];
              const auto& bn1 = m.names[static_cast<std::size_t>(b.i)];
              const auto& bn2 = m.names[static_cast<std::size_t>(b.j)];
              const auto& alo = std::min(an1, an2);
              const auto& ahi = std::max(an1, an2);
              const auto& blo = std::min(bn1, bn2);
              const auto& bhi = std::max(bn1, bn2);
              return std::tie(alo, ahi) < std::tie(blo, bhi);
            });
  return pairs;
}

}  // namespace detail

using Metadata = std::vector<std::pair<std::string, std::string>>;

inline void write_scores(const ScoreMatrix& m, std::ostream& out,
                         ScoreFormat format = ScoreFormat::edge_list,
                         const Metadata& metadata = {}) {
  validate_scores(m);
  for (const auto& [key, value] : metadata) {
    out << "# " << key << ": " << value << '\n';
  }
  if (format == ScoreFormat::edge_list) {
    for (const auto& pair : detail::ordered_pairs(m)) {
      out << m.names[static_cast<std::size_t>(pair.i)] << '\t'
          << m.names[static_cast<std::size_t>(pair.j)] << '\t'
          << detail::format_double(pair.score) << '\n';
    }
  } else {
    out << detail::join_tabs(m.names) << '\n';
    for (Eigen::Index i = 0; i < m.p(); ++i) {
      for (Eigen::Index j = 0; j < m.p(); ++j) {
        if (j) out << '\t';
        out << detail::format_double(m.scores(i, j));
      }
      out << '\n';
    }
  }
}

inline void write_scores(const ScoreMatrix& m, const std::string& path,
                         ScoreFormat format = ScoreFormat::edge_list,
                         const Metadata& metadata = {}) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  write_scores(m, out, format, metadata);
}

// Reads either output format. '#' lines are metadata; "# method:" and
// "# format:" are honoured when present. Without a format note, a file whose
// first data line is three fields with non-numeric endpoints is an edge list,
// anything else is a matrix with a header line.
inline ScoreMatrix read_scores(std::istream& in) {
  std::vector<detail::NumberedLine> data;
  std::string method;
  std::string format_note;
  for (auto& line : detail::read_lines(in)) {
    if (!line.text.empty() && line.text[0] == '#') {
      const auto body = detail::trim(line.text.substr(1));
      const auto colon = body.find(':');
      if (colon != std::string::npos) {
        const auto key = detail::trim(body.substr(0, colon));
        const auto value = detail::trim(body.substr(colon + 1));
        if (key == "method") method = value;
        if (key == "format") format_note = value;
      }
      continue;
    }
    data.push_back(std::move(line));
  }
  if (data.empty()) throw parse_error("empty score file");

  bool edge_list;
  if (format_note == "edge-list") {
    edge_list = true;
  } else if (format_note == "matrix") {
    edge_list = false;
  } else {
    const auto tokens = detail::split_tabs(data[0].text);
    edge_list = tokens.size() == 3 && detail::parse_double(tokens[2]) &&
                (!detail::parse_double(tokens[0]) || !detail::parse_double(tokens[1]));
  }

  ScoreMatrix m;
  m.method = method;
  if (edge_list) {
    std::map<std::string, int> index;
    std::vector<std::tuple<int, int, double>> entries;
    for (const auto& line : data) {
      const auto tokens = detail::split_tabs(line.text);
      if (tokens.size() != 3) {
        throw parse_error("line " + std::to_string(line.number) +
                          ": expected 3 fields, got " + std::to_string(tokens.size()));
      }
      const auto value = detail::parse_double(tokens[2]);
      if (!value) {
        throw parse_error("line " + std::to_string(line.number) +
                          ": not a number: \"" + tokens[2] + "\"");
      }
      auto id = [&index, &m](const std::string& name) {
        const auto [it, inserted] = index.insert({name, static_cast<int>(index.size())});
        if (inserted) m.names.push_back(name);
        return it->second;
      };
      const int i = id(detail::trim(tokens[0]));
      const int j = id(detail::trim(tokens[1]));
      if (i == j) {
        throw parse_error("line " + std::to_string(line.number) +
                          ": self pair " + tokens[0]);
      }
      entries.emplace_back(i, j, *value);
    }
    const int p = static_cast<int>(m.names.size());
    m.scores = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(p, p);
    for (const auto& [i, j, value] : entries) {
      if (seen(i, j)) {
        throw parse_error("duplicate pair " + m.names[static_cast<std::size_t>(i)] +
                          ", " + m.names[static_cast<std::size_t>(j)]);
      }
      seen(i, j) = seen(j, i) = 1;
      m.scores(i, j) = m.scores(j, i) = value;
    }
  } else {
    m.names = detail::split_tabs(data[0].text);
    const auto p = static_cast<Eigen::Index>(m.names.size());
    if (static_cast<Eigen::Index>(data.size()) != p + 1) {
      throw parse_error("matrix format: expected " + std::to_string(p) +
                        " rows after the header, got " + std::to_string(data.size() - 1));
    }
    m.scores.resize(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
      const auto& line = data[static_cast<std::size_t>(i) + 1];
      const auto tokens = detail::split_tabs(line.text);
      if (static_cast<Eigen::Index>(tokens.size()) != p) {
        throw parse_error("line " + std::to_string(line.number) + ": expected " +
                          std::to_string(p) + " fields, got " +
                          std::to_string(tokens.size()));
      }
      for (Eigen::Index j = 0; j < p; ++j) {
        m.scores(i, j) = detail::parse_cell(tokens[static_cast<std::size_t>(j)],
                                            line.number, static_cast<std::size_t>(j) + 1);
      }
    }
  }
  validate_scores(m);
  return m;
}

inline ScoreMatrix read_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  try {
    return read_scores(in);
  } catch (const parse_error& e) {
    throw parse_error(path + ": " + e.what());
  }
}

}  // namespace dpmnet
