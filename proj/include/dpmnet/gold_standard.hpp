#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dpmnet/error.hpp"
#include "dpmnet/text.hpp"

namespace dpmnet {

// Undirected reference network; edges stored once as index pairs (i < j).
struct GoldStandard {
  std::vector<std::string> nodes;
  std::set<std::pair<int, int>> edges;

  bool has_edge(int i, int j) const {
    if (i > j) std::swap(i, j);
    return edges.count({i, j}) > 0;
  }
  std::size_t edge_count() const { return edges.size(); }
};

inline GoldStandard make_gold_standard(
    std::vector<std::string> nodes,
    const std::vector<std::pair<int, int>>& edge_pairs) {
  GoldStandard g;
  g.nodes = std::move(nodes);
  const int p = static_cast<int>(g.nodes.size());
  for (auto [i, j] : edge_pairs) {
    if (i == j) throw value_error("self edge on node " + g.nodes[static_cast<std::size_t>(i)]);
    if (i < 0 || j < 0 || i >= p || j >= p) throw dimension_error("edge index out of range");
    if (i > j) std::swap(i, j);
    g.edges.insert({i, j});
  }
  return g;
}

// Lines are "a<TAB>b<TAB>{0|1}". Pairs labelled 1 become edges; 0 lines are
// kept-out pairs; directed duplicates collapse onto one undirected edge.
inline GoldStandard read_gold_standard(std::istream& in,
                                       const std::vector<std::string>& node_names) {
  GoldStandard g;
  g.nodes = node_names;
  std::map<std::string, int> index;
  for (std::size_t k = 0; k < node_names.size(); ++k) {
    index[node_names[k]] = static_cast<int>(k);
  }

  for (const auto& line : detail::read_lines(in)) {
    const auto tokens = detail::split_tabs(line.text);
    if (tokens.size() != 3) {
      throw parse_error("line " + std::to_string(line.number) +
                        ": expected 3 fields, got " + std::to_string(tokens.size()));
    }
    const auto a = index.find(detail::trim(tokens[0]));
    const auto b = index.find(detail::trim(tokens[1]));
    if (a == index.end()) {
      throw parse_error("line " + std::to_string(line.number) +
                        ": unknown node label: " + tokens[0]);
    }
    if (b == index.end()) {
      throw parse_error("line " + std::to_string(line.number) +
                        ": unknown node label: " + tokens[1]);
    }
    const std::string flag = detail::trim(tokens[2]);
    if (flag != "0" && flag != "1") {
      throw parse_error("line " + std::to_string(line.number) +
                        ": edge flag must be 0 or 1, got \"" + tokens[2] + "\"");
    }
    if (flag == "0") continue;
    int i = a->second, j = b->second;
    if (i == j) {
      throw parse_error("line " + std::to_string(line.number) +
                        ": self edge on " + tokens[0]);
    }
    if (i > j) std::swap(i, j);
    g.edges.insert({i, j});
  }
  return g;
}

inline GoldStandard read_gold_standard(const std::string& path,
                                       const std::vector<std::string>& node_names) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  try {
    return read_gold_standard(in, node_names);
  } catch (const parse_error& e) {
    throw parse_error(path + ": " + e.what());
  }
}

inline void write_gold_standard(const GoldStandard& g, std::ostream& out) {
  for (const auto& [i, j] : g.edges) {
    out << g.nodes[static_cast<std::size_t>(i)] << '\t'
        << g.nodes[static_cast<std::size_t>(j)] << "\t1\n";
  }
}

inline void write_gold_standard(const GoldStandard& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  write_gold_standard(g, out);
}

}  // namespace dpmnet
