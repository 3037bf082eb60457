#pragma once

#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dpmnet/error.hpp"
#include "dpmnet/text.hpp"

namespace dpmnet {

enum class Layout { samples_in_rows, variables_in_rows };

// n samples in rows, p variables in columns.
struct Dataset {
  Eigen::MatrixXd values;
  std::vector<std::string> names;

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index p() const { return values.cols(); }
};

inline void validate_dataset(const Dataset& d) {
  if (d.n() < 3) {
    throw dimension_error("dataset needs at least 3 samples, got " +
                          std::to_string(d.n()));
  }
  if (d.p() < 2) {
    throw dimension_error("dataset needs at least 2 variables, got " +
                          std::to_string(d.p()));
  }
  if (static_cast<Eigen::Index>(d.names.size()) != d.p()) {
    throw dimension_error("dataset has " + std::to_string(d.names.size()) +
                          " names for " + std::to_string(d.p()) + " variables");
  }
  std::set<std::string> seen;
  for (const auto& name : d.names) {
    if (!seen.insert(name).second) {
      throw value_error("duplicate variable name: " + name);
    }
  }
  if (!d.values.allFinite()) {
    for (Eigen::Index j = 0; j < d.p(); ++j) {
      for (Eigen::Index i = 0; i < d.n(); ++i) {
        if (!std::isfinite(d.values(i, j))) {
          throw value_error("non-finite value at sample " + std::to_string(i + 1) +
                            ", variable " + d.names[static_cast<std::size_t>(j)]);
        }
      }
    }
  }
}

namespace detail {

inline double parse_cell(const std::string& token, std::size_t line_number,
                         std::size_t column) {
  const auto v = parse_double(token);
  if (!v) {
    throw parse_error("line " + std::to_string(line_number) + ", column " +
                      std::to_string(column) + ": not a number: \"" + token +
                      "\"");
  }
  return *v;
}

}  // namespace detail

inline Dataset read_dataset(std::istream& in,
                            Layout layout = Layout::samples_in_rows) {
  const auto lines = detail::read_lines(in);
  if (lines.size() < 2) throw parse_error("expected a header line and data rows");

  const auto header = detail::split_tabs(lines[0].text);
  const std::size_t width = header.size();
  const std::size_t rows = lines.size() - 1;

  Eigen::MatrixXd body(static_cast<Eigen::Index>(rows),
                       static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& line = lines[r + 1];
    const auto tokens = detail::split_tabs(line.text);
    if (tokens.size() != width) {
      throw parse_error("line " + std::to_string(line.number) + ": expected " +
                        std::to_string(width) + " fields, got " +
                        std::to_string(tokens.size()));
    }
    for (std::size_t c = 0; c < width; ++c) {
      body(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          detail::parse_cell(tokens[c], line.number, c + 1);
    }
  }

  Dataset d;
  if (layout == Layout::samples_in_rows) {
    d.values = std::move(body);
    d.names = header;
  } else {
    // Header carries sample labels and is dropped; each body row is one
    // variable, so names are generated.
    d.values = body.transpose();
    d.names.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      d.names.push_back("V" + std::to_string(r + 1));
    }
  }
  validate_dataset(d);
  return d;
}

inline Dataset read_dataset(const std::string& path,
                            Layout layout = Layout::samples_in_rows) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  try {
    return read_dataset(in, layout);
  } catch (const parse_error& e) {
    throw parse_error(path + ": " + e.what());
  } catch (const dimension_error& e) {
    throw dimension_error(path + ": " + e.what());
  }
}

inline void write_dataset(const Dataset& d, std::ostream& out) {
  out << detail::join_tabs(d.names) << '\n';
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    for (Eigen::Index j = 0; j < d.p(); ++j) {
      if (j) out << '\t';
      out << detail::format_double(d.values(i, j));
    }
    out << '\n';
  }
}

inline void write_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  write_dataset(d, out);
}

// Column-wise mean 0, unit variance (n-1 denominator).
inline Dataset standardize_columns(const Dataset& d) {
  validate_dataset(d);
  Dataset out = d;
  const double denom = static_cast<double>(d.n() - 1);
  for (Eigen::Index j = 0; j < d.p(); ++j) {
    auto col = out.values.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double var = col.squaredNorm() / denom;
    if (var <= 0.0) {
      throw value_error("constant column: " + d.names[static_cast<std::size_t>(j)]);
    }
    col /= std::sqrt(var);
  }
  return out;
}

}  // namespace dpmnet
