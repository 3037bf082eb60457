#pragma once

#include <stdexcept>
#include <string>

namespace dpmnet {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// malformed input files (bad tokens, ragged rows, unknown labels)
struct parse_error : error {
  using error::error;
};

// shape mismatches and size preconditions
struct dimension_error : error {
  using error::error;
};

// domain violations on otherwise well-formed values (constant column, bad flag value)
struct value_error : error {
  using error::error;
};

// numerical failure (singular matrix, negative statistic beyond round-off)
struct numeric_error : error {
  using error::error;
};

struct io_error : error {
  using error::error;
};

}  // namespace dpmnet
