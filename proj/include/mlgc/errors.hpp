#pragma once

#include <stdexcept>

namespace mlgc {

// Shape or size mismatch between inputs.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Value outside the mathematical domain of an operation (e.g. negative edge
// weight).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid argument that is neither a shape nor a domain problem (e.g. equal
// endpoints where distinct vertices are required).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Bad run/experiment configuration.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A matrix is numerically singular where an invertible one is required,
// typically because the underlying graph is disconnected.
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative numerical routine failed to converge.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rank-deficient input to a full-rank factorization.
struct RankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file; message carries file and line context.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failure; message carries the offending path.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mlgc
