#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace deconvo {

//! Inconsistent shapes: dimensions, partitions, coefficient arrays.
struct StructuralError : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

//! Requested feature is outside what a family supports (e.g. sampling an
//! unsupported density, marginalizing a non-product kernel).
struct UnsupportedError : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

//! Singular divisions, non-finite integrands, imaginary residuals above
//! tolerance, truncated outer integrals and vanishing design densities.
struct NumericalError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

//! Too few replicates for a sample statistic.
struct InsufficientSamples : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error
{
  ConfigError(const std::string& msg, std::size_t line_no = 0)
    : std::runtime_error(line_no ? "line " + std::to_string(line_no) + ": " + msg
                                 : msg)
    , line(line_no)
  {}
  std::size_t line;
};

} // namespace deconvo
