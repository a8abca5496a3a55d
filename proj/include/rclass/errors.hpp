#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rclass {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyModel : Error {
  EmptyModel() : Error("model has no rules") {}
};

struct DegenerateOutputs : Error {
  DegenerateOutputs() : Error("all shifted classifier outputs are zero") {}
};

struct SingularCovariance : Error {
  using Error::Error;
};

struct CorruptRuleState : Error {
  using Error::Error;
};

struct ZeroWithinScatter : Error {
  ZeroWithinScatter() : Error("within-class scatter surrogate is not positive") {}
};

struct BadRow : Error {
  BadRow(std::size_t row, const std::string& reason)
      : Error("row " + std::to_string(row) + ": " + reason), row(row) {}
  std::size_t row;
};

struct VersionMismatch : Error {
  using Error::Error;
};

struct CorruptSnapshot : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct OracleTimeout : Error {
  OracleTimeout() : Error("label oracle did not answer before the deadline") {}
};

}  // namespace rclass
