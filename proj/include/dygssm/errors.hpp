#pragma once

#include <stdexcept>
#include <string>

namespace dygssm {

// Error taxonomy mirrored by the CLI exit codes: config -> 2, data -> 3,
// numeric -> 4. Shape/contract violations indicate caller bugs and map to
// the generic failure code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct DataError : Error {
  using Error::Error;
};

struct ShapeError : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

struct ContractError : Error {
  using Error::Error;
};

}  // namespace dygssm
