#pragma once

#include <stdexcept>
#include <string>

namespace signspot {

// Exit codes used by the CLI: 0 success, 1 usage, 2 data, 3 numerical.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input data (files, manifests, configs).
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite loss or degenerate numerical state.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace signspot
