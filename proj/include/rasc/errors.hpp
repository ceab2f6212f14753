#pragma once

#include <stdexcept>
#include <string>

namespace rasc {

// Invalid or inconsistent user-supplied parameters (sizes, ranges, mismatched
// ring params between operands).
struct param_error : std::runtime_error {
  explicit param_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A filter that is required to be bijective is not.
struct filter_error : std::runtime_error {
  explicit filter_error(const std::string& msg) : std::runtime_error(msg) {}
};

// File or stream I/O failure.
struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rasc
