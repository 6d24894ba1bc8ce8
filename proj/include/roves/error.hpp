#pragma once

#include <stdexcept>
#include <string>

namespace roves {

/// Raised for invalid user-supplied data: bad parameters, malformed files,
/// violated preconditions. The CLI maps it to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace roves
