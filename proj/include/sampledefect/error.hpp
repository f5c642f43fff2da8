#pragma once

#include <stdexcept>
#include <string>

namespace sbd {

// Bad files, malformed configs, violated preconditions.
class InputError : public std::runtime_error {
  public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Statistics that are undefined on the given inputs (e.g. a census sample
// leaves no sampling variation to correlate against). Never reported as NaN.
class DegenerateError : public std::runtime_error {
  public:
    explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sbd
