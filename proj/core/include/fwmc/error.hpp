#pragma once

#include <stdexcept>
#include <string>

namespace fwmc {

// Raised when a precondition of an estimator, sampler or study is violated.
// The message is the short reason string ("insufficient sample", ...).
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fwmc
