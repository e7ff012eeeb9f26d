#pragma once

#include <stdexcept>
#include <string>

namespace moran {

// Bad input: malformed JSON, semantic violations in a config, unusable flags,
// unsupported dimensions, exhausted resource budgets.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A spec failed exhaustive geometric validation when an operation required it.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// An operation's precondition does not hold for this input (e.g. rearrangement
// machinery on a variable-ratio spec, or sigma without a positive verdict).
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Two specs that must share their vertical structure do not.
class MismatchError : public std::runtime_error {
 public:
  explicit MismatchError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace moran
