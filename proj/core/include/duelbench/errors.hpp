#pragma once

#include <stdexcept>
#include <string>

namespace duelbench {

// Bad index, malformed input, violated precondition.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A trace lacks the structure an operation needs (e.g. a round with no
// Condorcet winner handed to the oracle).
class ClassError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Experiment configuration is inconsistent or unreadable.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace duelbench
