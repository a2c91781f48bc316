#pragma once

#include <stdexcept>
#include <string>

namespace treelearn {

// Malformed input: bad tree text, bad grammar/automaton file, unknown token.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation was asked to run on a value that violates its precondition,
// e.g. a negative weight handed to a positive-automaton conversion.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The learner exceeded its iteration cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace treelearn
