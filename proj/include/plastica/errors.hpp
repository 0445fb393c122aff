#pragma once

#include <stdexcept>
#include <string>

#include "plastica/core.hpp"

namespace plastica {

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation outside a declared domain. Carries the offending value and the
// valid interval so callers can report actionable messages.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double value, double lo, double hi)
      : Error(what + " (value " + std::to_string(value) + ", valid [" +
              std::to_string(lo) + ", " + std::to_string(hi) + "])"),
        value(value),
        lo(lo),
        hi(hi) {}
  double value;
  double lo;
  double hi;
};

// Non-finite or diverging quantity. `t` is the time at which it was detected.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double t)
      : Error(what + " at t=" + std::to_string(t)), t(t) {}
  double t;
};

// Scenario file problems: syntax errors carry line/column, semantic errors
// name the violated invariant.
class ScenarioError : public Error {
 public:
  explicit ScenarioError(const std::string& what, int line = -1, int col = -1)
      : Error(line >= 0 ? what + " (line " + std::to_string(line) + ", column " +
                              std::to_string(col) + ")"
                        : what),
        line(line),
        col(col) {}
  int line;
  int col;
};

// A cloud point escaped a set that was declared positively invariant.
class InvarianceError : public Error {
 public:
  InvarianceError(const std::string& what, Vec witness, double t)
      : Error(what + " at t=" + std::to_string(t)),
        witness(std::move(witness)),
        t(t) {}
  Vec witness;
  double t;
};

}  // namespace plastica
