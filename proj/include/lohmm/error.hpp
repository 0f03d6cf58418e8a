#pragma once

#include <stdexcept>
#include <string>

namespace lohmm {

// Syntax-level failure while reading a model, sequence, corpus or grammar
// file.  Carries a 1-based line number when one is known.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                    : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Semantic failure: an operation was handed input that is well-formed
// syntactically but violates a documented precondition (unvalidated model,
// type error, non-ground observation, dead state, ...).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An observation sequence has probability zero under the model in a context
// where a positive probability is required (decoding, classification).
class ZeroLikelihoodError : public ModelError {
 public:
  using ModelError::ModelError;
};

}  // namespace lohmm
