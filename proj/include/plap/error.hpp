#pragma once

#include <stdexcept>
#include <string>

namespace plap {

/// Malformed or inconsistent input (documents, parameters, files).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not deliver its result (bracket failure,
/// step-size underflow, missing roots).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace plap
