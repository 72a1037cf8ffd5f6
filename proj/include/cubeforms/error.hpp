#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cubeforms {

// Failure categories surfaced by the library. The CLI maps these to exit
// codes: InvalidInput -> 2, resource limits -> 3.
enum class ErrorKind {
  InvalidInput,
  EnumerationTooLarge,
  ExactEngineTooLarge,
  ConditioningOnNull,
  PetalTooSmall,
  DegenerateDistribution,
  RetryExhausted,
  NoNontrivialWitness,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorKind::ExactEngineTooLarge: return "ExactEngineTooLarge";
    case ErrorKind::ConditioningOnNull: return "ConditioningOnNull";
    case ErrorKind::PetalTooSmall: return "PetalTooSmall";
    case ErrorKind::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorKind::RetryExhausted: return "RetryExhausted";
    case ErrorKind::NoNontrivialWitness: return "NoNontrivialWitness";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace cubeforms
