// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace yamabe {

enum class ErrorKind {
  InvalidParameter,
  IntegrationFailure,
  SymmetryPreconditionViolated,
  BracketInvalid,
  RootFindingFailure,
  NoConvergence,
  SeedFailure,
  EigenSolverFailure,
  MalformedInput,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it onto an exit status and a message.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::IntegrationFailure: return "integration-failure";
    case ErrorKind::SymmetryPreconditionViolated: return "symmetry-precondition-violated";
    case ErrorKind::BracketInvalid: return "bracket-invalid";
    case ErrorKind::RootFindingFailure: return "root-finding-failure";
    case ErrorKind::NoConvergence: return "no-convergence";
    case ErrorKind::SeedFailure: return "seed-failure";
    case ErrorKind::EigenSolverFailure: return "eigen-solver-failure";
    case ErrorKind::MalformedInput: return "malformed-input";
  }
  return "unknown";
}

} // namespace yamabe
