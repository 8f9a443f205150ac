#pragma once

#include <stdexcept>
#include <string>

namespace atomlab {

/// Violated mathematical precondition or failed invariant (CLI exit code 1,
/// as opposed to I/O and parse failures which exit 2).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidCI : DomainError { using DomainError::DomainError; };
struct NotFano : DomainError { using DomainError::DomainError; };
struct NoSolution : DomainError { using DomainError::DomainError; };
struct Inconsistent : DomainError { using DomainError::DomainError; };
struct InsufficientOrder : DomainError { using DomainError::DomainError; };
struct CrossCheckFailure : DomainError { using DomainError::DomainError; };
struct NotCommuting : DomainError { using DomainError::DomainError; };
struct NotDegreeRaising : DomainError { using DomainError::DomainError; };
struct ClusterMismatch : DomainError { using DomainError::DomainError; };
struct IdCollision : DomainError { using DomainError::DomainError; };
struct InvalidDiamond : DomainError { using DomainError::DomainError; };
struct DimensionMismatch : DomainError { using DomainError::DomainError; };
struct ActionMismatch : DomainError { using DomainError::DomainError; };
struct NonIsolated : DomainError { using DomainError::DomainError; };
struct DegenerateParameters : DomainError { using DomainError::DomainError; };
struct BadTodd : DomainError { using DomainError::DomainError; };
struct SingularMatrix : DomainError { using DomainError::DomainError; };
struct RelationViolated : DomainError { using DomainError::DomainError; };
struct NotValidated : DomainError { using DomainError::DomainError; };

}  // namespace atomlab
