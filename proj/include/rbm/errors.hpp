// Error taxonomy. The CLI maps these to exit codes:
//   UsageError -> 1, DomainError and subclasses -> 2, verification failure -> 3.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rbm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad arguments: unknown manifold, scheme/formulation mismatch, malformed flags.
struct UsageError : Error {
    using Error::Error;
};

// State outside the manifold's validity domain (chart box, constraint tolerance).
struct DomainError : Error {
    using Error::Error;
};

// Chart coordinate singularity (e.g. polar caps of the sphere chart).
struct SingularityError : DomainError {
    using DomainError::DomainError;
};

// Metric not symmetric positive definite at the requested point.
struct DegenerateMetricError : Error {
    using Error::Error;
};

// Post-step constraint residual exceeded the hard bound with retraction off.
struct ConstraintViolationError : DomainError {
    using DomainError::DomainError;
};

// One or more ensemble paths failed; carries (path index, message) pairs.
struct EnsembleError : Error {
    std::vector<std::pair<std::int64_t, std::string>> failures;

    EnsembleError(const std::string& what,
                  std::vector<std::pair<std::int64_t, std::string>> f)
        : Error(what), failures(std::move(f)) {}
};

}  // namespace rbm
