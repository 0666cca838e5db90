#pragma once

#include <stdexcept>
#include <string>

namespace qfl {

// Argument errors use std::invalid_argument directly; the types below cover
// the remaining failure classes that callers may want to tell apart.

/// A measurement outcome with zero Born probability was requested.
class ImpossibleOutcome : public std::runtime_error {
public:
    explicit ImpossibleOutcome(const std::string& what) : std::runtime_error(what) {}
};

/// An input violates an operation's documented precondition (e.g. a
/// non-hermitian observable or a non-orthonormal mode basis).
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// A dimension or size cap was exceeded.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// The request is well formed but outside the implemented physics
/// (non-polynomial potentials, charged or rotating black holes).
class Unsupported : public std::runtime_error {
public:
    explicit Unsupported(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qfl
