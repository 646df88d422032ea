#pragma once

#include <stdexcept>
#include <string>

namespace riskcontract {

/// Base class for all errors raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimension mismatches between vectors that must line up state-by-state or
/// type-by-type.
class shape_error : public error {
public:
    using error::error;
};

/// An input violates a documented invariant (probabilities off, level out of
/// range, non-convex value function where a convex one is required, ...).
class validation_error : public error {
public:
    using error::error;
};

/// A requested construction has no feasible answer (dual cap below 1,
/// variance target above its plateau, negative discriminant, bad solver
/// start).
class infeasible_error : public error {
public:
    using error::error;
};

/// An enumeration exceeds its declared size or point budget.
class budget_error : public error {
public:
    using error::error;
};

} // namespace riskcontract
