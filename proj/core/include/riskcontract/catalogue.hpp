#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "riskcontract/scenario.hpp"

namespace riskcontract {

/// Menu of type-indexed contracts with prices.
struct Catalogue {
    std::vector<Position> contracts;
    std::vector<double> prices;

    std::size_t size() const { return contracts.size(); }
};

/// Mean-variance utility of an agent with risk aversion `theta`:
/// U(theta, Y) = E[Y] - theta Var[Y].
double utility(double theta, const Scenario& scenario, const Position& y);

/// Build a catalogue from a valid value function and one contract per type,
/// pricing each contract at U(theta_i, X_i) - v_i so the buyer of type i
/// nets exactly v_i. Throws validation_error when v breaks its invariants.
Catalogue price_from_value(const TypeGrid& grid, const Scenario& scenario,
                           const ValueFunction& v,
                           const std::vector<Position>& contracts);

/// One incentive-compatibility breach: type `type` strictly prefers the
/// contract designed for `other`.
struct IcViolation {
    std::size_t type;
    std::size_t other;
    double magnitude;
};

/// All pairs (i, k) where buying contract k beats the assigned contract i by
/// more than `tol`. Empty result means the catalogue is incentive
/// compatible on the grid.
std::vector<IcViolation> check_ic(const TypeGrid& grid,
                                  const Scenario& scenario,
                                  const Catalogue& catalogue,
                                  double tol = 1e-8);

struct IrViolation {
    std::size_t type;
    double magnitude;
};

/// Types whose assigned contract nets less than the zero reservation
/// utility by more than `tol`.
std::vector<IrViolation> check_ir(const TypeGrid& grid,
                                  const Scenario& scenario,
                                  const Catalogue& catalogue,
                                  double tol = 1e-8);

/// Residuals of the variance-binding condition Var[X_i] + v'(theta_i), with
/// the forward/backward finite-difference convention of
/// ValueFunction::slopes.
std::vector<double> variance_residual(const TypeGrid& grid,
                                      const Scenario& scenario,
                                      const ValueFunction& v,
                                      const std::vector<Position>& contracts);

/// Discretized principal income I(v) = sum_i M_i (theta_i v'_i - v_i).
/// Nonpositive for every valid v; -I(v) is the revenue.
double principal_income(const TypeGrid& grid, const ValueFunction& v);

/// Both sides of the integration-by-parts identity
///   -I(v) = a v(a) + 2 int_a^1 v,
/// computed independently under the Lebesgue measure on [a, 1]
/// (finite-difference income with trapezoidal node weights on the left,
/// trapezoidal quadrature of v on the right). Requires v_n = 0; for exact
/// data both sides agree up to the O(h^2) discretization error.
std::pair<double, double> income_bound_identity(const TypeGrid& grid,
                                                const ValueFunction& v);

/// Discrete convex conjugation round trip. Conjugates v on the slope grid
/// y in {v'(theta_i)} union {0} and reconstructs sup_y { theta_i y - v*(y) }.
/// Reproduces valid (convex, non-increasing) inputs exactly at the nodes;
/// arbitrary inputs map to a convex minorant, and the map is idempotent.
ValueFunction legendre_roundtrip(const TypeGrid& grid, const ValueFunction& v);

/// Shift every contract to zero mean and adjust its price by the same
/// amount. Cash invariance of the utility keeps net utilities, IC and IR
/// unchanged.
Catalogue demean_catalogue(const Scenario& scenario, const Catalogue& catalogue);

/// Result of redistributing risk across types so the variance constraint
/// binds. The threshold type, when one exists, carries a convex combination
/// of the two admissible loadings so the weighted loadings sum to zero
/// exactly; its variance ends up inside (not on) the bound.
struct Redistribution {
    std::vector<Position> contracts;        // Z_i = X_i + alpha_i Y
    std::vector<double> alphas;
    std::optional<std::size_t> blended;     // index whose alpha was blended
    double blend_fraction = 0.0;            // weight on the positive root
};

/// Given contracts feasible for the relaxed problem
/// (Var[X_i] <= -v'(theta_i)), add multiples of the unit-variance reference
/// claim so that every slack type's variance binds while the weighted sum
/// of loadings is zero, leaving the aggregate contract unchanged.
///
/// Throws infeasible_error when some variance already exceeds its bound and
/// validation_error when the reference claim has zero variance.
Redistribution redistribute(const TypeGrid& grid, const Scenario& scenario,
                            const ValueFunction& v,
                            const std::vector<Position>& contracts,
                            const Position& reference);

} // namespace riskcontract
