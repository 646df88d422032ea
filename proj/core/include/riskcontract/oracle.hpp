#pragma once

#include <cstdint>
#include <vector>

#include "riskcontract/benchmark.hpp"
#include "riskcontract/minimax.hpp"
#include "riskcontract/risk.hpp"
#include "riskcontract/scenario.hpp"

namespace riskcontract {

/// Brute-force reference for the capped dual risk: enumerate every vertex
/// of { q : p.q = 1, 0 <= q <= cap } (a subset of states at the cap plus at
/// most one fractional coordinate) and take the best. Exponential in the
/// state count; limited to m <= 12.
DualRisk exact_avar_lp(const Scenario& scenario, const Position& position,
                       double cap);

/// Search setup for the reference strike enumeration.
struct GridSearchSpec {
    int resolution = 33;         // strike points per type axis
    double strike_lo = 0.0;
    double strike_hi = -1.0;     // < 0 means max |W|
    std::uint64_t max_points = 10'000'000;
};

struct GridSearchResult {
    ValueFunction v;
    std::vector<double> strikes;
    double objective = 0.0;
};

/// The objective the reference search minimizes: exact inner maximum over
/// the true dual set (budget one, capped weights) of the net position risk,
/// minus the catalogue income of the value function reconstructed from
/// binding variances. Also used to compare solver output against the
/// reference on equal terms.
double exact_minimax_objective(const Scenario& scenario, const TypeGrid& grid,
                               const SmoothingParams& params, double cap,
                               const ValueFunction& v,
                               const std::vector<double>& strikes);

/// Reconstruct the value function implied by binding variances: slopes
/// -Var[T_i] for the first n-1 types, anchored at v_n = 0 and summed
/// backward. Returns false when the result violates the convexity or
/// relaxed top-slope requirements.
bool value_from_strikes(const Scenario& scenario, const TypeGrid& grid,
                        const SmoothingParams& params,
                        const std::vector<double>& strikes, ValueFunction& out);

/// Enumerate strike tuples on a uniform grid (n <= 3, m <= 3), reconstruct
/// each value function from binding variances, skip infeasible tuples and
/// return the best exact objective. Throws budget_error when the tuple
/// count exceeds max_points.
GridSearchResult grid_search_minimax(const Scenario& scenario,
                                     const TypeGrid& grid,
                                     const SmoothingParams& params, double cap,
                                     const GridSearchSpec& spec);

/// Tail-average risk of a monotone payoff of a normal underlying, by
/// adaptive quadrature of the quantile integral (substituted into the
/// Gaussian density) to 1e-8. Audits quantized-scenario computations.
double quadrature_risk(double mean, double stddev, const PayoffMap& payoff,
                       double level);

} // namespace riskcontract
