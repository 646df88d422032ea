#include "riskcontract/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskcontract/errors.hpp"
#include "riskcontract/numerics.hpp"

namespace riskcontract {

DualRisk exact_avar_lp(const Scenario& scenario, const Position& position,
                       double cap)
{
    scenario.check_position(position);
    if (!(cap >= 1.0))
        throw infeasible_error("exact_avar_lp: cap below 1 is infeasible");
    const std::size_t m = scenario.size();
    if (m > 12)
        throw budget_error("exact_avar_lp: vertex enumeration limited to 12 states");

    DualRisk best;
    best.risk = -std::numeric_limits<double>::infinity();

    // Vertices: a subset S at the cap whose probability cost stays within
    // the budget, the remainder absorbed by one fractional state outside S.
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        double used = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            if (mask & (1u << j))
                used += scenario.probs[j] * cap;
        if (used > 1.0 + 1e-12)
            continue;
        const double rem = 1.0 - used;

        auto evaluate = [&](const std::vector<double>& q) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                acc += scenario.probs[j] * q[j] * position[j];
            if (-acc > best.risk) {
                best.risk = -acc;
                best.weights.q = q;
            }
        };

        if (rem <= 1e-15) {
            std::vector<double> q(m, 0.0);
            for (std::size_t j = 0; j < m; ++j)
                if (mask & (1u << j))
                    q[j] = cap;
            evaluate(q);
            continue;
        }
        for (std::size_t frac = 0; frac < m; ++frac) {
            if (mask & (1u << frac))
                continue;
            const double p = scenario.probs[frac];
            if (p <= 0.0)
                continue;
            const double qf = rem / p;
            if (qf > cap + 1e-12)
                continue;
            std::vector<double> q(m, 0.0);
            for (std::size_t j = 0; j < m; ++j)
                if (mask & (1u << j))
                    q[j] = cap;
            q[frac] = std::min(qf, cap);
            evaluate(q);
        }
    }

    if (!std::isfinite(best.risk))
        throw infeasible_error("exact_avar_lp: no feasible vertex found");
    return best;
}

bool value_from_strikes(const Scenario& scenario, const TypeGrid& grid,
                        const SmoothingParams& params,
                        const std::vector<double>& strikes, ValueFunction& out)
{
    const std::size_t n = grid.size();
    if (strikes.size() != n)
        throw shape_error("value_from_strikes: one strike per type required");

    std::vector<double> var(n);
    for (std::size_t i = 0; i < n; ++i) {
        Position t(scenario.size());
        for (std::size_t j = 0; j < scenario.size(); ++j)
            t[j] = smoothed_plus(strikes[i] - std::abs(scenario.income[j]),
                                 params.eps);
        var[i] = scenario.variance(t);
    }
    // Convexity of v needs non-increasing variances across the gaps; the
    // top type's variance must match the backward slope within eps2.
    for (std::size_t i = 0; i + 2 < n; ++i)
        if (var[i] < var[i + 1] - 1e-12)
            return false;
    if (n >= 2 && std::abs(var[n - 1] - var[n - 2]) > params.eps2)
        return false;

    out.values.assign(n, 0.0);
    for (std::size_t i = n - 1; i-- > 0;)
        out.values[i] = out.values[i + 1] + grid.gap(i) * var[i];
    return true;
}

double exact_minimax_objective(const Scenario& scenario, const TypeGrid& grid,
                               const SmoothingParams& params, double cap,
                               const ValueFunction& v,
                               const std::vector<double>& strikes)
{
    const std::size_t n = grid.size();
    if (strikes.size() != n || v.size() != n)
        throw shape_error("exact_minimax_objective: length mismatch");

    Position net = scenario.income;
    double income = 0.0;
    const auto slopes = v.slopes(grid);
    for (std::size_t i = 0; i < n; ++i) {
        Position t(scenario.size());
        for (std::size_t j = 0; j < scenario.size(); ++j) {
            t[j] = smoothed_plus(strikes[i] - std::abs(scenario.income[j]),
                                 params.eps);
            net[j] -= grid.weights[i] * t[j];
        }
        income += grid.weights[i] * (scenario.mean(t) +
                                     grid.thetas[i] * slopes[i] - v.values[i]);
    }
    return exact_avar_lp(scenario, net, cap).risk - income;
}

GridSearchResult grid_search_minimax(const Scenario& scenario,
                                     const TypeGrid& grid,
                                     const SmoothingParams& params, double cap,
                                     const GridSearchSpec& spec)
{
    params.validate();
    const std::size_t n = grid.size();
    const std::size_t m = scenario.size();
    if (n > 3 || m > 3)
        throw budget_error("grid_search_minimax: limited to 3 types and 3 states");
    if (spec.resolution < 2)
        throw validation_error("grid_search_minimax: resolution must be >= 2");

    double hi = spec.strike_hi;
    if (hi < 0.0) {
        hi = 0.0;
        for (double w : scenario.income)
            hi = std::max(hi, std::abs(w));
    }
    const double lo = spec.strike_lo;
    if (!(lo >= 0.0 && hi >= lo))
        throw validation_error("grid_search_minimax: bad strike bounds");

    double tuples = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        tuples *= double(spec.resolution);
    if (tuples > double(spec.max_points))
        throw budget_error("grid_search_minimax: tuple budget exceeded");

    GridSearchResult best;
    best.objective = std::numeric_limits<double>::infinity();

    std::vector<int> idx(n, 0);
    std::vector<double> strikes(n);
    ValueFunction v;
    while (true) {
        for (std::size_t i = 0; i < n; ++i)
            strikes[i] =
                lo + (hi - lo) * double(idx[i]) / double(spec.resolution - 1);
        if (value_from_strikes(scenario, grid, params, strikes, v)) {
            const double obj =
                exact_minimax_objective(scenario, grid, params, cap, v, strikes);
            if (obj < best.objective) {
                best.objective = obj;
                best.strikes = strikes;
                best.v = v;
            }
        }
        std::size_t pos = 0;
        while (pos < n && ++idx[pos] == spec.resolution) {
            idx[pos] = 0;
            ++pos;
        }
        if (pos == n)
            break;
    }

    if (!std::isfinite(best.objective))
        throw infeasible_error("grid_search_minimax: no feasible tuple on the grid");
    return best;
}

double quadrature_risk(double mean, double stddev, const PayoffMap& payoff,
                       double level)
{
    if (!(stddev > 0.0))
        throw validation_error("quadrature_risk: stddev must be positive");
    if (!(level > 0.0 && level <= 1.0))
        throw validation_error("quadrature_risk: level must lie in (0,1]");

    // Worst `level` tail of Y = payoff(underlying). For a non-decreasing
    // payoff that is the lower tail of the underlying; for a non-increasing
    // payoff the upper tail. Substituting t = Phi(u) turns the quantile
    // integral into a Gaussian-weighted integral with smooth integrand.
    const double ten_sigmas = 10.0;
    double lo, hi;
    if (payoff.direction() >= 0) {
        lo = -ten_sigmas;
        hi = (level == 1.0) ? ten_sigmas : num::normal_quantile(level);
    } else {
        lo = (level == 1.0) ? -ten_sigmas : num::normal_quantile(1.0 - level);
        hi = ten_sigmas;
    }
    const double integral = num::integrate(
        [&](double u) {
            return payoff(mean + stddev * u) * num::normal_pdf(u);
        },
        lo, hi, 1e-10);
    return -integral / level;
}

} // namespace riskcontract
