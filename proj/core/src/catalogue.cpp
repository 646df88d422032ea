#include "riskcontract/catalogue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "riskcontract/errors.hpp"

namespace riskcontract {

double utility(double theta, const Scenario& scenario, const Position& y)
{
    if (!(theta > 0.0))
        throw validation_error("utility: risk aversion must be positive");
    return scenario.mean(y) - theta * scenario.variance(y);
}

namespace {

void check_catalogue(const TypeGrid& grid, const Scenario& scenario,
                     const Catalogue& catalogue)
{
    if (catalogue.contracts.size() != grid.size() ||
        catalogue.prices.size() != grid.size())
        throw shape_error("catalogue does not match the type grid");
    for (const Position& x : catalogue.contracts)
        scenario.check_position(x);
}

void check_contracts(const TypeGrid& grid, const Scenario& scenario,
                     const std::vector<Position>& contracts)
{
    if (contracts.size() != grid.size())
        throw shape_error("one contract per type required");
    for (const Position& x : contracts)
        scenario.check_position(x);
}

} // namespace

Catalogue price_from_value(const TypeGrid& grid, const Scenario& scenario,
                           const ValueFunction& v,
                           const std::vector<Position>& contracts)
{
    const auto issues = v.violations(grid);
    if (!issues.empty())
        throw validation_error("price_from_value: invalid value function: " +
                               issues.front());
    check_contracts(grid, scenario, contracts);

    Catalogue out;
    out.contracts = contracts;
    out.prices.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out.prices[i] =
            utility(grid.thetas[i], scenario, contracts[i]) - v.values[i];
    return out;
}

std::vector<IcViolation> check_ic(const TypeGrid& grid,
                                  const Scenario& scenario,
                                  const Catalogue& catalogue, double tol)
{
    check_catalogue(grid, scenario, catalogue);
    const std::size_t n = grid.size();

    // net[i][k]: utility of type i buying the contract designed for k.
    std::vector<double> means(n), vars(n);
    for (std::size_t k = 0; k < n; ++k) {
        means[k] = scenario.mean(catalogue.contracts[k]);
        vars[k] = scenario.variance(catalogue.contracts[k]);
    }
    std::vector<IcViolation> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double own = means[i] - grid.thetas[i] * vars[i] -
                           catalogue.prices[i];
        for (std::size_t k = 0; k < n; ++k) {
            if (k == i)
                continue;
            const double cross = means[k] - grid.thetas[i] * vars[k] -
                                 catalogue.prices[k];
            if (cross > own + tol)
                out.push_back({i, k, cross - own});
        }
    }
    return out;
}

std::vector<IrViolation> check_ir(const TypeGrid& grid,
                                  const Scenario& scenario,
                                  const Catalogue& catalogue, double tol)
{
    check_catalogue(grid, scenario, catalogue);
    std::vector<IrViolation> out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double net =
            utility(grid.thetas[i], scenario, catalogue.contracts[i]) -
            catalogue.prices[i];
        if (net < -tol)
            out.push_back({i, -net});
    }
    return out;
}

std::vector<double> variance_residual(const TypeGrid& grid,
                                      const Scenario& scenario,
                                      const ValueFunction& v,
                                      const std::vector<Position>& contracts)
{
    check_contracts(grid, scenario, contracts);
    const auto slopes = v.slopes(grid);
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = scenario.variance(contracts[i]) + slopes[i];
    return out;
}

double principal_income(const TypeGrid& grid, const ValueFunction& v)
{
    const auto slopes = v.slopes(grid);
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        acc += grid.weights[i] * (grid.thetas[i] * slopes[i] - v.values[i]);
    return acc;
}

std::pair<double, double> income_bound_identity(const TypeGrid& grid,
                                                const ValueFunction& v)
{
    const auto issues = v.violations(grid, 1e-9, /*require_top_zero=*/true);
    if (!issues.empty())
        throw validation_error("income_bound_identity: " + issues.front());
    const std::size_t n = grid.size();
    const auto slopes = v.slopes(grid);

    // Trapezoidal node weights for the Lebesgue measure on [a, 1].
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double half = 0.5 * grid.gap(i);
        w[i] += half;
        w[i + 1] += half;
    }

    double lhs = 0.0; // -I(v) with Lebesgue weights
    double integral_v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        lhs -= w[i] * (grid.thetas[i] * slopes[i] - v.values[i]);
        integral_v += w[i] * v.values[i];
    }
    const double rhs = grid.a * v.values.front() + 2.0 * integral_v;
    return {lhs, rhs};
}

ValueFunction legendre_roundtrip(const TypeGrid& grid, const ValueFunction& v)
{
    if (v.size() != grid.size())
        throw shape_error("legendre_roundtrip: value function length mismatch");
    const std::size_t n = grid.size();

    std::vector<double> slope_grid = v.slopes(grid);
    slope_grid.push_back(0.0);
    std::sort(slope_grid.begin(), slope_grid.end());
    slope_grid.erase(std::unique(slope_grid.begin(), slope_grid.end()),
                     slope_grid.end());

    // v*(y) = max_i { theta_i y - v_i }
    std::vector<double> conj(slope_grid.size());
    for (std::size_t k = 0; k < slope_grid.size(); ++k) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i)
            best = std::max(best, grid.thetas[i] * slope_grid[k] - v.values[i]);
        conj[k] = best;
    }

    ValueFunction out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < slope_grid.size(); ++k)
            best = std::max(best, grid.thetas[i] * slope_grid[k] - conj[k]);
        out.values[i] = best;
    }
    return out;
}

Catalogue demean_catalogue(const Scenario& scenario, const Catalogue& catalogue)
{
    Catalogue out = catalogue;
    for (std::size_t i = 0; i < out.contracts.size(); ++i) {
        const double m = scenario.mean(out.contracts[i]);
        for (double& x : out.contracts[i])
            x -= m;
        out.prices[i] -= m;
    }
    return out;
}

Redistribution redistribute(const TypeGrid& grid, const Scenario& scenario,
                            const ValueFunction& v,
                            const std::vector<Position>& contracts,
                            const Position& reference)
{
    check_contracts(grid, scenario, contracts);
    scenario.check_position(reference);
    const auto issues = v.violations(grid);
    if (!issues.empty())
        throw validation_error("redistribute: invalid value function: " +
                               issues.front());

    const double ref_var = scenario.variance(reference);
    if (!(ref_var > 0.0))
        throw validation_error("redistribute: reference claim has zero variance");
    Position y = reference;
    const double ref_scale = 1.0 / std::sqrt(ref_var);
    for (double& x : y)
        x *= ref_scale;

    const std::size_t n = grid.size();
    const auto slopes = v.slopes(grid);
    constexpr double kBindTol = 1e-10;

    std::vector<double> alpha_plus(n, 0.0), alpha_minus(n, 0.0);
    std::vector<bool> slack(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const double var_i = scenario.variance(contracts[i]);
        const double gap = -slopes[i] - var_i; // room left under the bound
        if (gap < -kBindTol)
            throw infeasible_error(
                "redistribute: variance of contract " + std::to_string(i + 1) +
                " already exceeds -v'");
        if (gap <= kBindTol)
            continue; // already binding, keep the contract as is
        const double cov = scenario.covariance(contracts[i], y);
        const double disc = std::sqrt(std::max(cov * cov + gap, 0.0));
        alpha_plus[i] = -cov + disc;
        alpha_minus[i] = -cov - disc;
        slack[i] = true;
    }

    Redistribution out;
    out.alphas.assign(n, 0.0);

    std::vector<std::size_t> slack_idx;
    for (std::size_t i = 0; i < n; ++i)
        if (slack[i])
            slack_idx.push_back(i);

    // Cumulative weighted loading S_j when the first j slack types take the
    // positive root and the rest the negative one: non-decreasing from
    // S_0 <= 0 to S_K >= 0. The crossing index is the threshold type.
    std::vector<double> cum(slack_idx.size() + 1, 0.0);
    for (std::size_t i : slack_idx)
        cum[0] += grid.weights[i] * alpha_minus[i];
    for (std::size_t j = 0; j < slack_idx.size(); ++j) {
        const std::size_t i = slack_idx[j];
        cum[j + 1] =
            cum[j] + grid.weights[i] * (alpha_plus[i] - alpha_minus[i]);
    }

    std::size_t crossing = 0;
    while (crossing < cum.size() && cum[crossing] < 0.0)
        ++crossing;

    if (crossing == 0) {
        // Already balanced with every slack type on the negative root
        // (possible only when all slack weights vanish, S_0 = 0); per-type
        // binding then fixes the loadings and the weighted sum stays zero.
        for (std::size_t i : slack_idx)
            out.alphas[i] = alpha_minus[i];
    } else {
        const std::size_t t = slack_idx[crossing - 1];
        double rest = 0.0;
        for (std::size_t j = 0; j < slack_idx.size(); ++j) {
            const std::size_t i = slack_idx[j];
            if (i == t)
                continue;
            out.alphas[i] = (j < crossing - 1) ? alpha_plus[i] : alpha_minus[i];
            rest += grid.weights[i] * out.alphas[i];
        }
        // Solve the threshold loading exactly so the weighted sum is zero;
        // it lands between the two admissible roots.
        const double alpha_t = -rest / grid.weights[t];
        out.alphas[t] = alpha_t;
        const double span = alpha_plus[t] - alpha_minus[t];
        const double frac =
            span > 0.0 ? (alpha_t - alpha_minus[t]) / span : 1.0;
        if (frac > 1e-14 && frac < 1.0 - 1e-14) {
            out.blended = t;
            out.blend_fraction = frac;
        }
    }

    out.contracts = contracts;
    for (std::size_t i = 0; i < n; ++i) {
        if (out.alphas[i] == 0.0)
            continue;
        for (std::size_t j = 0; j < scenario.size(); ++j)
            out.contracts[i][j] += out.alphas[i] * y[j];
    }
    return out;
}

} // namespace riskcontract
