#include "riskcontract/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "riskcontract/errors.hpp"
#include "riskcontract/numerics.hpp"

namespace riskcontract {

double PayoffMap::operator()(double x) const
{
    switch (kind) {
    case Kind::identity:
        return x;
    case Kind::put:
        return std::max(strike - x, 0.0);
    case Kind::call:
        return std::max(x - strike, 0.0);
    }
    return x;
}

BenchmarkClaim BenchmarkClaim::normalized(const Scenario& scenario,
                                          const Position& raw)
{
    scenario.check_position(raw);
    for (double x : raw)
        if (x < 0.0)
            throw validation_error("benchmark claim: payoff must be nonnegative");
    const double var = scenario.variance(raw);
    if (!(var > 1e-14))
        throw validation_error(
            "benchmark claim: payoff variance is zero, cannot normalize");
    BenchmarkClaim claim;
    claim.payoff = raw;
    const double scale = 1.0 / std::sqrt(var);
    for (double& x : claim.payoff)
        x *= scale;
    claim.mean = scenario.mean(claim.payoff);
    return claim;
}

IncomeConstants mn_constants(double a)
{
    if (!(a > 0.0 && a <= 1.0))
        throw validation_error("mn_constants: a must lie in (0, 1]");
    IncomeConstants c;
    if (a == 1.0)
        return c; // empty integration range
    c.n = 0.5 * std::log((2.0 - a) / a);
    c.m = num::integrate(
        [a](double t) {
            const double u = 2.0 * t - a;
            return 0.125 * (1.0 / u - 1.0 / (2.0 - a)) + 0.25 * t / (u * u);
        },
        a, 1.0, 1e-10);
    return c;
}

double ratio_from_income(double income, double claim_mean,
                         const IncomeConstants& c)
{
    if (!(income >= 0.0))
        throw validation_error("ratio_from_income: income must be nonnegative");
    if (income == 0.0)
        return 0.0;
    const double ne = c.n * claim_mean;
    const double disc = ne * ne - 4.0 * income * c.m;
    if (disc < 0.0)
        throw infeasible_error(
            "ratio_from_income: income exceeds the attainable range");
    return (ne - std::sqrt(disc)) / (2.0 * c.m);
}

double income_from_ratio(double ratio, double claim_mean,
                         const IncomeConstants& c)
{
    return c.n * claim_mean * ratio - c.m * ratio * ratio;
}

ValueFunction v_closed_form(const TypeGrid& grid, double ratio)
{
    if (!(ratio >= 0.0))
        throw validation_error("v_closed_form: ratio must be nonnegative");
    ValueFunction v;
    v.values.resize(grid.size());
    const double r2 = ratio * ratio;
    for (std::size_t i = 0; i < grid.size(); ++i)
        v.values[i] = 0.125 * r2 * (1.0 / (2.0 * grid.thetas[i] - grid.a) -
                                    1.0 / (2.0 - grid.a));
    return v;
}

std::vector<double> euler_lagrange_residual(const TypeGrid& grid,
                                            const ValueFunction& v,
                                            double ratio)
{
    if (v.size() != grid.size())
        throw shape_error("euler_lagrange_residual: length mismatch");
    std::vector<double> out;
    out.reserve(grid.size() > 0 ? grid.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double slope = (v.values[i + 1] - v.values[i]) / grid.gap(i);
        const double u0 = 2.0 * grid.thetas[i] - grid.a;
        const double u1 = 2.0 * grid.thetas[i + 1] - grid.a;
        out.push_back(2.0 * std::sqrt(std::max(-slope, 0.0) * u0 * u1) - ratio);
    }
    return out;
}

namespace {

BenchmarkSolution assemble(const TypeGrid& grid, const Scenario& scenario,
                           const BenchmarkClaim& claim, double income,
                           double ratio, const IncomeConstants& constants,
                           double risk_before, double risk_after, bool shortcut)
{
    BenchmarkSolution sol;
    sol.income = income;
    sol.ratio = ratio;
    sol.constants = constants;
    sol.v = v_closed_form(grid, ratio);
    sol.multipliers.resize(grid.size());
    std::vector<Position> contracts(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        sol.multipliers[i] = ratio / (2.0 * (2.0 * grid.thetas[i] - grid.a));
        Position x = claim.payoff;
        for (double& e : x)
            e *= sol.multipliers[i];
        contracts[i] = std::move(x);
    }
    sol.catalogue = price_from_value(grid, scenario, sol.v, contracts);
    sol.risk_before = risk_before;
    sol.risk_after = risk_after;
    sol.shortcut = shortcut;
    return sol;
}

} // namespace

std::optional<BenchmarkSolution> comonotone_shortcut(const TypeGrid& grid,
                                                     const Scenario& scenario,
                                                     const BenchmarkClaim& claim,
                                                     const RiskSpec& spec)
{
    spec.validate();
    if (!comonotone_check(scenario.income, claim.payoff))
        return std::nullopt;
    const double base = risk_value(spec, scenario, scenario.income);
    return assemble(grid, scenario, claim, 0.0, 0.0, mn_constants(grid.a), base,
                    base, /*shortcut=*/true);
}

BenchmarkSolution solve_benchmark(const TypeGrid& grid,
                                  const Scenario& scenario,
                                  const BenchmarkClaim& claim,
                                  const RiskSpec& spec)
{
    spec.validate();
    if (std::abs(scenario.variance(claim.payoff) - 1.0) > 1e-9)
        throw validation_error("solve_benchmark: claim is not normalized");

    if (auto trivial = comonotone_shortcut(grid, scenario, claim, spec))
        return *trivial;

    const IncomeConstants c = mn_constants(grid.a);
    const double risk_before = risk_value(spec, scenario, scenario.income);
    const double ne = c.n * claim.mean;
    const double income_max = c.m > 0.0 ? ne * ne / (4.0 * c.m) : 0.0;

    auto objective = [&](double income) {
        const double r = ratio_from_income(std::min(income, income_max),
                                           claim.mean, c);
        Position net = scenario.income;
        const double sold = c.n * r; // aggregate multiple of the claim
        for (std::size_t j = 0; j < net.size(); ++j)
            net[j] -= sold * claim.payoff[j];
        return risk_value(spec, scenario, net) - income;
    };

    double best_income = 0.0;
    if (income_max > 0.0) {
        // Coarse scan guards against non-unimodality, golden section
        // refines the winning bracket.
        constexpr int kScan = 512;
        int best_k = 0;
        double best_val = objective(0.0);
        for (int k = 1; k <= kScan; ++k) {
            const double a_k = income_max * double(k) / double(kScan);
            const double val = objective(a_k);
            if (val < best_val) {
                best_val = val;
                best_k = k;
            }
        }
        const double lo =
            income_max * double(std::max(0, best_k - 1)) / double(kScan);
        const double hi =
            income_max * double(std::min(kScan, best_k + 1)) / double(kScan);
        best_income = num::golden_section_min(objective, lo, hi, 1e-8);
        if (objective(0.0) <= objective(best_income))
            best_income = 0.0; // never worse than the do-nothing solution
    }

    const double ratio = ratio_from_income(best_income, claim.mean, c);
    return assemble(grid, scenario, claim, best_income, ratio, c, risk_before,
                    objective(best_income), /*shortcut=*/false);
}

QuantizedScenario quantize_normal(double mean, double stddev, int cells,
                                  double income_intercept, double income_slope)
{
    if (!(stddev > 0.0))
        throw validation_error("quantize_normal: stddev must be positive");
    if (cells < 1)
        throw validation_error("quantize_normal: needs at least one cell");

    QuantizedScenario out;
    out.underlying.resize(cells);
    std::vector<double> probs(cells, 1.0 / double(cells));
    double total = 0.0;
    for (double p : probs)
        total += p;
    probs.back() += 1.0 - total; // absorb representation error of 1/cells
    Position income(cells);
    double pdf_lo = 0.0; // phi at the lower cell edge; 0 at -inf
    for (int k = 0; k < cells; ++k) {
        const double hi_p = double(k + 1) / double(cells);
        const double pdf_hi =
            (k + 1 == cells) ? 0.0 : num::normal_pdf(num::normal_quantile(hi_p));
        const double cell_mean = double(cells) * (pdf_lo - pdf_hi);
        out.underlying[k] = mean + stddev * cell_mean;
        income[k] = income_intercept + income_slope * out.underlying[k];
        pdf_lo = pdf_hi;
    }
    out.scenario = Scenario::make(std::move(probs), std::move(income));
    return out;
}

} // namespace riskcontract
