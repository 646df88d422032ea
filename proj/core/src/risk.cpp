#include "riskcontract/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "riskcontract/errors.hpp"
#include "riskcontract/numerics.hpp"

namespace riskcontract {

RiskSpec RiskSpec::make_level(double level)
{
    RiskSpec s;
    s.kind = Kind::avar_level;
    s.level = level;
    s.validate();
    return s;
}

RiskSpec RiskSpec::make_cap(double cap)
{
    RiskSpec s;
    s.kind = Kind::avar_cap;
    s.cap = cap;
    s.validate();
    return s;
}

RiskSpec RiskSpec::make_mixture(std::vector<std::pair<double, double>> parts)
{
    RiskSpec s;
    s.kind = Kind::mixture;
    s.mixture = std::move(parts);
    s.validate();
    return s;
}

void RiskSpec::validate() const
{
    switch (kind) {
    case Kind::avar_level:
        if (!(level > 0.0 && level <= 1.0))
            throw validation_error("risk spec: level must lie in (0,1]");
        break;
    case Kind::avar_cap:
        if (!(cap >= 1.0))
            throw validation_error("risk spec: dual cap must be >= 1");
        break;
    case Kind::mixture: {
        if (mixture.empty())
            throw validation_error("risk spec: mixture must not be empty");
        double total = 0.0;
        for (const auto& [w, lam] : mixture) {
            if (!(w >= 0.0))
                throw validation_error("risk spec: mixture weights must be nonnegative");
            if (!(lam > 0.0 && lam <= 1.0))
                throw validation_error("risk spec: mixture levels must lie in (0,1]");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw validation_error("risk spec: mixture weights must sum to 1");
        break;
    }
    }
}

namespace {

// States ordered by payoff ascending, ties by state index ascending.
std::vector<std::size_t> tail_order(const Position& position)
{
    std::vector<std::size_t> order(position.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return position[a] < position[b];
                     });
    return order;
}

} // namespace

double avar_quantile(const Scenario& scenario, const Position& position,
                     double level)
{
    scenario.check_position(position);
    if (!(level > 0.0 && level <= 1.0))
        throw validation_error("avar_quantile: level must lie in (0,1]");

    double remaining = level;
    double acc = 0.0;
    for (std::size_t j : tail_order(position)) {
        if (remaining <= 0.0)
            break;
        const double take = std::min(scenario.probs[j], remaining);
        acc += take * position[j];
        remaining -= take;
    }
    return -acc / level;
}

DualRisk avar_dual(const Scenario& scenario, const Position& position,
                   double cap)
{
    scenario.check_position(position);
    if (!(cap >= 1.0))
        throw infeasible_error(
            "avar_dual: cap below 1 leaves the budget p.q = 1 unreachable");

    DualRisk out;
    out.weights.q.assign(scenario.size(), 0.0);
    double remaining = 1.0; // probability budget sum_j p_j q_j
    for (std::size_t j : tail_order(position)) {
        if (remaining <= 0.0)
            break;
        const double p = scenario.probs[j];
        if (p == 0.0)
            continue;
        const double q = std::min(cap, remaining / p);
        out.weights.q[j] = q;
        remaining -= p * q;
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < scenario.size(); ++j)
        acc += scenario.probs[j] * out.weights.q[j] * position[j];
    out.risk = -acc;
    return out;
}

double mixture_risk(const Scenario& scenario, const Position& position,
                    const RiskSpec& spec)
{
    if (spec.kind != RiskSpec::Kind::mixture)
        throw validation_error("mixture_risk: spec is not a mixture");
    spec.validate();
    double acc = 0.0;
    for (const auto& [w, lam] : spec.mixture)
        acc += w * avar_quantile(scenario, position, lam);
    return acc;
}

double risk_value(const RiskSpec& spec, const Scenario& scenario,
                  const Position& position)
{
    switch (spec.kind) {
    case RiskSpec::Kind::avar_level:
        return avar_quantile(scenario, position, spec.level);
    case RiskSpec::Kind::avar_cap:
        return avar_dual(scenario, position, spec.cap).risk;
    case RiskSpec::Kind::mixture:
        return mixture_risk(scenario, position, spec);
    }
    throw validation_error("risk_value: unknown spec kind");
}

bool comonotone_check(const Position& x, const Position& y)
{
    if (x.size() != y.size())
        throw shape_error("comonotone_check: positions differ in length");
    for (std::size_t j = 0; j < x.size(); ++j)
        for (std::size_t k = j + 1; k < x.size(); ++k)
            if ((x[j] - x[k]) * (y[j] - y[k]) < 0.0)
                return false;
    return true;
}

bool CoherenceReport::all_passed() const
{
    for (const auto& a : axioms)
        if (!a.passed())
            return false;
    return true;
}

namespace {

constexpr double kAxiomTol = 1e-9;

std::string describe(const Position& y)
{
    std::ostringstream os;
    os << "(";
    for (std::size_t j = 0; j < y.size(); ++j)
        os << (j ? "," : "") << y[j];
    os << ")";
    return os.str();
}

void record(AxiomResult& r, double violation, const std::string& witness)
{
    ++r.trials;
    if (violation > kAxiomTol) {
        ++r.violations;
        if (violation > r.worst) {
            r.worst = violation;
            r.witness = witness;
        }
    }
}

} // namespace

CoherenceReport coherence_suite(const RiskSpec& spec, const Scenario& scenario,
                                int samples, std::uint64_t seed)
{
    if (samples < 1)
        throw validation_error("coherence_suite: samples must be >= 1");
    spec.validate();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> payoff(-2.0, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t m = scenario.size();

    auto draw = [&] {
        Position y(m);
        for (double& v : y)
            v = payoff(rng);
        return y;
    };
    auto rho = [&](const Position& y) { return risk_value(spec, scenario, y); };

    CoherenceReport report;
    AxiomResult mono{"monotonicity"};
    AxiomResult cash{"cash invariance"};
    AxiomResult convex{"convexity"};
    AxiomResult homog{"positive homogeneity"};
    AxiomResult bound{"lower bound -E[Y]"};
    AxiomResult comono{"comonotone additivity"};
    AxiomResult level_mono{"tail level monotonicity"};

    for (int iter = 0; iter < samples; ++iter) {
        const Position x = draw();
        const Position y = draw();

        // X <= X + |noise| pointwise must not increase risk.
        Position higher = x;
        for (std::size_t j = 0; j < m; ++j)
            higher[j] += std::abs(payoff(rng));
        record(mono, rho(higher) - rho(x), describe(x));

        const double c = payoff(rng);
        Position shifted = x;
        for (double& v : shifted)
            v += c;
        record(cash, std::abs(rho(shifted) - (rho(x) - c)), describe(x));

        const double t = unit(rng);
        Position blend(m);
        for (std::size_t j = 0; j < m; ++j)
            blend[j] = t * x[j] + (1.0 - t) * y[j];
        record(convex, rho(blend) - (t * rho(x) + (1.0 - t) * rho(y)),
               describe(x) + "+" + describe(y));

        const double scale = 2.0 * unit(rng);
        Position scaled = x;
        for (double& v : scaled)
            v *= scale;
        record(homog, std::abs(rho(scaled) - scale * rho(x)), describe(x));

        record(bound, -scenario.mean(x) - rho(x), describe(x));

        // f(x) = x^3 + x is strictly increasing, so x and f(x) are comonotone.
        Position fx(m);
        for (std::size_t j = 0; j < m; ++j)
            fx[j] = x[j] * x[j] * x[j] + x[j];
        Position total(m);
        for (std::size_t j = 0; j < m; ++j)
            total[j] = x[j] + fx[j];
        record(comono, std::abs(rho(total) - rho(x) - rho(fx)), describe(x));

        double lo = 0.05 + 0.9 * unit(rng);
        double hi = lo + (1.0 - lo) * unit(rng);
        record(level_mono,
               avar_quantile(scenario, x, hi) - avar_quantile(scenario, x, lo),
               describe(x));
    }

    report.axioms = {mono, cash, convex, homog, bound, comono, level_mono};
    return report;
}

} // namespace riskcontract
