#pragma once

#include <optional>
#include <vector>

#include "riskcontract/catalogue.hpp"
#include "riskcontract/risk.hpp"
#include "riskcontract/scenario.hpp"

namespace riskcontract {

/// Scalar payoff transformations used to build claims from an underlying.
struct PayoffMap {
    enum class Kind { identity, put, call };
    Kind kind = Kind::identity;
    double strike = 0.0;

    double operator()(double x) const;
    /// Monotone direction: +1 non-decreasing, -1 non-increasing.
    int direction() const { return kind == Kind::put ? -1 : +1; }
};

/// A claim with unit variance under the scenario, sold in type-dependent
/// multiples.
struct BenchmarkClaim {
    Position payoff;
    double mean = 0.0;

    /// Normalize a raw payoff to unit variance. Throws validation_error for
    /// (near-)deterministic payoffs, which cannot be normalized, and for
    /// negative payoffs.
    static BenchmarkClaim normalized(const Scenario& scenario,
                                     const Position& raw);
};

/// The two integrals entering the income constraint, as functions of the
/// lower type bound a:
///   n = int_a^1 dt / (2t - a)                          (closed form)
///   m = int_a^1 [ (1/8)(1/(2t-a) - 1/(2-a)) + (t/4)/(2t-a)^2 ] dt
/// m is evaluated by adaptive quadrature to 1e-10.
struct IncomeConstants {
    double m = 0.0;
    double n = 0.0;
};

/// Valid for a in (0, 1]; the a = 1 boundary has empty integration range
/// and yields zeros.
IncomeConstants mn_constants(double a);

/// Ratio r = |lambda'/lambda| solving -m r^2 + n E[f] r - income = 0, using
/// the root that vanishes at income = 0 so the problem degenerates to the
/// plain risk of W. Throws infeasible_error when the discriminant is
/// negative (income target out of range).
double ratio_from_income(double income, double claim_mean,
                         const IncomeConstants& c);

/// Income generated by a given ratio, the inverse of ratio_from_income:
/// n E[f] r - m r^2.
double income_from_ratio(double ratio, double claim_mean,
                         const IncomeConstants& c);

/// Closed-form value function v(t) = (r^2/8) [1/(2t-a) - 1/(2-a)] sampled
/// at the grid nodes; v(1) = 0 by construction.
ValueFunction v_closed_form(const TypeGrid& grid, double ratio);

/// First-integral residuals of the optimality condition: for the closed
/// form, every forward-difference slope satisfies
///   sqrt(-slope_i) * 2 sqrt((2 theta_i - a)(2 theta_{i+1} - a)) = r
/// exactly, so residuals vanish iff v solves the variational problem.
/// Returns one residual per grid gap.
std::vector<double> euler_lagrange_residual(const TypeGrid& grid,
                                            const ValueFunction& v,
                                            double ratio);

struct BenchmarkSolution {
    double income = 0.0;  // optimal income level A*
    double ratio = 0.0;   // |lambda'/lambda| at A*
    IncomeConstants constants;
    ValueFunction v;
    std::vector<double> multipliers; // per-type claim multiples alpha(theta_i)
    Catalogue catalogue;
    double risk_before = 0.0;
    double risk_after = 0.0;
    bool shortcut = false; // emitted by the comonotone fast path
};

/// When the claim moves with the income in every state (comonotone), selling
/// it cannot reduce a comonotone-additive risk, so the do-nothing catalogue
/// is optimal and returned without optimizing. Empty otherwise.
std::optional<BenchmarkSolution> comonotone_shortcut(const TypeGrid& grid,
                                                     const Scenario& scenario,
                                                     const BenchmarkClaim& claim,
                                                     const RiskSpec& spec);

/// Minimize risk(W - n r(A) f) - A over the feasible income range
/// A in [0, (n E[f])^2 / (4m)] with a 512-point scan refined by golden
/// section, then assemble the value function, per-type multiples
/// alpha_i = r / (2 (2 theta_i - a)) and prices.
BenchmarkSolution solve_benchmark(const TypeGrid& grid,
                                  const Scenario& scenario,
                                  const BenchmarkClaim& claim,
                                  const RiskSpec& spec);

/// Equal-probability quantization of a normal underlying into cell
/// conditional means, with the income given as an affine map of the
/// underlying.
struct QuantizedScenario {
    Scenario scenario;
    std::vector<double> underlying;
};

QuantizedScenario quantize_normal(double mean, double stddev, int cells,
                                  double income_intercept,
                                  double income_slope);

} // namespace riskcontract
