#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "riskcontract/scenario.hpp"

namespace riskcontract {

/// Maximizing density weights q of the dual problem, one per state.
/// Feasible weights satisfy 0 <= q_j <= cap and sum_j p_j q_j = 1.
struct DualWeights {
    std::vector<double> q;
};

/// Which coherent, law-invariant risk measure to use.
///
/// The primitive is the capped dual form: risk(Y) = sup { -E_q[Y] } over all
/// densities q with p.q = 1 and 0 <= q <= cap. The tail-average form of
/// level lambda is the special case cap = 1/lambda; a mixture combines
/// tail averages across levels with fixed nonnegative weights summing to 1.
struct RiskSpec {
    enum class Kind { avar_level, avar_cap, mixture };

    Kind kind = Kind::avar_level;
    double level = 1.0;                              // avar_level
    double cap = 1.0;                                // avar_cap
    std::vector<std::pair<double, double>> mixture;  // (weight, level)

    static RiskSpec make_level(double level);
    static RiskSpec make_cap(double cap);
    static RiskSpec make_mixture(std::vector<std::pair<double, double>> parts);

    void validate() const;
};

/// Tail-average risk at the given level in (0, 1]: the probability-weighted
/// average of the worst `level` tail of the position, negated so that losses
/// report as positive risk. The atom straddling the tail boundary is split
/// exactly; payoff ties break by state index.
///
/// level = 1 reduces to -E[Y].
double avar_quantile(const Scenario& scenario, const Position& position,
                     double level);

struct DualRisk {
    double risk = 0.0;
    DualWeights weights;
};

/// Exact solution of sup { -E_q[Y] : p.q = 1, 0 <= q <= cap } by the greedy
/// tail rule: states sorted by payoff ascending receive weight `cap` until
/// the probability budget is spent, a fractional weight on the marginal
/// state, zero afterwards. cap < 1 makes the budget infeasible and throws.
DualRisk avar_dual(const Scenario& scenario, const Position& position,
                   double cap);

/// Weighted combination of tail averages for a mixture spec.
double mixture_risk(const Scenario& scenario, const Position& position,
                    const RiskSpec& spec);

/// Evaluate whichever risk measure the spec describes.
double risk_value(const RiskSpec& spec, const Scenario& scenario,
                  const Position& position);

/// True iff (x_j - x_k)(y_j - y_k) >= 0 for every state pair: the payoffs
/// never move in opposite directions.
bool comonotone_check(const Position& x, const Position& y);

struct AxiomResult {
    std::string axiom;
    int trials = 0;
    int violations = 0;
    double worst = 0.0;    // largest violation magnitude observed
    std::string witness;   // description of the worst offending sample
    bool passed() const { return violations == 0; }
};

struct CoherenceReport {
    std::vector<AxiomResult> axioms;
    bool all_passed() const;
};

/// Randomized verification of the coherence axioms (monotonicity, cash
/// invariance, convexity, positive homogeneity), the lower bound
/// risk(Y) >= -E[Y], comonotone additivity, and monotonicity of the tail
/// average in its level. Violations beyond 1e-9 are reported with a witness.
CoherenceReport coherence_suite(const RiskSpec& spec, const Scenario& scenario,
                                int samples, std::uint64_t seed = 91);

} // namespace riskcontract
