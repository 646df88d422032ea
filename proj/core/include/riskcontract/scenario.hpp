#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace riskcontract {

/// A contingent claim given by its payoff per state. Payoffs are in the same
/// currency unit as the principal's income.
using Position = std::vector<double>;

/// Finite state space: per-state probabilities and the principal's income
/// realizations W. Probabilities are nonnegative and sum to one (1e-12).
struct Scenario {
    std::vector<std::string> states;
    std::vector<double> probs;
    Position income;

    /// Validating factory. Labels may be omitted; they default to s1, s2, ...
    static Scenario make(std::vector<double> probs, Position income,
                         std::vector<std::string> labels = {});

    std::size_t size() const { return probs.size(); }

    /// Throws validation_error / shape_error when an invariant is broken.
    void validate() const;

    /// Throws shape_error unless `position` has one payoff per state.
    void check_position(const Position& position) const;

    double mean(const Position& position) const;
    double variance(const Position& position) const;
    double covariance(const Position& x, const Position& y) const;
};

/// Risk-aversion grid: theta_1 = a < ... < theta_n <= 1 together with the
/// discretized density masses of the type distribution.
struct TypeGrid {
    double a = 0.0;
    std::vector<double> thetas;
    std::vector<double> weights;

    static TypeGrid make(double a, std::vector<double> thetas,
                         std::vector<double> weights);

    /// Uniform grid on [a, 1] with the given per-node weights repeated.
    static TypeGrid uniform(double a, std::size_t n, double node_weight);

    std::size_t size() const { return thetas.size(); }
    double gap(std::size_t i) const { return thetas[i + 1] - thetas[i]; }
    void validate() const;
};

/// Discretized agent net utility v on a type grid. Construction does not
/// validate: invalid candidates are representable so that checks can report
/// on them. Use violations()/is_valid() before relying on the shape.
struct ValueFunction {
    std::vector<double> values;

    ValueFunction() = default;
    explicit ValueFunction(std::vector<double> v) : values(std::move(v)) {}

    std::size_t size() const { return values.size(); }

    /// Finite-difference slopes: forward differences for i < n-1 and the
    /// final backward slope repeated at the top index. A single-node grid
    /// has slope zero.
    std::vector<double> slopes(const TypeGrid& grid) const;

    /// Human-readable invariant violations: non-negativity, monotone
    /// non-increase, discrete convexity (each to `tol`), and v_n = 0 when
    /// `require_top_zero` is set.
    std::vector<std::string> violations(const TypeGrid& grid, double tol = 1e-9,
                                        bool require_top_zero = false) const;

    bool is_valid(const TypeGrid& grid, double tol = 1e-9,
                  bool require_top_zero = false) const
    {
        return violations(grid, tol, require_top_zero).empty();
    }
};

} // namespace riskcontract
