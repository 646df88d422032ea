#include "riskcontract/scenario.hpp"

#include <cmath>
#include <numeric>

#include "riskcontract/errors.hpp"
#include "riskcontract/numerics.hpp"

namespace riskcontract {

Scenario Scenario::make(std::vector<double> probs, Position income,
                        std::vector<std::string> labels)
{
    Scenario s;
    s.probs = std::move(probs);
    s.income = std::move(income);
    if (labels.empty()) {
        labels.reserve(s.probs.size());
        for (std::size_t j = 0; j < s.probs.size(); ++j)
            labels.push_back("s" + std::to_string(j + 1));
    }
    s.states = std::move(labels);
    s.validate();
    return s;
}

void Scenario::validate() const
{
    if (probs.empty())
        throw validation_error("scenario: needs at least one state");
    if (income.size() != probs.size() || states.size() != probs.size())
        throw shape_error("scenario: states, probs and income lengths differ");
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0))
            throw validation_error("scenario: probabilities must be nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw validation_error("scenario: probabilities must sum to 1");
    for (double w : income)
        if (!std::isfinite(w))
            throw validation_error("scenario: income entries must be finite");
}

void Scenario::check_position(const Position& position) const
{
    if (position.size() != probs.size())
        throw shape_error("position length does not match scenario");
    for (double x : position)
        if (!std::isfinite(x))
            throw validation_error("position entries must be finite");
}

double Scenario::mean(const Position& position) const
{
    check_position(position);
    return num::mean(probs, position);
}

double Scenario::variance(const Position& position) const
{
    check_position(position);
    return num::variance(probs, position);
}

double Scenario::covariance(const Position& x, const Position& y) const
{
    check_position(x);
    check_position(y);
    return num::covariance(probs, x, y);
}

TypeGrid TypeGrid::make(double a, std::vector<double> thetas,
                        std::vector<double> weights)
{
    TypeGrid g;
    g.a = a;
    g.thetas = std::move(thetas);
    g.weights = std::move(weights);
    g.validate();
    return g;
}

TypeGrid TypeGrid::uniform(double a, std::size_t n, double node_weight)
{
    std::vector<double> thetas(n);
    for (std::size_t i = 0; i < n; ++i)
        thetas[i] = (n == 1) ? a : a + (1.0 - a) * double(i) / double(n - 1);
    return make(a, std::move(thetas), std::vector<double>(n, node_weight));
}

void TypeGrid::validate() const
{
    if (!(a > 0.0))
        throw validation_error("type grid: lower bound a must be positive");
    if (thetas.empty())
        throw validation_error("type grid: needs at least one type");
    if (weights.size() != thetas.size())
        throw shape_error("type grid: weights and thetas lengths differ");
    if (std::abs(thetas.front() - a) > 1e-12)
        throw validation_error("type grid: first type must equal the lower bound a");
    if (thetas.back() > 1.0 + 1e-12)
        throw validation_error("type grid: types must stay within (0, 1]");
    for (std::size_t i = 0; i + 1 < thetas.size(); ++i)
        if (!(thetas[i] < thetas[i + 1]))
            throw validation_error("type grid: types must be strictly increasing");
    for (double w : weights)
        if (!(w >= 0.0))
            throw validation_error("type grid: weights must be nonnegative");
}

std::vector<double> ValueFunction::slopes(const TypeGrid& grid) const
{
    const std::size_t n = values.size();
    if (n != grid.size())
        throw shape_error("value function length does not match type grid");
    std::vector<double> s(n, 0.0);
    if (n < 2)
        return s;
    for (std::size_t i = 0; i + 1 < n; ++i)
        s[i] = (values[i + 1] - values[i]) / grid.gap(i);
    s[n - 1] = s[n - 2]; // backward difference at the top type
    return s;
}

std::vector<std::string> ValueFunction::violations(const TypeGrid& grid,
                                                   double tol,
                                                   bool require_top_zero) const
{
    std::vector<std::string> out;
    if (values.size() != grid.size()) {
        out.push_back("length does not match type grid");
        return out;
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            out.push_back("v[" + std::to_string(i + 1) + "] is not finite");
            return out;
        }
        if (values[i] < -tol)
            out.push_back("v[" + std::to_string(i + 1) + "] is negative");
    }
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
        if (values[i + 1] - values[i] > tol)
            out.push_back("v increases between " + std::to_string(i + 1) +
                          " and " + std::to_string(i + 2));
    if (values.size() >= 3) {
        for (std::size_t i = 0; i + 2 < values.size(); ++i) {
            const double s0 = (values[i + 1] - values[i]) / grid.gap(i);
            const double s1 = (values[i + 2] - values[i + 1]) / grid.gap(i + 1);
            if (s1 - s0 < -tol)
                out.push_back("slope decreases at node " + std::to_string(i + 2));
        }
    }
    if (require_top_zero && !values.empty() && std::abs(values.back()) > tol)
        out.push_back("v at the top type is not zero");
    return out;
}

} // namespace riskcontract
