#pragma once

// Shared generators and independent numerical helpers for the test suite.
// Everything here is deliberately simple and separate from the library
// implementation paths it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <riskcontract/scenario.hpp>

namespace testsupport {

using riskcontract::Position;
using riskcontract::Scenario;
using riskcontract::TypeGrid;
using riskcontract::ValueFunction;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Scenario random_scenario(std::mt19937_64& gen, std::size_t m,
                                double income_lo = -3.0, double income_hi = 1.0)
{
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    std::uniform_real_distribution<double> income(income_lo, income_hi);
    std::vector<double> p(m);
    double total = 0.0;
    for (double& x : p) {
        x = unit(gen);
        total += x;
    }
    for (double& x : p)
        x /= total;
    double acc = 0.0;
    for (double x : p)
        acc += x;
    p.back() += 1.0 - acc;
    Position w(m);
    for (double& x : w)
        x = income(gen);
    return Scenario::make(std::move(p), std::move(w));
}

inline Position random_position(std::mt19937_64& gen, std::size_t m,
                                double lo = -2.0, double hi = 2.0)
{
    std::uniform_real_distribution<double> d(lo, hi);
    Position y(m);
    for (double& x : y)
        x = d(gen);
    return y;
}

/// Zero-mean, exactly target-variance position under the scenario.
inline Position shaped_position(std::mt19937_64& gen, const Scenario& scenario,
                                double target_variance)
{
    const std::size_t m = scenario.size();
    Position y;
    double var = 0.0;
    do {
        y = random_position(gen, m);
        const double mean = scenario.mean(y);
        for (double& x : y)
            x -= mean;
        var = scenario.variance(y);
    } while (var < 1e-8);
    const double scale = std::sqrt(target_variance / var);
    for (double& x : y)
        x *= scale;
    return y;
}

inline TypeGrid random_grid(std::mt19937_64& gen, std::size_t n,
                            bool unit_weights = false)
{
    std::uniform_real_distribution<double> alo(0.2, 0.7);
    std::uniform_real_distribution<double> wdist(0.1, 1.0);
    const double a = alo(gen);
    std::vector<double> thetas(n);
    for (std::size_t i = 0; i < n; ++i)
        thetas[i] = (n == 1) ? a : a + (1.0 - a) * double(i) / double(n - 1);
    std::vector<double> weights(n, 1.0);
    if (!unit_weights)
        for (double& w : weights)
            w = wdist(gen);
    return TypeGrid::make(a, std::move(thetas), std::move(weights));
}

/// Valid class member: convex, non-increasing, nonnegative; top value zero
/// when `top_zero`.
inline ValueFunction random_value_function(std::mt19937_64& gen,
                                           const TypeGrid& grid,
                                           bool top_zero = true)
{
    const std::size_t n = grid.size();
    std::uniform_real_distribution<double> sdist(0.0, 2.0);
    std::vector<double> drops(n > 0 ? n - 1 : 0);
    for (double& d : drops)
        d = sdist(gen);
    // Non-decreasing slopes: sort the negated slope magnitudes descending.
    std::sort(drops.begin(), drops.end(), std::greater<double>());
    ValueFunction v;
    v.values.assign(n, 0.0);
    if (!top_zero) {
        std::uniform_real_distribution<double> base(0.0, 0.5);
        v.values[n - 1] = base(gen);
    }
    for (std::size_t i = n - 1; i-- > 0;)
        v.values[i] = v.values[i + 1] + drops[i] * grid.gap(i);
    return v;
}

/// Fixed-order composite Gauss-Legendre quadrature, independent of the
/// library's adaptive scheme.
inline double gauss_legendre(const std::function<double(double)>& f, double a,
                             double b, int panels = 64)
{
    static const double xs[4] = {0.3399810435848563, 0.8611363115940526,
                                 -0.3399810435848563, -0.8611363115940526};
    static const double ws[4] = {0.6521451548625461, 0.3478548451374538,
                                 0.6521451548625461, 0.3478548451374538};
    double total = 0.0;
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
        const double mid = a + (k + 0.5) * h;
        for (int j = 0; j < 4; ++j)
            total += 0.5 * h * ws[j] * f(mid + 0.5 * h * xs[j]);
    }
    return total;
}

} // namespace testsupport
