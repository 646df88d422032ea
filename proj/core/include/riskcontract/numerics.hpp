#pragma once

#include <functional>
#include <vector>

namespace riskcontract::num {

/// Probability-weighted first moment. `p` and `x` must have equal length.
double mean(const std::vector<double>& p, const std::vector<double>& x);

/// Probability-weighted variance, E[x^2] - E[x]^2.
double variance(const std::vector<double>& p, const std::vector<double>& x);

/// Probability-weighted covariance.
double covariance(const std::vector<double>& p, const std::vector<double>& x,
                  const std::vector<double>& y);

/// Adaptive quadrature of `f` over [a, b] to the given absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol);

/// Golden-section minimizer on [lo, hi]; shrinks the bracket until its width
/// is below `interval_tol` and returns the midpoint. The caller is expected
/// to pass a bracket around a local minimum.
double golden_section_min(const std::function<double(double)>& f, double lo,
                          double hi, double interval_tol);

/// Root of a continuous, non-decreasing function on [lo, hi] by bisection.
/// Requires f(lo) <= 0 <= f(hi); ties break toward `lo`.
double bisect_increasing(const std::function<double(double)>& f, double lo,
                         double hi, double x_tol);

double normal_pdf(double x);
double normal_cdf(double x);
/// Inverse standard normal CDF for p in (0, 1).
double normal_quantile(double p);

} // namespace riskcontract::num
