#include "riskcontract/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <stdexcept>

#include "riskcontract/errors.hpp"

namespace riskcontract::num {

double mean(const std::vector<double>& p, const std::vector<double>& x)
{
    if (p.size() != x.size())
        throw shape_error("mean: probability and value vectors differ in length");
    double acc = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j)
        acc += p[j] * x[j];
    return acc;
}

double variance(const std::vector<double>& p, const std::vector<double>& x)
{
    const double m = mean(p, x);
    double acc = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double d = x[j] - m;
        acc += p[j] * d * d;
    }
    return acc;
}

double covariance(const std::vector<double>& p, const std::vector<double>& x,
                  const std::vector<double>& y)
{
    if (x.size() != y.size())
        throw shape_error("covariance: value vectors differ in length");
    const double mx = mean(p, x);
    const double my = mean(p, y);
    double acc = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j)
        acc += p[j] * (x[j] - mx) * (y[j] - my);
    return acc;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol)
{
    if (a == b)
        return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const double value =
        gauss_kronrod<double, 31>::integrate(f, a, b, 15, abs_tol, &err);
    return value;
}

double golden_section_min(const std::function<double(double)>& f, double lo,
                          double hi, double interval_tol)
{
    if (!(lo <= hi))
        throw validation_error("golden_section_min: empty bracket");
    constexpr double inv_phi = 0.6180339887498949; // 1/phi
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > interval_tol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

double bisect_increasing(const std::function<double(double)>& f, double lo,
                         double hi, double x_tol)
{
    double flo = f(lo);
    double fhi = f(hi);
    if (flo > 0.0 || fhi < 0.0)
        throw infeasible_error("bisect_increasing: root not bracketed");
    if (flo == 0.0)
        return lo; // smallest root wins
    while (hi - lo > x_tol) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) >= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double normal_pdf(double x)
{
    static const double inv_sqrt_2pi = 0.3989422804014327;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw validation_error("normal_quantile: p must lie in (0,1)");
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

} // namespace riskcontract::num
