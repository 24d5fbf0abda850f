#include "scirp/stochastics.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace scirp {

bool Gaussian::valid() const {
    return std::isfinite(mean) && std::isfinite(std) && std >= 0.0;
}

double DiscreteDistribution::mean() const {
    double m = 0.0;
    for (std::size_t k = 0; k < masses.size(); ++k) m += masses[k] * static_cast<double>(point(k));
    return m;
}

double DiscreteDistribution::total_mass() const {
    return std::accumulate(masses.begin(), masses.end(), 0.0);
}

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) {
    // erfc keeps full relative precision in the lower tail
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace {

// Acklam's rational approximation, |rel err| < 1.15e-9; refined below.
double quantile_seed(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in (0, 1)");
    double x = quantile_seed(p);
    // Halley steps on the CDF
    for (int iter = 0; iter < 3; ++iter) {
        const double err = normal_cdf(x) - p;
        const double u = err / normal_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double partial_expectation_pos(const Gaussian& g) {
    if (g.std == 0.0) return std::max(g.mean, 0.0);
    const double z = g.mean / g.std;
    return g.mean * normal_cdf(z) + g.std * normal_pdf(z);
}

Gaussian sum_independent(std::span<const Gaussian> gs) {
    if (gs.empty()) throw std::invalid_argument("sum_independent: empty list");
    double mean = 0.0, var = 0.0;
    for (const auto& g : gs) {
        mean += g.mean;
        var += g.variance();
    }
    return {mean, std::sqrt(var)};
}

DiscreteDistribution discretize(const Gaussian& g, std::int64_t step, double tail_mass) {
    if (step < 1) throw std::invalid_argument("discretize: step must be >= 1");
    if (!(tail_mass > 0.0 && tail_mass < 0.1))
        throw std::invalid_argument("discretize: tail_mass must lie in (0, 0.1)");
    const auto s = static_cast<double>(step);

    DiscreteDistribution out;
    out.step = step;
    if (g.std == 0.0) {
        // floor(x + 1/2) keeps the half-open cell convention
        out.origin = static_cast<std::int64_t>(std::floor(g.mean / s + 0.5)) * step;
        out.masses = {1.0};
        return out;
    }

    const double half_width = g.std * normal_quantile(1.0 - 0.5 * tail_mass);
    const auto k_lo = static_cast<std::int64_t>(std::floor((g.mean - half_width) / s + 0.5));
    const auto k_hi = static_cast<std::int64_t>(std::floor((g.mean + half_width) / s + 0.5));
    out.origin = k_lo * step;
    out.masses.resize(static_cast<std::size_t>(k_hi - k_lo + 1));
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const double x = static_cast<double>(k) * s;
        const double lo = (x - 0.5 * s - g.mean) / g.std;
        const double hi = (x + 0.5 * s - g.mean) / g.std;
        // difference of upper tails is more accurate above the mean
        const double m = lo > 0.0 ? normal_cdf(-lo) - normal_cdf(-hi) : normal_cdf(hi) - normal_cdf(lo);
        out.masses[static_cast<std::size_t>(k - k_lo)] = m;
    }
    const double total = out.total_mass();
    for (auto& m : out.masses) m /= total;
    return out;
}

}  // namespace scirp
