#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace scirp {

/// Normal law N(mean, std^2). A zero std denotes a point mass.
struct Gaussian {
    double mean = 0.0;
    double std = 0.0;

    double variance() const { return std * std; }
    bool valid() const;
};

/// Probability mass function on the lattice origin + k * step.
struct DiscreteDistribution {
    std::int64_t origin = 0;
    std::int64_t step = 1;
    std::vector<double> masses;

    std::size_t size() const { return masses.size(); }
    std::int64_t point(std::size_t k) const { return origin + static_cast<std::int64_t>(k) * step; }
    std::int64_t min_support() const { return origin; }
    std::int64_t max_support() const { return point(masses.size() - 1); }
    double mean() const;
    double total_mass() const;
};

double normal_pdf(double x);
double normal_cdf(double x);

/// Inverse of normal_cdf. Throws std::domain_error unless 0 < p < 1.
double normal_quantile(double p);

/// E[max(X, 0)] for X ~ g.
double partial_expectation_pos(const Gaussian& g);

/// Law of the sum of independent normals. Throws on an empty list.
Gaussian sum_independent(std::span<const Gaussian> gs);

/// Lattice approximation of g. Grid point k carries the probability of the
/// half-open cell [k - step/2, k + step/2); the support covers the central
/// 1 - tail_mass of g and the masses are renormalized to sum to one.
DiscreteDistribution discretize(const Gaussian& g, std::int64_t step, double tail_mass);

}  // namespace scirp
