#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "scirp/stochastics.hpp"

using namespace scirp;

namespace {

double pdf_oracle(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

template <class F>
double simpson(F f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

double cdf_oracle(double x) { return 0.5 + simpson(pdf_oracle, 0.0, x); }

// E[max(X,0)] by quadrature of x * density over the positive half line
double partial_oracle(const Gaussian& g) {
    const double hi = g.mean + 12.0 * g.std;
    if (hi <= 0) return 0.0;
    const double lo = std::max(0.0, g.mean - 12.0 * g.std);
    return simpson([&](double x) { return x * pdf_oracle((x - g.mean) / g.std) / g.std; }, lo, hi, 40000);
}

}  // namespace

TEST_CASE("normal cdf against quadrature and known points") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(-1.0) == doctest::Approx(0.15865525393145705).epsilon(1e-12));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    for (double x : {-5.0, -2.5, -0.3, 0.7, 1.6448536269514722, 3.2, 6.0})
        CHECK(normal_cdf(x) == doctest::Approx(cdf_oracle(x)).epsilon(1e-10));
    CHECK(normal_pdf(0.4) == doctest::Approx(pdf_oracle(0.4)));
}

TEST_CASE("normal quantile inverts the cdf") {
    CHECK(normal_quantile(0.95) == doctest::Approx(1.6448536269514722).epsilon(1e-12));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(1e-9, 1.0 - 1e-9);
    for (int i = 0; i < 1000; ++i) {
        const double p = u(rng);
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
    }
    CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(-0.2), std::domain_error);
}

TEST_CASE("partial expectation matches quadrature") {
    for (auto g : {Gaussian{0, 1}, Gaussian{-110.79, 79.06}, Gaussian{500, 75}, Gaussian{-400, 60}, Gaussian{3, 20}})
        CHECK(partial_expectation_pos(g) == doctest::Approx(partial_oracle(g)).epsilon(1e-8));
    CHECK(partial_expectation_pos({0, 1}) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
    CHECK(partial_expectation_pos({7.5, 0}) == 7.5);
    CHECK(partial_expectation_pos({-7.5, 0}) == 0.0);
}

TEST_CASE("partial expectation parity: E[X+] - E[(-X)+] = mean") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> mean(-2000, 2000), sd(0.01, 500);
    for (int i = 0; i < 1000; ++i) {
        const Gaussian g{mean(rng), sd(rng)};
        const double lhs = partial_expectation_pos(g) - partial_expectation_pos({-g.mean, g.std});
        CHECK(lhs == doctest::Approx(g.mean).epsilon(1e-9).scale(g.std));
        CHECK(partial_expectation_pos(g) >= std::max(g.mean, 0.0) - 1e-9);
    }
}

TEST_CASE("sum of independent normals") {
    const std::vector<Gaussian> gs{{100, 25}, {250, 50}, {-850, 120}};
    const Gaussian s = sum_independent(gs);
    CHECK(s.mean == doctest::Approx(-500));
    CHECK(s.variance() == doctest::Approx(625 + 2500 + 14400));
    CHECK_THROWS_AS(sum_independent(std::vector<Gaussian>{}), std::invalid_argument);
}

TEST_CASE("discretize conserves mass and mean") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> mean(-3000, 3000), sd(1, 400);
    for (int i = 0; i < 200; ++i) {
        const Gaussian g{mean(rng), sd(rng)};
        for (std::int64_t step : {1, 2, 5, 10}) {
            const auto d = discretize(g, step, 1e-6);
            CHECK(d.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(d.origin % step == 0);
            // cells narrower than the spread barely move the mean; wide cells move it by at most half a cell
            const double bound = step <= g.std ? 0.01 * g.std : 0.5 * step + 1e-9;
            CHECK(std::abs(d.mean() - g.mean) <= bound);
            for (double m : d.masses) CHECK(m >= 0.0);
            CHECK(d.min_support() <= g.mean - 4.5 * g.std + step);
            CHECK(d.max_support() >= g.mean + 4.5 * g.std - step);
        }
    }
}

TEST_CASE("discretize cell masses follow the cdf") {
    const Gaussian g{12.0, 10.0};
    const auto d = discretize(g, 5, 1e-6);
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double x = static_cast<double>(d.point(k));
        const double raw = cdf_oracle((x + 2.5 - 12.0) / 10.0) - cdf_oracle((x - 2.5 - 12.0) / 10.0);
        CHECK(d.masses[k] == doctest::Approx(raw).epsilon(1e-5));
    }
}

TEST_CASE("discretize point mass and argument errors") {
    const auto d = discretize({12.4, 0.0}, 5, 1e-6);
    REQUIRE(d.size() == 1);
    CHECK(d.origin == 10);
    CHECK(discretize({12.5, 0.0}, 5, 1e-6).origin == 15);
    CHECK(discretize({-12.5, 0.0}, 5, 1e-6).origin == -10);
    CHECK_THROWS_AS(discretize({0, 1}, 0, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(discretize({0, 1}, 5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(discretize({0, 1}, 5, 0.5), std::invalid_argument);
}
