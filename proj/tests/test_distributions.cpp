#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "homeodyn/distributions.hpp"
#include "homeodyn/rng.hpp"

using namespace homeodyn;

namespace {
constexpr double pi = 3.14159265358979323846;
}

TEST_CASE("uniform draws live in (0,1] and are seed-reproducible") {
    Rng a(42), b(42), c(43);
    bool all_in_range = true;
    bool any_mismatch = false;
    for (int i = 0; i < 10000; ++i) {
        const double u = a.next_unit();
        all_in_range = all_in_range && u > 0.0 && u <= 1.0;
        if (u != b.next_unit()) any_mismatch = true;
    }
    CHECK(all_in_range);
    CHECK_FALSE(any_mismatch);
    // different seed, different stream
    Rng a2(42);
    int diff = 0;
    for (int i = 0; i < 100; ++i) diff += a2.next_u64() != c.next_u64();
    CHECK(diff > 90);
}

TEST_CASE("normal sampler matches first and second moments") {
    Rng rng(7);
    const int n = 200000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = sample_normal(1.5, 2.0, rng);
        s1 += x;
        s2 += x * x;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    // SE(mean) = 2/sqrt(n) ~ 0.0045
    CHECK(std::abs(mean - 1.5) < 0.02);
    CHECK(std::abs(var - 4.0) < 0.1);
    // sigma = 0 collapses to the constant
    CHECK(sample_normal(3.25, 0.0, rng) == 3.25);
}

TEST_CASE("normal cdf: symmetry, tails, known quantile") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    for (double x : {-3.0, -1.0, -0.1, 0.4, 2.7}) {
        CHECK(normal_cdf(x) + normal_survival(x) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(normal_cdf(-x) == doctest::Approx(normal_survival(x)).epsilon(1e-13));
    }
    CHECK(normal_cdf(-40.0) == 0.0);
    CHECK(normal_cdf(40.0) == 1.0);
}

TEST_CASE("half-normal mean is sqrt(2/pi) sigma to 1e-12") {
    for (double sigma : {0.04, 1.0, 17.5}) {
        const auto m = folded_normal_moments(0.0, sigma);
        CHECK(std::abs(m.mean - std::sqrt(2.0 / pi) * sigma) <= 1e-12 * sigma);
    }
}

TEST_CASE("folded moments against Monte-Carlo within 3 standard errors") {
    // the closed form and the sampler are independent routes to the same
    // distribution, so a big sample pins both
    const std::pair<double, double> cases[] = {{0.0, 1.0}, {0.07, 0.04}, {0.2, 0.04}};
    const int n = 1000000;
    Rng rng(123456);
    for (const auto& [mu, sigma] : cases) {
        double s1 = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = sample_folded_normal(mu, sigma, rng);
            CHECK(x >= 0.0);
            s1 += x;
            s2 += x * x;
        }
        const double mc_mean = s1 / n;
        const double mc_var = s2 / n - mc_mean * mc_mean;
        const auto ex = folded_normal_moments(mu, sigma);
        const double se_mean = ex.sigma / std::sqrt(double(n));
        REQUIRE(std::abs(mc_mean - ex.mean) < 3.0 * se_mean);
        // var of the sample variance ~ (m4 - var^2)/n; bound it loosely via
        // normal kurtosis (m4 <= 3 sigma^4 + ...) with a 5x safety factor
        const double se_var = ex.sigma * ex.sigma * std::sqrt(2.0 / n);
        CHECK(std::abs(mc_var - ex.sigma * ex.sigma) < 5.0 * se_var);
    }
}

TEST_CASE("folded moments: large mean/sigma limit matches the plain normal") {
    // when mean >> sigma the fold is irrelevant
    const auto m = folded_normal_moments(10.0, 0.5);
    CHECK(m.mean == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(m.sigma == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("folded cdf is a proper cdf and matches the sampler") {
    const double mu = 0.07, sigma = 0.04;
    CHECK(folded_normal_cdf(-1e-9, mu, sigma) == 0.0);
    CHECK(folded_normal_cdf(0.0, mu, sigma) == 0.0);
    CHECK(folded_normal_cdf(1e9, mu, sigma) == doctest::Approx(1.0).epsilon(1e-12));
    double prev = 0.0;
    for (double x = 0.0; x <= 0.4; x += 0.01) {
        const double f = folded_normal_cdf(x, mu, sigma);
        CHECK(f >= prev);
        prev = f;
    }

    // two-sided Kolmogorov-Smirnov at alpha ~ 1e-3: D_crit = 1.949/sqrt(n)
    const int n = 100000;
    std::vector<double> xs(n);
    Rng rng(2024);
    for (auto& x : xs) x = sample_folded_normal(mu, sigma, rng);
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = folded_normal_cdf(xs[i], mu, sigma);
        d = std::max(d, std::abs(f - double(i + 1) / n));
        d = std::max(d, std::abs(f - double(i) / n));
    }
    CHECK(d < 1.949 / std::sqrt(double(n)));
}

TEST_CASE("box-muller spare keeps streams aligned across call patterns") {
    // drawing 2k normals equals drawing k pairs: the cache is internal state,
    // not hidden nondeterminism
    Rng a(99), b(99);
    std::vector<double> xs, ys;
    for (int i = 0; i < 10; ++i) xs.push_back(a.next_normal());
    for (int i = 0; i < 5; ++i) {
        ys.push_back(b.next_normal());
        ys.push_back(b.next_normal());
    }
    CHECK(xs == ys);
}
