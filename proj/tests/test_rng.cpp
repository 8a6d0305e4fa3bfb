#include <cmath>
#include <vector>

#include "clsiv/rng.hpp"
#include "doctest.h"

using namespace clsiv;

TEST_CASE("substream keys are deterministic and index-sensitive") {
    CHECK(substream(42, 0) == substream(42, 0));
    CHECK(substream(42, 0) != substream(42, 1));
    CHECK(substream(42, 0) != substream(43, 0));
}

TEST_CASE("streams with equal keys produce identical sequences") {
    RngStream a(substream(7, 3));
    RngStream b(substream(7, 3));
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform01 stays strictly inside (0,1)") {
    RngStream s(123);
    for (int i = 0; i < 10000; ++i) {
        const double u = s.uniform01();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("inverse normal CDF hits reference quantiles") {
    // Reference values from the standard normal quantile function.
    CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(inverse_normal_cdf(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
    CHECK(inverse_normal_cdf(0.84134474606854293) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(inverse_normal_cdf(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-9));
    CHECK_THROWS(inverse_normal_cdf(0.0));
    CHECK_THROWS(inverse_normal_cdf(1.0));
}

TEST_CASE("normal draws have roughly standard moments") {
    RngStream s(substream(99, 0));
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s.normal();
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("uniform_below is unbiased over a small range") {
    RngStream s(substream(5, 1));
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) ++counts[s.uniform_below(7)];
    for (int c : counts) CHECK(std::abs(c - n / 7) < 500);
}
