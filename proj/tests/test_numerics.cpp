#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "qkdsec/error.hpp"
#include "qkdsec/numerics.hpp"

using namespace qkdsec;
using doctest::Approx;

TEST_CASE("binary entropy: endpoints, maximum, symmetry") {
    CHECK(num::binary_entropy(0.0) == 0.0);
    CHECK(num::binary_entropy(1.0) == 0.0);
    CHECK(num::binary_entropy(0.5) == 1.0);
    for (double p : {0.01, 0.075, 0.3, 0.49}) {
        // 1.0 - p perturbs the argument by up to half an ulp, so the two
        // evaluations may differ in the last couple of bits.
        CHECK(std::abs(num::binary_entropy(p) - num::binary_entropy(1.0 - p)) < 1e-14);
    }
    CHECK_THROWS_AS(num::binary_entropy(-0.1), domain_error);
    CHECK_THROWS_AS(num::binary_entropy(1.1), domain_error);
}

TEST_CASE("binary entropy: reference values") {
    CHECK(num::binary_entropy(0.075) == Approx(0.38431154412649709).epsilon(1e-14));
    CHECK(num::binary_entropy(0.1) == Approx(0.46899559358928122).epsilon(1e-14));
    CHECK(num::binary_entropy(0.2) == Approx(0.72192809488736235).epsilon(1e-14));
    CHECK(num::binary_entropy(0.05) == Approx(0.28639695711595613).epsilon(1e-14));
    CHECK(num::binary_entropy(0.06) == Approx(0.3274449191544762).epsilon(1e-14));
}

TEST_CASE("clipped entropy saturates at one half") {
    CHECK(num::clipped_entropy(0.0) == 0.0);
    CHECK(num::clipped_entropy(0.5) == 1.0);
    CHECK(num::clipped_entropy(0.7) == 1.0);
    CHECK(num::clipped_entropy(123.0) == 1.0);
    CHECK(num::clipped_entropy(0.2) == num::binary_entropy(0.2));
    CHECK_THROWS_AS(num::clipped_entropy(-1e-9), domain_error);
}

TEST_CASE("eta adds a linear ramp to the clipped entropy") {
    CHECK(num::eta(0, 0.3) == num::clipped_entropy(0.3));
    CHECK(num::eta(10, 0.1) == Approx(1.4689955935892812).epsilon(1e-14));
    CHECK(num::eta(1, 0.5) == 1.5);
    CHECK(num::eta(3, 2.0) == Approx(7.0).epsilon(1e-14)); // saturated entropy + 3*2
    CHECK_THROWS_AS(num::eta(-1, 0.1), domain_error);
}

TEST_CASE("Bernoulli KL divergence") {
    CHECK(num::kl_bernoulli(0.5, 0.25) == Approx(0.20751874963942191).epsilon(1e-14));
    CHECK(num::kl_bernoulli(0.3, 0.3) == 0.0);
    // Nonnegative, zero only on the diagonal.
    for (double p : {0.1, 0.4, 0.9}) {
        for (double q : {0.2, 0.5, 0.8}) {
            const double d = num::kl_bernoulli(p, q);
            if (p == q)
                CHECK(d == 0.0);
            else
                CHECK(d > 0.0);
        }
    }
    // Degenerate q admits only the matching degenerate p.
    CHECK(num::kl_bernoulli(0.0, 0.0) == 0.0);
    CHECK(num::kl_bernoulli(1.0, 1.0) == 0.0);
    CHECK_THROWS_AS(num::kl_bernoulli(0.5, 0.0), domain_error);
    CHECK_THROWS_AS(num::kl_bernoulli(0.5, 1.0), domain_error);
}

TEST_CASE("shannon entropy in bits") {
    const std::vector<double> uniform4 = {0.25, 0.25, 0.25, 0.25};
    CHECK(num::shannon_entropy(uniform4) == Approx(2.0).epsilon(1e-14));
    const std::vector<double> point = {1.0, 0.0, 0.0};
    CHECK(num::shannon_entropy(point) == 0.0);
    const std::vector<double> biased = {0.5, 0.5};
    CHECK(num::shannon_entropy(biased) == 1.0);
}

TEST_CASE("LogWeight arithmetic stays in log space") {
    using num::LogWeight;
    const auto half = LogWeight::from_log2(-1.0);
    const auto quarter = half * half;
    CHECK(quarter.log2() == -2.0);
    CHECK((quarter / half).log2() == -1.0);
    CHECK((half + half).value() == Approx(1.0).epsilon(1e-14));
    CHECK(LogWeight::zero().is_zero());
    CHECK((LogWeight::zero() * half).is_zero());
    CHECK((LogWeight::zero() + half).log2() == -1.0);
    CHECK_THROWS_AS(half / LogWeight::zero(), domain_error);
    CHECK_THROWS_AS(LogWeight::from_value(-1.0), domain_error);
    CHECK(LogWeight::from_value(0.0).is_zero());
    // Tiny masses survive where plain doubles would underflow.
    const auto tiny = LogWeight::from_log2(-40000.0);
    CHECK((tiny * tiny).log2() == -80000.0);
}

TEST_CASE("log2 binomial coefficients") {
    CHECK(num::log2_binomial(4, 2).log2() == Approx(2.5849625007211562).epsilon(1e-14));
    CHECK(num::log2_binomial(10, 0).log2() == 0.0);
    CHECK(num::log2_binomial(10, 10).log2() == 0.0);
    CHECK(num::log2_binomial(10, 11).is_zero());
    CHECK(num::log2_binomial(10, -1).is_zero());
    // Large arguments stay accurate to ~1e-12 relative.
    CHECK(num::log2_binomial(100000, 7500).log2() == Approx(38423.448548382042).epsilon(1e-11));
}

TEST_CASE("Pascal identity holds in LogWeight arithmetic") {
    for (std::int64_t n : {5, 30, 200}) {
        for (std::int64_t k = 1; k < n; k += (n > 10 ? 7 : 1)) {
            const auto lhs = num::log2_binomial(n, k);
            const auto rhs = num::log2_binomial(n - 1, k - 1) + num::log2_binomial(n - 1, k);
            CHECK(lhs.log2() == Approx(rhs.log2()).epsilon(1e-12));
        }
    }
}

TEST_CASE("hypergeometric pmf: reference value and support") {
    CHECK(num::hypergeom_pmf(75, 10000, 1000, 825) ==
          Approx(0.050178192799412734).epsilon(1e-10));
    // Outside the support the mass is exactly zero.
    CHECK(num::hypergeom_pmf(-1, 100, 30, 10) == 0.0);
    CHECK(num::hypergeom_pmf(31, 100, 30, 40) == 0.0);  // more than the sample holds
    CHECK(num::hypergeom_pmf(5, 100, 30, 3) == 0.0);    // more than the population holds
    CHECK(num::hypergeom_pmf(9, 100, 30, 110) == 0.0);  // j - k exceeds the remainder
    CHECK(num::hypergeom_pmf(10, 100, 30, 110) > 0.0);  // boundary: j - k == n
}

TEST_CASE("hypergeometric pmf: rows sum to one") {
    for (std::int64_t j : {0, 1, 17, 65, 130}) {
        double total = 0.0;
        for (std::int64_t k = 0; k <= 30; ++k) total += num::hypergeom_pmf(k, 100, 30, j);
        CHECK(total == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("hypergeometric pmf: degenerate sample sizes") {
    CHECK(num::hypergeom_pmf(0, 5, 3, 0) == 1.0);
    CHECK(num::hypergeom_pmf(3, 5, 3, 8) == 1.0); // whole population flipped
}

TEST_CASE("gaussian cdf: reference values and symmetry") {
    CHECK(num::gauss_cdf(0.0) == 0.5);
    CHECK(num::gauss_cdf(-3.10) == Approx(0.00096760321321835689).epsilon(1e-13));
    CHECK(num::gauss_cdf(-1.1446) == Approx(0.12618744615053614).epsilon(1e-13));
    for (double x : {0.3, 1.0, 2.5, 6.0}) {
        CHECK(num::gauss_cdf(x) + num::gauss_cdf(-x) == Approx(1.0).epsilon(1e-14));
    }
    // Deep tails stay positive and ordered as long as the value is
    // representable at all (the mass at -40 is below the subnormal range).
    CHECK(num::gauss_cdf(-37.0) > 0.0);
    CHECK(num::gauss_cdf(-37.0) < num::gauss_cdf(-36.0));
}

TEST_CASE("gaussian quantile: reference value and round trip") {
    CHECK(num::gauss_quantile(0.001) == Approx(-3.0902323061678135).epsilon(1e-13));
    CHECK(num::gauss_quantile(0.5) == 0.0);
    for (double eps : {1e-12, 1e-6, 0.0228, 0.3, 0.7, 0.999}) {
        CHECK(num::gauss_cdf(num::gauss_quantile(eps)) == Approx(eps).epsilon(1e-12));
    }
    CHECK_THROWS_AS(num::gauss_quantile(0.0), domain_error);
    CHECK_THROWS_AS(num::gauss_quantile(1.0), domain_error);
}
