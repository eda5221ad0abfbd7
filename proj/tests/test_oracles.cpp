#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "qkdsec/error.hpp"
#include "qkdsec/gf2.hpp"
#include "qkdsec/numerics.hpp"
#include "qkdsec/oracles.hpp"
#include "qkdsec/rng.hpp"

using namespace qkdsec;
using doctest::Approx;

namespace {

// Gaussian binomial [d, s]_2 by the product formula; the independent
// reference for count_extensions at sizes where int64 cannot overflow.
std::int64_t gaussian_binomial(std::int64_t d, std::int64_t s) {
    __int128 num = 1, den = 1;
    for (std::int64_t i = 0; i < s; ++i) {
        num *= (__int128{1} << (d - i)) - 1;
        den *= (__int128{1} << (i + 1)) - 1;
    }
    return static_cast<std::int64_t>(num / den);
}

} // namespace

TEST_CASE("PauliDistribution: joint table validation and indexing") {
    std::vector<double> joint = {0.24, 0.06, 0.56, 0.14}; // n = 1: index (x<<1)|z
    const auto p = audit::PauliDistribution::from_joint(1, joint);
    CHECK(p.n_qubits() == 1);
    CHECK(p.at(0, 0) == 0.24);
    CHECK(p.at(0, 1) == 0.06);
    CHECK(p.at(1, 0) == 0.56);
    CHECK(p.at(1, 1) == 0.14);
    CHECK_THROWS_AS(p.at(2, 0), precondition_error);

    CHECK_THROWS_AS(audit::PauliDistribution::from_joint(1, std::vector<double>{0.5, 0.5}),
                    precondition_error); // wrong table size
    CHECK_THROWS_AS(
        audit::PauliDistribution::from_joint(1, std::vector<double>{0.5, 0.5, 0.25, 0.25}),
        domain_error); // sums to 1.5
    CHECK_THROWS_AS(
        audit::PauliDistribution::from_joint(0, std::vector<double>{1.0}),
        precondition_error);
    CHECK_THROWS_AS(
        audit::PauliDistribution::from_joint(1, std::vector<double>{-0.1, 0.5, 0.4, 0.2}),
        domain_error);
}

TEST_CASE("PauliDistribution: random tables are normalized and seed-stable") {
    Rng a(31), b(31);
    const auto p = audit::PauliDistribution::random(3, a);
    const auto q = audit::PauliDistribution::random(3, b);
    CHECK(p.joint() == q.joint());
    REQUIRE(p.joint().size() == 64);
    double total = 0.0;
    for (double v : p.joint()) {
        CHECK(v >= 0.0);
        total += v;
    }
    CHECK(total == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("marginals are consistent with the joint table") {
    Rng rng(5);
    const auto p = audit::PauliDistribution::random(2, rng);
    const auto m = audit::marginals(p);
    REQUIRE(m.p_x.size() == 4);
    REQUIRE(m.p_z.size() == 4);
    REQUIRE(m.weight.size() == 3);

    for (std::uint64_t x = 0; x < 4; ++x) {
        double row = 0.0;
        for (std::uint64_t z = 0; z < 4; ++z) row += p.at(x, z);
        CHECK(m.p_x[x] == Approx(row).epsilon(1e-14));
    }
    for (std::uint64_t z = 0; z < 4; ++z) {
        double col = 0.0;
        for (std::uint64_t x = 0; x < 4; ++x) col += p.at(x, z);
        CHECK(m.p_z[z] == Approx(col).epsilon(1e-14));
    }
    CHECK(m.weight[0] == Approx(m.p_z[0]).epsilon(1e-14));
    CHECK(m.weight[1] == Approx(m.p_z[1] + m.p_z[2]).epsilon(1e-14));
    CHECK(m.weight[2] == Approx(m.p_z[3]).epsilon(1e-14));
}

TEST_CASE("eve_information: uniform, deterministic, and product channels") {
    // Uniform n = 1: every bit value leaves the phase bit uniform.
    const auto uniform =
        audit::PauliDistribution::from_joint(1, std::vector<double>{0.25, 0.25, 0.25, 0.25});
    CHECK(audit::eve_information(uniform) == Approx(1.0).epsilon(1e-14));
    CHECK(audit::eve_information_bound(uniform) == Approx(1.5).epsilon(1e-14));

    // Phase bit pinned by the bit value: nothing left to learn.
    const auto pinned =
        audit::PauliDistribution::from_joint(1, std::vector<double>{0.5, 0.0, 0.0, 0.5});
    CHECK(audit::eve_information(pinned) == Approx(0.0).scale(1.0).epsilon(1e-14));

    // Independent components: the conditional entropy is the marginal one.
    const auto product =
        audit::PauliDistribution::from_joint(1, std::vector<double>{0.24, 0.06, 0.56, 0.14});
    CHECK(audit::eve_information(product) == Approx(num::binary_entropy(0.2)).epsilon(1e-13));
    CHECK(audit::eve_information_bound(product) ==
          Approx(num::binary_entropy(0.2) + 0.2).epsilon(1e-13));

    // A zero-probability bit row must not poison the sum.
    const auto degenerate =
        audit::PauliDistribution::from_joint(1, std::vector<double>{0.5, 0.5, 0.0, 0.0});
    CHECK(audit::eve_information(degenerate) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eve_information never exceeds its closed-form cap") {
    Rng rng(77);
    for (std::int64_t n : {1, 2, 3}) {
        for (int trial = 0; trial < 200; ++trial) {
            const auto p = audit::PauliDistribution::random(n, rng);
            const double info = audit::eve_information(p);
            const auto m = audit::marginals(p);
            CHECK(info <= audit::eve_information_bound(p) + 1e-12);
            CHECK(info <= num::shannon_entropy(m.p_z) + 1e-12);
        }
    }
}

TEST_CASE("entropy_split_bound: equality and separation") {
    // Uniform on 4 symbols saturates the bound exactly.
    const std::vector<double> uniform4 = {0.25, 0.25, 0.25, 0.25};
    const auto u = audit::entropy_split_bound(uniform4);
    CHECK(u.entropy == Approx(2.0).epsilon(1e-14));
    CHECK(u.bound == Approx(2.0).epsilon(1e-14));

    // Binary alphabets collapse the bound onto the entropy itself.
    const std::vector<double> binary = {0.9, 0.1};
    const auto b = audit::entropy_split_bound(binary);
    CHECK(b.bound == Approx(b.entropy).epsilon(1e-14));

    const std::vector<double> three = {0.5, 0.3, 0.2};
    const auto t = audit::entropy_split_bound(three);
    CHECK(t.entropy == Approx(1.4854752972273342).epsilon(1e-14));
    CHECK(t.bound == Approx(1.5).epsilon(1e-14));
    CHECK(t.entropy <= t.bound);

    CHECK_THROWS_AS(audit::entropy_split_bound(std::vector<double>{1.0}), precondition_error);
    CHECK_THROWS_AS(audit::entropy_split_bound(std::vector<double>{0.7, 0.7}), domain_error);
}

TEST_CASE("count_extensions matches the product formula and saturates") {
    CHECK(audit::count_extensions(4, 1) == 15);
    CHECK(audit::count_extensions(4, 2) == 35);
    CHECK(audit::count_extensions(4, 3) == 15); // symmetric
    CHECK(audit::count_extensions(5, 2) == 155);
    for (std::int64_t d = 0; d <= 10; ++d) {
        CHECK(audit::count_extensions(d, 0) == 1);
        CHECK(audit::count_extensions(d, d) == 1);
        for (std::int64_t s = 0; s <= d; ++s) {
            const auto expected = gaussian_binomial(d, s);
            if (expected <= 10000) CHECK(audit::count_extensions(d, s) == expected);
        }
    }
    // Values beyond the cap saturate instead of overflowing.
    CHECK(audit::count_extensions(40, 3) == 10001);
    CHECK(audit::count_extensions(62, 31) == 10001);
    CHECK(audit::count_extensions(4, 5) == 0);
}

TEST_CASE("enumerate_extensions: complete, distinct, nested") {
    const auto trivial = gf2::BinaryCode::from_generator(4, gf2::BitMatrix(0, 4));
    const auto ones = audit::enumerate_extensions(trivial, 1);
    CHECK(ones.size() == 15); // every 1-dim subspace of F_2^4
    std::set<std::uint64_t> seen;
    for (const auto& code : ones) {
        CHECK(code.dimension() == 1);
        seen.insert(code.generator.row(0).to_u64());
    }
    CHECK(seen.size() == 15);

    const auto base = gf2::BinaryCode::from_generator(
        4, gf2::BitMatrix::from_rows(std::vector<gf2::BitVec>{gf2::BitVec::from_string("1111")}));
    const auto exts = audit::enumerate_extensions(base, 2);
    CHECK(exts.size() == static_cast<std::size_t>(audit::count_extensions(3, 2)));
    for (const auto& code : exts) {
        CHECK(code.dimension() == 3);
        CHECK(base.subcode_of(code));
    }
    // Distinct as subspaces: compare full codeword sets.
    std::set<std::set<std::uint64_t>> spaces;
    for (const auto& code : exts) {
        std::set<std::uint64_t> words;
        for (const auto& w : code.codewords()) words.insert(w.to_u64());
        spaces.insert(std::move(words));
    }
    CHECK(spaces.size() == exts.size());

    CHECK(audit::enumerate_extensions(base, 0).size() == 1);
}

TEST_CASE("subcode_ensemble_audit: exhaustive ensemble") {
    Rng rng(13);
    const auto c1 = gf2::BinaryCode::from_generator(4, gf2::BitMatrix(0, 4));
    const auto w = gf2::AdditiveChannel::bsc(4, 0.2);
    const auto res = audit::subcode_ensemble_audit(c1, 1, w, 50, rng);
    CHECK(res.exhaustive);
    CHECK(res.instances == 15);
    CHECK(res.sigma == 0.0);
    CHECK(res.passed);
    CHECK(res.average_error <= res.bound + 1e-12);

    // The average must equal the mean over the explicit ensemble.
    double mean = 0.0;
    for (const auto& c2 : audit::enumerate_extensions(c1, 1))
        mean += gf2::exact_error_probability(w, c1, c2);
    mean /= 15.0;
    CHECK(res.average_error == Approx(mean).epsilon(1e-13));

    // And the bound must equal the g-weighted weight distribution.
    const auto wd = w.weight_distribution();
    double expected_bound = 0.0;
    for (std::size_t k = 0; k < wd.size(); ++k)
        expected_bound += wd[k] * gf2::g_factor(std::exp2(1 + 0 - 4), 4, static_cast<std::int64_t>(k));
    CHECK(res.bound == Approx(expected_bound).epsilon(1e-13));
}

TEST_CASE("subcode_ensemble_audit: sampled ensemble") {
    Rng rng(21);
    const auto c1 = gf2::BinaryCode::from_generator(12, gf2::BitMatrix(0, 12));
    const auto w = gf2::AdditiveChannel::bsc(12, 0.1);
    REQUIRE(audit::count_extensions(12, 3) > 10000);
    const auto res = audit::subcode_ensemble_audit(c1, 3, w, 200, rng);
    CHECK_FALSE(res.exhaustive);
    CHECK(res.instances == 200);
    CHECK(res.sigma > 0.0);
    CHECK(res.passed);

    // Identical seeds reproduce the sampled mean bit for bit.
    Rng rng2(21);
    const auto res2 = audit::subcode_ensemble_audit(c1, 3, w, 200, rng2);
    CHECK(res2.average_error == res.average_error);
}

TEST_CASE("subcode_ensemble_audit: precondition checks") {
    Rng rng(1);
    const auto c1 = gf2::BinaryCode::from_generator(4, gf2::BitMatrix(0, 4));
    const auto wrong_len = gf2::AdditiveChannel::bsc(5, 0.1);
    CHECK_THROWS_AS(audit::subcode_ensemble_audit(c1, 1, wrong_len, 10, rng),
                    precondition_error);
    const auto w = gf2::AdditiveChannel::bsc(4, 0.1);
    CHECK_THROWS_AS(audit::subcode_ensemble_audit(c1, 5, w, 10, rng), precondition_error);
    CHECK_THROWS_AS(audit::subcode_ensemble_audit(c1, 1, w, 0, rng), precondition_error);
}
