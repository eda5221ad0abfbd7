#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qkdsec/error.hpp"
#include "qkdsec/gf2.hpp"
#include "qkdsec/rng.hpp"

using namespace qkdsec;
using gf2::BitMatrix;
using gf2::BitVec;
using gf2::BinaryCode;
using doctest::Approx;

TEST_CASE("BitVec: packing, strings, xor") {
    const auto v = BitVec::from_u64(0b1011, 4); // position i = bit i
    CHECK(v.get(0));
    CHECK(v.get(1));
    CHECK_FALSE(v.get(2));
    CHECK(v.get(3));
    CHECK(v.to_string() == "1101");
    CHECK(BitVec::from_string("1101") == v);
    CHECK(v.popcount() == 3);
    CHECK(v.to_u64() == 0b1011);

    auto w = v;
    w ^= BitVec::from_string("1111");
    CHECK(w.to_string() == "0010");
    CHECK((v ^ v) == BitVec(4));
    CHECK_FALSE(BitVec(4).any());
    CHECK(v.any());

    // Word boundary: bit 64 lands in the second word.
    BitVec big(70);
    big.set(64, true);
    CHECK(big.popcount() == 1);
    CHECK(big.words()[1] == 1);
    big.flip(64);
    CHECK_FALSE(big.any());
}

TEST_CASE("BitVec: lexicographic order reads position 0 first") {
    const auto a = BitVec::from_string("0111");
    const auto b = BitVec::from_string("1000");
    CHECK(BitVec::lex_less(a, b));
    CHECK_FALSE(BitVec::lex_less(b, a));
    CHECK_FALSE(BitVec::lex_less(a, a));
    CHECK(BitVec::lex_less(BitVec::from_string("1000"), BitVec::from_string("1001")));
}

TEST_CASE("BitMatrix: identity, rank, rref pivots") {
    const auto id = BitMatrix::identity(5);
    CHECK(gf2::rank(id) == 5);

    BitMatrix m(0, 4);
    m.append_row(BitVec::from_string("1100"));
    m.append_row(BitVec::from_string("0110"));
    m.append_row(BitVec::from_string("1010")); // sum of the first two
    CHECK(gf2::rank(m) == 2);

    auto r = m;
    const auto pivots = gf2::to_rref(r);
    CHECK(pivots == std::vector<std::int64_t>{0, 1});
    CHECK(r.row(0).to_string() == "1010"); // reduced above and below
    CHECK(r.row(1).to_string() == "0110");
    CHECK_FALSE(r.row(2).any());
}

TEST_CASE("random bit strings are seed-deterministic") {
    Rng a(42), b(42);
    const auto x = gf2::random_bitvec(130, a);
    const auto y = gf2::random_bitvec(130, b);
    CHECK(x == y);
    CHECK(x.size() == 130);

    Rng c(7);
    CHECK_FALSE(gf2::bernoulli_bitvec(50, 0.0, c).any());
    CHECK(gf2::bernoulli_bitvec(50, 1.0, c).popcount() == 50);
    CHECK_THROWS_AS(gf2::bernoulli_bitvec(10, 1.5, c), precondition_error);
}

TEST_CASE("sample_full_rank_matrix always has full row rank") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = gf2::sample_full_rank_matrix(6, 10, rng);
        CHECK(m.rows() == 6);
        CHECK(m.cols() == 10);
        CHECK(gf2::rank(m) == 6);
    }
    Rng a(3), b(3);
    CHECK(gf2::sample_full_rank_matrix(4, 9, a) == gf2::sample_full_rank_matrix(4, 9, b));
}

TEST_CASE("hamming74_blocks: systematic generator, encode, membership") {
    const auto code = BinaryCode::hamming74_blocks(1);
    CHECK(code.length_n == 7);
    CHECK(code.dimension() == 4);
    CHECK(code.generator.row(0).to_string() == "1000110");
    CHECK(code.generator.row(1).to_string() == "0100101");
    CHECK(code.generator.row(2).to_string() == "0010011");
    CHECK(code.generator.row(3).to_string() == "0001111");

    const auto msg = BitVec::from_string("1010");
    const auto cw = code.encode(msg);
    // Systematic: the message rides in the first four positions.
    for (int i = 0; i < 4; ++i) CHECK(cw.get(i) == msg.get(i));
    CHECK(code.contains(cw));
    auto corrupted = cw;
    corrupted.flip(2);
    CHECK_FALSE(code.contains(corrupted));

    CHECK(code.codewords().size() == 16);
    // Every pair of distinct codewords is at distance >= 3.
    const auto words = code.codewords();
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t j = i + 1; j < words.size(); ++j)
            CHECK((words[i] ^ words[j]).popcount() >= 3);

    const auto two = BinaryCode::hamming74_blocks(2);
    CHECK(two.length_n == 14);
    CHECK(two.dimension() == 8);
}

TEST_CASE("dimension-zero codes hold only the zero word") {
    const auto trivial = BinaryCode::from_generator(5, BitMatrix(0, 5));
    CHECK(trivial.dimension() == 0);
    CHECK(trivial.contains(BitVec(5)));
    CHECK_FALSE(trivial.contains(BitVec::from_string("00100")));
    CHECK(trivial.codewords().size() == 1);
    CHECK(trivial.subcode_of(BinaryCode::hamming74_blocks(1)) == false); // length mismatch
}

TEST_CASE("subspace and subcode samplers deliver the requested dimension") {
    Rng rng(19);
    const auto basis = gf2::sample_subspace_basis(8, 3, rng);
    CHECK(basis.rows() == 3);
    CHECK(basis.cols() == 8);
    CHECK(gf2::rank(basis) == 3);

    const auto sub = gf2::sample_subcode(6, 2, rng);
    CHECK(sub.length_n == 6);
    CHECK(sub.dimension() == 2);

    const auto base = BinaryCode::hamming74_blocks(1);
    const auto ext = gf2::sample_extension(base, 2, rng);
    CHECK(ext.length_n == 7);
    CHECK(ext.dimension() == 6);
    CHECK(base.subcode_of(ext));
}

TEST_CASE("sample_subcode hits a fixed vector at the predicted rate") {
    // P(v in random 1-dim subspace of F_2^4) = 1/15 for any nonzero v.
    Rng rng(101);
    const auto target = BitVec::from_string("1011");
    int hits = 0;
    const int trials = 3000;
    for (int i = 0; i < trials; ++i) {
        if (gf2::sample_subcode(4, 1, rng).contains(target)) ++hits;
    }
    const double expected = trials / 15.0;
    const double sigma = std::sqrt(trials * (1.0 / 15.0) * (14.0 / 15.0));
    CHECK(std::abs(hits - expected) <= 4.0 * sigma);
}

TEST_CASE("min_distance_decode: repetition code") {
    const auto c2 = BinaryCode::from_generator(
        3, BitMatrix::from_rows(std::vector<BitVec>{BitVec::from_string("111")}));
    const auto c1 = BinaryCode::from_generator(3, BitMatrix(0, 3));

    // One flip is pulled back to the nearest codeword.
    CHECK(gf2::min_distance_decode(BitVec::from_string("110"), c1, c2).to_string() == "111");
    CHECK(gf2::min_distance_decode(BitVec::from_string("010"), c1, c2).to_string() == "000");
    CHECK(gf2::min_distance_decode(BitVec::from_string("111"), c1, c2).to_string() == "111");

    // With c1 == c2 every corrected word collapses to the coset canon, the
    // zero word.
    CHECK(gf2::min_distance_decode(BitVec::from_string("110"), c2, c2).to_string() == "000");
    CHECK(gf2::min_distance_decode(BitVec::from_string("011"), c2, c2).to_string() == "000");
}

TEST_CASE("min_distance_decode: weight ties break to the lex-smallest pattern") {
    // C2 = {00, 11}: either received word has coset {01, 10}, both weight 1.
    // Pattern 01 is lex-smaller and wins in both cases.
    const auto c2 = BinaryCode::from_generator(
        2, BitMatrix::from_rows(std::vector<BitVec>{BitVec::from_string("11")}));
    const auto c1 = BinaryCode::from_generator(2, BitMatrix(0, 2));
    CHECK(gf2::min_distance_decode(BitVec::from_string("10"), c1, c2).to_string() == "11");
    CHECK(gf2::min_distance_decode(BitVec::from_string("01"), c1, c2).to_string() == "00");
}

TEST_CASE("min_distance_decode rejects non-nested codes") {
    const auto hamming = BinaryCode::hamming74_blocks(1);
    // A weight-1 word can never sit in a distance-3 code.
    const auto other = BinaryCode::from_generator(
        7, BitMatrix::from_rows(std::vector<BitVec>{BitVec::from_string("1000000")}));
    CHECK_FALSE(other.subcode_of(hamming));
    CHECK_THROWS_AS(gf2::min_distance_decode(BitVec(7), other, hamming), precondition_error);
}

TEST_CASE("AdditiveChannel: bsc pmf and weight distribution") {
    const auto w = gf2::AdditiveChannel::bsc(3, 0.1);
    REQUIRE(w.noise_pmf.size() == 8);
    CHECK(w.noise_pmf[0] == Approx(0.729).epsilon(1e-14));
    CHECK(w.noise_pmf[0b101] == Approx(0.009).epsilon(1e-14));
    CHECK(w.noise_pmf[0b111] == Approx(0.001).epsilon(1e-14));

    const auto wd = w.weight_distribution();
    REQUIRE(wd.size() == 4);
    CHECK(wd[0] == Approx(0.729).epsilon(1e-14));
    CHECK(wd[1] == Approx(0.243).epsilon(1e-14));
    CHECK(wd[2] == Approx(0.027).epsilon(1e-14));
    CHECK(wd[3] == Approx(0.001).epsilon(1e-14));

    CHECK_THROWS_AS(gf2::AdditiveChannel::from_pmf(2, std::vector<double>{0.5, 0.5, 0.5, 0.5}),
                    precondition_error);
    CHECK_THROWS_AS(gf2::AdditiveChannel::bsc(2, 1.5), domain_error);
}

TEST_CASE("exact_error_probability: repetition code under bsc") {
    const auto w = gf2::AdditiveChannel::bsc(3, 0.1);
    const auto c2 = BinaryCode::from_generator(
        3, BitMatrix::from_rows(std::vector<BitVec>{BitVec::from_string("111")}));
    const auto c1 = BinaryCode::from_generator(3, BitMatrix(0, 3));
    // Success collects the four coset leaders 000, 001, 010, 100:
    // 0.729 + 3 * 0.081 = 0.972.
    CHECK(gf2::exact_error_probability(w, c1, c2) == Approx(0.028).epsilon(1e-13));
    // One coset only: decoding cannot cross a coset boundary.
    CHECK(gf2::exact_error_probability(w, c2, c2) == Approx(0.0).scale(1.0).epsilon(1e-15));
}

TEST_CASE("exact_error_probability vanishes on a noiseless channel") {
    std::vector<double> pmf(1 << 7, 0.0);
    pmf[0] = 1.0;
    const auto w = gf2::AdditiveChannel::from_pmf(7, std::move(pmf));
    const auto c2 = BinaryCode::hamming74_blocks(1);
    const auto c1 = BinaryCode::from_generator(
        7, BitMatrix::from_rows(
               std::vector<BitVec>{c2.generator.row(0), c2.generator.row(1)}));
    REQUIRE(c1.subcode_of(c2));
    CHECK(gf2::exact_error_probability(w, c1, c2) == 0.0);
    const auto trivial = BinaryCode::from_generator(7, BitMatrix(0, 7));
    CHECK(gf2::exact_error_probability(w, trivial, c2) == 0.0);
}

TEST_CASE("g_factor: clamps and reference value") {
    CHECK(gf2::g_factor(std::exp2(-8), 10, 2) == Approx(0.58207660913467407).epsilon(1e-12));
    CHECK(gf2::g_factor(0.0, 10, 2) == 0.0);
    CHECK(gf2::g_factor(1.0, 10, 2) == 1.0);      // clamp
    CHECK(gf2::g_factor(1e-30, 10, 6) == 1.0);    // k beyond n/2
    CHECK(gf2::g_factor(0.25, 10, 0) == 0.25);    // zero-weight entropy term
    CHECK_THROWS_AS(gf2::g_factor(-0.1, 10, 2), domain_error);
    CHECK_THROWS_AS(gf2::g_factor(0.5, 10, 11), precondition_error);
}

TEST_CASE("generator text format round-trips") {
    const auto code = BinaryCode::hamming74_blocks(1);
    const std::string text = gf2::format_generator_text(code.generator);
    std::istringstream in("# comment line\n\n" + text);
    const auto parsed = gf2::parse_generator_text(in);
    CHECK(parsed == code.generator);

    std::istringstream ragged("101\n10\n");
    CHECK_THROWS_AS(gf2::parse_generator_text(ragged), precondition_error);
}
