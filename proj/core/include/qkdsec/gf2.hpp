#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qkdsec/error.hpp"
#include "qkdsec/rng.hpp"

namespace qkdsec::gf2 {

// Bit string of fixed length, packed LSB-first into 64-bit words: position i
// lives in word i/64 at bit i%64. Lexicographic order reads position 0 first,
// i.e. compares the written '0'/'1' strings.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::int64_t size);
    static BitVec from_u64(std::uint64_t bits, std::int64_t size); // size <= 64
    static BitVec from_string(std::string_view s);                 // '0'/'1' only

    std::int64_t size() const { return size_; }
    bool get(std::int64_t i) const;
    void set(std::int64_t i, bool v);
    void flip(std::int64_t i);

    BitVec& operator^=(const BitVec& o);
    friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }

    std::int64_t popcount() const;
    bool any() const;
    std::uint64_t to_u64() const; // size <= 64
    std::string to_string() const;
    std::span<const std::uint64_t> words() const { return w_; }

    bool operator==(const BitVec&) const = default;

    // '0' < '1', position 0 most significant. Sizes must match.
    static bool lex_less(const BitVec& a, const BitVec& b);

private:
    std::int64_t size_ = 0;
    std::vector<std::uint64_t> w_;
};

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::int64_t rows, std::int64_t cols);
    static BitMatrix identity(std::int64_t n);
    static BitMatrix from_rows(std::span<const BitVec> rows);

    std::int64_t rows() const { return static_cast<std::int64_t>(rows_.size()); }
    std::int64_t cols() const { return cols_; }
    bool get(std::int64_t r, std::int64_t c) const { return rows_.at(r).get(c); }
    void set(std::int64_t r, std::int64_t c, bool v) { rows_.at(r).set(c, v); }
    const BitVec& row(std::int64_t r) const { return rows_.at(r); }
    void set_row(std::int64_t r, BitVec v);
    void xor_row_into(std::int64_t src, std::int64_t dst); // row[dst] ^= row[src]
    void swap_rows(std::int64_t a, std::int64_t b);
    void append_row(BitVec v);

    bool operator==(const BitMatrix&) const = default;

private:
    std::int64_t cols_ = 0;
    std::vector<BitVec> rows_;
};

std::int64_t rank(BitMatrix m);

// In-place reduced row echelon form; returns the pivot columns (ascending).
std::vector<std::int64_t> to_rref(BitMatrix& m);

// Uniform random bit string; words drawn from rng low positions first.
BitVec random_bitvec(std::int64_t n, Rng& rng);

// Independent Bernoulli(p) bits, one rng draw per position.
BitVec bernoulli_bitvec(std::int64_t n, double p, Rng& rng);

// Uniform over the full-row-rank rows x cols matrices (rows <= cols), by
// rejection from the uniform matrix distribution. The acceptance probability
// is bounded below by prod_{i>=1}(1 - 2^-i) ~ 0.2887, so retries stay cheap
// at every size.
BitMatrix sample_full_rank_matrix(std::int64_t rows, std::int64_t cols, Rng& rng);

// Linear block code given by a full-row-rank generator matrix. dimension 0
// (an empty generator over a positive length) is allowed and denotes the
// code containing only the zero word.
struct BinaryCode {
    std::int64_t length_n = 0;
    BitMatrix generator; // dimension() x length_n, full row rank

    static BinaryCode from_generator(std::int64_t length_n, BitMatrix g);
    // `blocks` independent copies of the systematic single-error-correcting
    // [7,4] code, giving length 7*blocks and dimension 4*blocks.
    static BinaryCode hamming74_blocks(std::int64_t blocks);

    std::int64_t dimension() const { return generator.rows(); }
    BitVec encode(const BitVec& message) const;
    bool contains(const BitVec& word) const;
    bool subcode_of(const BinaryCode& other) const;
    // All 2^dimension codewords, message order m = 0, 1, ... (Gray-stepped
    // internally). Guarded to dimension <= 24.
    std::vector<BitVec> codewords() const;
};

// Dimension-`sub_dim` subspace of F_2^m sampled by drawing uniform vectors
// and rejecting any that fall in the span collected so far. The rows are the
// accepted vectors in draw order.
BitMatrix sample_subspace_basis(std::int64_t m, std::int64_t sub_dim, Rng& rng);

// The same sampler packaged as a code in the parent's coordinates: a
// uniformly random sub_dim-dimensional subspace of F_2^{parent_dim}. Any
// fixed nonzero vector lands in the result with probability
// (2^sub_dim - 1)/(2^parent_dim - 1).
BinaryCode sample_subcode(std::int64_t parent_dim, std::int64_t sub_dim, Rng& rng);

// Extends c1 by `add_dim` uniformly sampled independent directions.
BinaryCode sample_extension(const BinaryCode& c1, std::int64_t add_dim, Rng& rng);

// Exhaustive minimum-distance decoding of y onto the cosets of c1 inside c2:
// picks the error pattern of least weight (ties: lexicographically smallest
// pattern), then returns the canonical -- lexicographically smallest --
// member of the c1-coset of the corrected word. Requires c1 subcode_of c2
// and length <= 24.
BitVec min_distance_decode(const BitVec& y, const BinaryCode& c1, const BinaryCode& c2);

// Memoryless-or-not additive noise on n-bit strings: noise_pmf[e] is the
// probability of XOR pattern e (packed LSB-first). Guarded to n <= 20.
struct AdditiveChannel {
    std::int64_t length_n = 0;
    std::vector<double> noise_pmf; // size 2^n, sums to 1

    static AdditiveChannel bsc(std::int64_t n, double p);
    static AdditiveChannel from_pmf(std::int64_t n, std::vector<double> pmf);

    // P(|noise| = k) for k = 0..n.
    std::vector<double> weight_distribution() const;
};

// Probability that min_distance_decode maps noise-corrupted words to the
// wrong c1-coset, averaged exactly over the channel. Transmitting any coset
// representative gives the same value; the zero word is used.
double exact_error_probability(const AdditiveChannel& w, const BinaryCode& c1,
                               const BinaryCode& c2);

// min(2^{n h-clip(k/n)} * x, 1) for k <= n/2, and 1 above; h-clip is
// clipped_entropy. x in [0,1], 0 <= k <= n.
double g_factor(double x, std::int64_t n, std::int64_t k);

// Text exchange format: one row per line as a '0'/'1' string, '#' comments
// and blank lines skipped. All rows must have equal length.
BitMatrix parse_generator_text(std::istream& in);
std::string format_generator_text(const BitMatrix& m);

} // namespace qkdsec::gf2
