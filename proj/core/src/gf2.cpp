#include "qkdsec/gf2.hpp"

#include "qkdsec/numerics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>

namespace qkdsec::gf2 {

namespace {

std::int64_t words_for(std::int64_t bits) { return (bits + 63) / 64; }

std::uint64_t tail_mask(std::int64_t bits) {
    const int r = static_cast<int>(bits % 64);
    return r == 0 ? ~0ull : (1ull << r) - 1ull;
}

} // namespace

BitVec::BitVec(std::int64_t size) : size_(size) {
    if (size < 0) throw precondition_error("BitVec: negative size");
    w_.assign(words_for(size), 0);
}

BitVec BitVec::from_u64(std::uint64_t bits, std::int64_t size) {
    if (size < 0 || size > 64) throw precondition_error("BitVec::from_u64: size must lie in [0,64]");
    BitVec v(size);
    if (size > 0) v.w_[0] = bits & tail_mask(size);
    return v;
}

BitVec BitVec::from_string(std::string_view s) {
    BitVec v(static_cast<std::int64_t>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1')
            v.set(static_cast<std::int64_t>(i), true);
        else if (s[i] != '0')
            throw precondition_error("BitVec::from_string: expected only '0' and '1'");
    }
    return v;
}

bool BitVec::get(std::int64_t i) const {
    if (i < 0 || i >= size_) throw precondition_error("BitVec::get: index out of range");
    return (w_[i / 64] >> (i % 64)) & 1ull;
}

void BitVec::set(std::int64_t i, bool v) {
    if (i < 0 || i >= size_) throw precondition_error("BitVec::set: index out of range");
    const std::uint64_t m = 1ull << (i % 64);
    if (v)
        w_[i / 64] |= m;
    else
        w_[i / 64] &= ~m;
}

void BitVec::flip(std::int64_t i) {
    if (i < 0 || i >= size_) throw precondition_error("BitVec::flip: index out of range");
    w_[i / 64] ^= 1ull << (i % 64);
}

BitVec& BitVec::operator^=(const BitVec& o) {
    if (size_ != o.size_) throw precondition_error("BitVec: XOR of different sizes");
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    return *this;
}

std::int64_t BitVec::popcount() const {
    std::int64_t c = 0;
    for (const std::uint64_t w : w_) c += std::popcount(w);
    return c;
}

bool BitVec::any() const {
    for (const std::uint64_t w : w_)
        if (w != 0) return true;
    return false;
}

std::uint64_t BitVec::to_u64() const {
    if (size_ > 64) throw precondition_error("BitVec::to_u64: size exceeds 64");
    return w_.empty() ? 0ull : w_[0];
}

std::string BitVec::to_string() const {
    std::string s(static_cast<std::size_t>(size_), '0');
    for (std::int64_t i = 0; i < size_; ++i)
        if (get(i)) s[static_cast<std::size_t>(i)] = '1';
    return s;
}

bool BitVec::lex_less(const BitVec& a, const BitVec& b) {
    if (a.size_ != b.size_) throw precondition_error("BitVec::lex_less: size mismatch");
    for (std::size_t i = 0; i < a.w_.size(); ++i) {
        const std::uint64_t d = a.w_[i] ^ b.w_[i];
        if (d != 0) {
            // lowest differing position decides; '0' sorts first
            const int idx = std::countr_zero(d);
            return ((a.w_[i] >> idx) & 1ull) == 0;
        }
    }
    return false;
}

BitMatrix::BitMatrix(std::int64_t rows, std::int64_t cols) : cols_(cols) {
    if (rows < 0 || cols < 0) throw precondition_error("BitMatrix: negative shape");
    rows_.assign(static_cast<std::size_t>(rows), BitVec(cols));
}

BitMatrix BitMatrix::identity(std::int64_t n) {
    BitMatrix m(n, n);
    for (std::int64_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

BitMatrix BitMatrix::from_rows(std::span<const BitVec> rows) {
    if (rows.empty()) throw precondition_error("BitMatrix::from_rows: cannot infer width from zero rows");
    BitMatrix m(0, rows.front().size());
    for (const BitVec& r : rows) m.append_row(r);
    return m;
}

void BitMatrix::set_row(std::int64_t r, BitVec v) {
    if (v.size() != cols_) throw precondition_error("BitMatrix::set_row: width mismatch");
    rows_.at(static_cast<std::size_t>(r)) = std::move(v);
}

void BitMatrix::xor_row_into(std::int64_t src, std::int64_t dst) {
    rows_.at(static_cast<std::size_t>(dst)) ^= rows_.at(static_cast<std::size_t>(src));
}

void BitMatrix::swap_rows(std::int64_t a, std::int64_t b) {
    std::swap(rows_.at(static_cast<std::size_t>(a)), rows_.at(static_cast<std::size_t>(b)));
}

void BitMatrix::append_row(BitVec v) {
    if (v.size() != cols_) throw precondition_error("BitMatrix::append_row: width mismatch");
    rows_.push_back(std::move(v));
}

std::vector<std::int64_t> to_rref(BitMatrix& m) {
    std::vector<std::int64_t> pivots;
    std::int64_t r = 0;
    for (std::int64_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::int64_t sel = -1;
        for (std::int64_t i = r; i < m.rows(); ++i) {
            if (m.get(i, c)) {
                sel = i;
                break;
            }
        }
        if (sel < 0) continue;
        m.swap_rows(sel, r);
        for (std::int64_t i = 0; i < m.rows(); ++i)
            if (i != r && m.get(i, c)) m.xor_row_into(r, i);
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

std::int64_t rank(BitMatrix m) { return static_cast<std::int64_t>(to_rref(m).size()); }

BitVec random_bitvec(std::int64_t n, Rng& rng) {
    BitVec v(n);
    for (std::int64_t i = 0; i < n; i += 64) {
        const std::int64_t chunk = std::min<std::int64_t>(64, n - i);
        const std::uint64_t bits = rng.next_u64() & tail_mask(chunk);
        for (std::int64_t b = 0; b < chunk; ++b)
            if ((bits >> b) & 1ull) v.set(i + b, true);
    }
    return v;
}

BitVec bernoulli_bitvec(std::int64_t n, double p, Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw precondition_error("bernoulli_bitvec: p must lie in [0, 1]");
    BitVec v(n);
    for (std::int64_t i = 0; i < n; ++i)
        if (rng.bernoulli(p)) v.set(i, true);
    return v;
}

namespace {

// Incremental span tracker: echelon rows plus their pivot positions.
struct SpanBasis {
    std::vector<BitVec> rows;
    std::vector<std::int64_t> pivots;

    // Residual of v after elimination; zero residual means v is in the span.
    BitVec reduce(BitVec v) const {
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (v.get(pivots[i])) v ^= rows[i];
        return v;
    }

    // Returns false (and leaves the basis unchanged) if v is in the span.
    bool insert(const BitVec& v) {
        BitVec res = reduce(v);
        if (!res.any()) return false;
        std::int64_t p = -1;
        for (std::int64_t i = 0; i < res.size(); ++i) {
            if (res.get(i)) {
                p = i;
                break;
            }
        }
        rows.push_back(std::move(res));
        pivots.push_back(p);
        return true;
    }
};

} // namespace

BitMatrix sample_full_rank_matrix(std::int64_t rows, std::int64_t cols, Rng& rng) {
    if (rows < 0 || cols < 0) throw precondition_error("sample_full_rank_matrix: negative shape");
    if (rows > cols) throw precondition_error("sample_full_rank_matrix: rows must not exceed cols");
    for (;;) {
        BitMatrix m(0, cols);
        for (std::int64_t i = 0; i < rows; ++i) m.append_row(random_bitvec(cols, rng));
        if (rank(m) == rows) return m;
    }
}

BinaryCode BinaryCode::from_generator(std::int64_t length_n, BitMatrix g) {
    if (length_n < 1) throw precondition_error("BinaryCode: length must be >= 1");
    if (g.rows() > 0 && g.cols() != length_n)
        throw precondition_error("BinaryCode: generator width differs from code length");
    if (g.rows() > length_n || rank(g) != g.rows())
        throw precondition_error("BinaryCode: generator rows must be linearly independent");
    BinaryCode c;
    c.length_n = length_n;
    c.generator = g.rows() > 0 ? std::move(g) : BitMatrix(0, length_n);
    return c;
}

BinaryCode BinaryCode::hamming74_blocks(std::int64_t blocks) {
    if (blocks < 1) throw precondition_error("hamming74_blocks: need at least one block");
    // systematic [7,4]: data at positions 0..3, parities p0=d0+d1+d3,
    // p1=d0+d2+d3, p2=d1+d2+d3 at positions 4..6
    static constexpr const char* block_rows[4] = {"1000110", "0100101", "0010011", "0001111"};
    BitMatrix g(4 * blocks, 7 * blocks);
    for (std::int64_t q = 0; q < blocks; ++q)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 7; ++j)
                if (block_rows[i][j] == '1') g.set(4 * q + i, 7 * q + j, true);
    return from_generator(7 * blocks, std::move(g));
}

BitVec BinaryCode::encode(const BitVec& message) const {
    if (message.size() != dimension()) throw precondition_error("encode: message width differs from dimension");
    BitVec w(length_n);
    for (std::int64_t i = 0; i < dimension(); ++i)
        if (message.get(i)) w ^= generator.row(i);
    return w;
}

bool BinaryCode::contains(const BitVec& word) const {
    if (word.size() != length_n) throw precondition_error("contains: word width differs from length");
    SpanBasis basis;
    for (std::int64_t i = 0; i < dimension(); ++i) basis.insert(generator.row(i));
    return !basis.reduce(word).any();
}

bool BinaryCode::subcode_of(const BinaryCode& other) const {
    if (length_n != other.length_n) return false;
    SpanBasis basis;
    for (std::int64_t i = 0; i < other.dimension(); ++i) basis.insert(other.generator.row(i));
    for (std::int64_t i = 0; i < dimension(); ++i)
        if (basis.reduce(generator.row(i)).any()) return false;
    return true;
}

std::vector<BitVec> BinaryCode::codewords() const {
    if (dimension() > 24) throw precondition_error("codewords: dimension capped at 24");
    std::vector<BitVec> out(1ull << dimension(), BitVec(length_n));
    for (std::uint64_t m = 1; m < out.size(); ++m) {
        const int b = std::countr_zero(m);
        out[m] = out[m ^ (1ull << b)] ^ generator.row(b);
    }
    return out;
}

BitMatrix sample_subspace_basis(std::int64_t m, std::int64_t sub_dim, Rng& rng) {
    if (m < 0 || sub_dim < 0 || sub_dim > m)
        throw precondition_error("sample_subspace_basis: need 0 <= sub_dim <= m");
    BitMatrix out(0, m);
    SpanBasis basis;
    while (out.rows() < sub_dim) {
        BitVec v = random_bitvec(m, rng);
        if (basis.insert(v)) out.append_row(std::move(v));
    }
    return out;
}

BinaryCode sample_subcode(std::int64_t parent_dim, std::int64_t sub_dim, Rng& rng) {
    if (parent_dim < 1) throw precondition_error("sample_subcode: parent dimension must be >= 1");
    return BinaryCode::from_generator(parent_dim, sample_subspace_basis(parent_dim, sub_dim, rng));
}

BinaryCode sample_extension(const BinaryCode& c1, std::int64_t add_dim, Rng& rng) {
    if (add_dim < 0 || c1.dimension() + add_dim > c1.length_n)
        throw precondition_error("sample_extension: extension does not fit the ambient space");
    SpanBasis basis;
    BitMatrix g(0, c1.length_n);
    for (std::int64_t i = 0; i < c1.dimension(); ++i) {
        basis.insert(c1.generator.row(i));
        g.append_row(c1.generator.row(i));
    }
    std::int64_t accepted = 0;
    while (accepted < add_dim) {
        BitVec v = random_bitvec(c1.length_n, rng);
        if (basis.insert(v)) {
            g.append_row(std::move(v));
            ++accepted;
        }
    }
    return BinaryCode::from_generator(c1.length_n, std::move(g));
}

namespace {

// Single-word packed views; valid for length <= 64.
std::vector<std::uint64_t> packed_rows(const BitMatrix& g) {
    std::vector<std::uint64_t> rows(static_cast<std::size_t>(g.rows()));
    for (std::int64_t i = 0; i < g.rows(); ++i) rows[static_cast<std::size_t>(i)] = g.row(i).to_u64();
    return rows;
}

// position 0 = LSB, and it is the most significant for lexicographic order
bool packed_lex_less(std::uint64_t a, std::uint64_t b) {
    if (a == b) return false;
    const int idx = std::countr_zero(a ^ b);
    return ((a >> idx) & 1ull) == 0;
}

bool packed_pattern_better(std::uint64_t cand, std::uint64_t best) {
    const int wc = std::popcount(cand), wb = std::popcount(best);
    if (wc != wb) return wc < wb;
    return packed_lex_less(cand, best);
}

// Visits every XOR combination of `rows` exactly once (Gray order),
// starting from `base`.
template <typename F>
void for_each_combination(std::uint64_t base, std::span<const std::uint64_t> rows, F&& f) {
    std::uint64_t w = base;
    f(w);
    const std::uint64_t total = 1ull << rows.size();
    for (std::uint64_t i = 1; i < total; ++i) {
        w ^= rows[static_cast<std::size_t>(std::countr_zero(i))];
        f(w);
    }
}

} // namespace

BitVec min_distance_decode(const BitVec& y, const BinaryCode& c1, const BinaryCode& c2) {
    if (c1.length_n != c2.length_n || y.size() != c2.length_n)
        throw precondition_error("min_distance_decode: length mismatch");
    if (c2.length_n > 24) throw precondition_error("min_distance_decode: length capped at 24");
    if (!c1.subcode_of(c2)) throw precondition_error("min_distance_decode: c1 must be a subcode of c2");

    const std::uint64_t yy = y.to_u64();
    const std::vector<std::uint64_t> rows2 = packed_rows(c2.generator);
    std::uint64_t best = yy; // error pattern for codeword 0
    for_each_combination(yy, rows2, [&](std::uint64_t e) {
        if (packed_pattern_better(e, best)) best = e;
    });

    // canonical label: lexicographically smallest member of (y ^ best) + C1
    const std::vector<std::uint64_t> rows1 = packed_rows(c1.generator);
    std::uint64_t label = yy ^ best;
    for_each_combination(yy ^ best, rows1, [&](std::uint64_t w) {
        if (packed_lex_less(w, label)) label = w;
    });
    return BitVec::from_u64(label, c2.length_n);
}

AdditiveChannel AdditiveChannel::bsc(std::int64_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("AdditiveChannel::bsc: p must lie in [0,1]");
    if (n < 1 || n > 20) throw precondition_error("AdditiveChannel: length must lie in [1,20]");
    std::vector<double> pow_p(static_cast<std::size_t>(n) + 1), pow_q(static_cast<std::size_t>(n) + 1);
    pow_p[0] = pow_q[0] = 1.0;
    for (std::int64_t k = 1; k <= n; ++k) {
        pow_p[static_cast<std::size_t>(k)] = pow_p[static_cast<std::size_t>(k - 1)] * p;
        pow_q[static_cast<std::size_t>(k)] = pow_q[static_cast<std::size_t>(k - 1)] * (1.0 - p);
    }
    std::vector<double> pmf(1ull << n);
    for (std::uint64_t e = 0; e < pmf.size(); ++e) {
        const int w = std::popcount(e);
        pmf[e] = pow_p[static_cast<std::size_t>(w)] * pow_q[static_cast<std::size_t>(n - w)];
    }
    AdditiveChannel ch;
    ch.length_n = n;
    ch.noise_pmf = std::move(pmf);
    return ch;
}

AdditiveChannel AdditiveChannel::from_pmf(std::int64_t n, std::vector<double> pmf) {
    if (n < 1 || n > 20) throw precondition_error("AdditiveChannel: length must lie in [1,20]");
    if (pmf.size() != (1ull << n)) throw precondition_error("AdditiveChannel: pmf must have 2^n entries");
    double sum = 0.0;
    for (const double v : pmf) {
        if (!(v >= 0.0)) throw domain_error("AdditiveChannel: negative probability");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw precondition_error("AdditiveChannel: pmf must sum to 1");
    AdditiveChannel ch;
    ch.length_n = n;
    ch.noise_pmf = std::move(pmf);
    return ch;
}

std::vector<double> AdditiveChannel::weight_distribution() const {
    std::vector<double> w(static_cast<std::size_t>(length_n) + 1, 0.0);
    for (std::uint64_t e = 0; e < noise_pmf.size(); ++e) w[static_cast<std::size_t>(std::popcount(e))] += noise_pmf[e];
    return w;
}

double exact_error_probability(const AdditiveChannel& w, const BinaryCode& c1,
                               const BinaryCode& c2) {
    if (w.length_n != c2.length_n) throw precondition_error("exact_error_probability: length mismatch");
    if (!c1.subcode_of(c2)) throw precondition_error("exact_error_probability: c1 must be a subcode of c2");

    const std::uint64_t total = 1ull << w.length_n;
    const std::vector<std::uint64_t> rows2 = packed_rows(c2.generator);
    const std::vector<std::uint64_t> rows1 = packed_rows(c1.generator);
    std::vector<bool> visited(total, false);

    // The decoder resolves a received word through the minimum-weight pattern
    // of its C2-coset, so decoding lands in the right C1-coset exactly when
    // the true noise differs from that pattern by a C1 word. Summing those
    // patterns coset by coset gives the exact success probability.
    double success = 0.0;
    for (std::uint64_t v = 0; v < total; ++v) {
        if (visited[v]) continue;
        std::uint64_t best = v;
        for_each_combination(v, rows2, [&](std::uint64_t e) {
            visited[e] = true;
            if (packed_pattern_better(e, best)) best = e;
        });
        for_each_combination(best, rows1, [&](std::uint64_t e) { success += w.noise_pmf[e]; });
    }
    return 1.0 - success;
}

double g_factor(double x, std::int64_t n, std::int64_t k) {
    if (!(x >= 0.0 && x <= 1.0)) throw domain_error("g_factor: x must lie in [0,1]");
    if (n < 1 || k < 0 || k > n) throw precondition_error("g_factor: need 1 <= n and 0 <= k <= n");
    if (2 * k > n) return 1.0;
    if (x == 0.0) return 0.0;
    const double expo =
        static_cast<double>(n) * num::clipped_entropy(static_cast<double>(k) / static_cast<double>(n)) +
        std::log2(x);
    return std::exp2(std::min(0.0, expo));
}

BitMatrix parse_generator_text(std::istream& in) {
    std::vector<BitVec> rows;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const std::size_t e = line.find_last_not_of(" \t\r");
        const std::string_view body(line.data() + b, e - b + 1);
        if (body.front() == '#') continue;
        rows.push_back(BitVec::from_string(body));
        if (rows.back().size() != rows.front().size())
            throw precondition_error("parse_generator_text: rows of unequal length");
    }
    if (rows.empty()) throw precondition_error("parse_generator_text: no rows");
    return BitMatrix::from_rows(rows);
}

std::string format_generator_text(const BitMatrix& m) {
    std::ostringstream out;
    for (std::int64_t r = 0; r < m.rows(); ++r) out << m.row(r).to_string() << '\n';
    return out.str();
}

} // namespace qkdsec::gf2
