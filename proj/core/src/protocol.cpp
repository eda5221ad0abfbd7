#include "qkdsec/protocol.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "qkdsec/error.hpp"
#include "qkdsec/numerics.hpp"

namespace qkdsec::sim {

namespace {

constexpr std::uint64_t kSeedStride = 0x9e3779b97f4a7c15ull;

// Marks `count` positions of [0, pool) chosen uniformly without replacement.
std::vector<char> sample_check_mask(std::int64_t pool, std::int64_t count, Rng& rng) {
    std::vector<std::int64_t> idx(static_cast<std::size_t>(pool));
    std::iota(idx.begin(), idx.end(), std::int64_t{0});
    for (std::int64_t i = 0; i < count; ++i) {
        const std::int64_t j = i + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(pool - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    std::vector<char> mask(static_cast<std::size_t>(pool), 0);
    for (std::int64_t i = 0; i < count; ++i) mask[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = 1;
    return mask;
}

std::int64_t count_marked_errors(const gf2::BitVec& noise, const std::vector<char>& mask) {
    std::int64_t k = 0;
    for (std::int64_t i = 0; i < noise.size(); ++i)
        if (mask[static_cast<std::size_t>(i)] && noise.get(i)) ++k;
    return k;
}

gf2::BitVec gather(const gf2::BitVec& v, const std::vector<std::int64_t>& positions) {
    gf2::BitVec out(static_cast<std::int64_t>(positions.size()));
    for (std::size_t i = 0; i < positions.size(); ++i)
        if (v.get(positions[i])) out.set(static_cast<std::int64_t>(i), true);
    return out;
}

// Packed-word helpers for the exhaustive decoder (length <= 24 guaranteed).
bool pattern_better(std::uint64_t a, std::uint64_t b) {
    const int wa = std::popcount(a), wb = std::popcount(b);
    if (wa != wb) return wa < wb;
    if (a == b) return false;
    const int idx = std::countr_zero(a ^ b);
    return ((a >> idx) & 1ull) == 0;
}

gf2::BitVec exhaustive_decode(const gf2::BinaryCode& code, const gf2::BitVec& received) {
    const std::int64_t m = code.dimension();
    const std::uint64_t y = received.to_u64();
    std::vector<std::uint64_t> rows(static_cast<std::size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) rows[static_cast<std::size_t>(i)] = code.generator.row(i).to_u64();

    std::uint64_t best_msg = 0;
    std::uint64_t best_pattern = y;  // message 0, codeword 0
    std::uint64_t cw = 0;
    for (std::uint64_t i = 1; i < (std::uint64_t{1} << m); ++i) {
        cw ^= rows[static_cast<std::size_t>(std::countr_zero(i))];  // Gray-order codeword walk
        const std::uint64_t msg = i ^ (i >> 1);
        const std::uint64_t pattern = y ^ cw;
        if (pattern_better(pattern, best_pattern)) {
            best_pattern = pattern;
            best_msg = msg;
        }
    }
    gf2::BitVec out(m);
    for (std::int64_t b = 0; b < m; ++b)
        if ((best_msg >> b) & 1ull) out.set(b, true);
    return out;
}

// Syndrome -> error position for the systematic [7,4] block layout; 0 means
// a clean block.
constexpr int kHammingFlip[8] = {-1, 4, 5, 0, 6, 1, 2, 3};

gf2::BitVec hamming_decode(const gf2::BitVec& received) {
    const std::int64_t blocks = received.size() / 7;
    gf2::BitVec out(blocks * 4);
    for (std::int64_t b = 0; b < blocks; ++b) {
        const std::int64_t base = 7 * b;
        int y[7];
        for (int i = 0; i < 7; ++i) y[i] = received.get(base + i) ? 1 : 0;
        const int s4 = y[4] ^ y[0] ^ y[1] ^ y[3];
        const int s5 = y[5] ^ y[0] ^ y[2] ^ y[3];
        const int s6 = y[6] ^ y[1] ^ y[2] ^ y[3];
        const int flip = kHammingFlip[s4 | (s5 << 1) | (s6 << 2)];
        if (flip >= 0) y[flip] ^= 1;
        for (int i = 0; i < 4; ++i)
            if (y[i]) out.set(4 * b + i, true);
    }
    return out;
}

// Canonical coset labels of F_2^m modulo the hashed-away subcode: reduce by
// the subcode's echelon rows, then read off the non-pivot coordinates.
struct CosetLabeler {
    gf2::BitMatrix rows;
    std::vector<std::int64_t> pivots;
    std::vector<std::int64_t> free_cols;

    explicit CosetLabeler(const gf2::BinaryCode& sub) : rows(sub.generator) {
        pivots = gf2::to_rref(rows);
        std::vector<char> is_pivot(static_cast<std::size_t>(sub.length_n), 0);
        for (auto p : pivots) is_pivot[static_cast<std::size_t>(p)] = 1;
        for (std::int64_t j = 0; j < sub.length_n; ++j)
            if (!is_pivot[static_cast<std::size_t>(j)]) free_cols.push_back(j);
    }

    gf2::BitVec label(gf2::BitVec v) const {
        for (std::size_t i = 0; i < pivots.size(); ++i)
            if (v.get(pivots[i])) v ^= rows.row(static_cast<std::int64_t>(i));
        gf2::BitVec out(static_cast<std::int64_t>(free_cols.size()));
        for (std::size_t i = 0; i < free_cols.size(); ++i)
            if (v.get(free_cols[i])) out.set(static_cast<std::int64_t>(i), true);
        return out;
    }
};

}  // namespace

void SimConfig::validate() const {
    if (n_plus < 1 || l_plus < 1 || n_times < 1 || l_times < 1)
        throw precondition_error("SimConfig: all four sizes must be positive");
    if (repeat_a < 1) throw precondition_error("SimConfig: repeat_a must be >= 1");
    if (!(channel_p_bit >= 0.0 && channel_p_bit <= 1.0) ||
        !(channel_p_phase >= 0.0 && channel_p_phase <= 1.0))
        throw precondition_error("SimConfig: channel probabilities must lie in [0, 1]");
    if (code_c1.length_n != n_plus)
        throw precondition_error("SimConfig: code length must equal n_plus");
    if (params.n != n_plus || params.l != l_times)
        throw precondition_error("SimConfig: params (n, l) must equal (n_plus, l_times)");
    params.validate();
    switch (decoder) {
        case DecoderKind::exhaustive:
            if (n_plus > 24) throw precondition_error("SimConfig: exhaustive decoder capped at length 24");
            break;
        case DecoderKind::hamming_blocks: {
            if (n_plus % 7 != 0)
                throw precondition_error("SimConfig: hamming_blocks needs length divisible by 7");
            const auto reference = gf2::BinaryCode::hamming74_blocks(n_plus / 7);
            if (!(code_c1.generator == reference.generator))
                throw precondition_error("SimConfig: hamming_blocks decoder needs the block generator");
            break;
        }
    }
}

gf2::BitVec decode_message(const gf2::BinaryCode& code, DecoderKind kind,
                           const gf2::BitVec& received) {
    if (received.size() != code.length_n)
        throw precondition_error("decode_message: word length must match the code");
    switch (kind) {
        case DecoderKind::exhaustive:
            if (code.length_n > 24)
                throw precondition_error("decode_message: exhaustive decoder capped at length 24");
            return exhaustive_decode(code, received);
        case DecoderKind::hamming_blocks:
            if (code.length_n % 7 != 0)
                throw precondition_error("decode_message: hamming_blocks needs length divisible by 7");
            return hamming_decode(received);
    }
    throw precondition_error("decode_message: unknown decoder");
}

std::vector<RunTranscript> simulate_modified(const SimConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);

    const std::int64_t a = cfg.repeat_a;
    const std::int64_t pool_plus = a * cfg.n_plus + cfg.l_plus;
    const std::int64_t pool_times = a * cfg.n_times + cfg.l_times;

    const gf2::BitVec alice_plus = gf2::random_bitvec(pool_plus, rng);
    const gf2::BitVec noise_plus = gf2::bernoulli_bitvec(pool_plus, cfg.channel_p_bit, rng);
    const gf2::BitVec noise_times = gf2::bernoulli_bitvec(pool_times, cfg.channel_p_phase, rng);

    const auto check_plus = sample_check_mask(pool_plus, cfg.l_plus, rng);
    const auto check_times = sample_check_mask(pool_times, cfg.l_times, rng);

    RunTranscript shared;
    shared.k_plus = count_marked_errors(noise_plus, check_plus);
    shared.k_times = count_marked_errors(noise_times, check_times);
    shared.aborted_times = shared.k_plus > cfg.params.k_high;
    shared.aborted_plus = shared.k_times > cfg.params.k_high;
    shared.replaced_low = shared.k_times < cfg.params.k_low;

    if (shared.aborted_plus)
        return std::vector<RunTranscript>(static_cast<std::size_t>(a), shared);

    const std::int64_t k_eff = std::max(shared.k_times, cfg.params.k_low);
    const std::int64_t m = cfg.code_c1.dimension();
    const double arg = static_cast<double>(k_eff) / static_cast<double>(cfg.l_times) +
                       cfg.params.delta_at(k_eff);
    const std::int64_t s =
        static_cast<std::int64_t>(std::ceil(static_cast<double>(cfg.n_plus) * num::binary_entropy(arg)));
    shared.key_len = m - s;
    if (shared.key_len < 0) {
        shared.abort_reason = "hash dimension exceeds the code dimension";
        return std::vector<RunTranscript>(static_cast<std::size_t>(a), shared);
    }

    std::vector<std::int64_t> raw_positions;
    raw_positions.reserve(static_cast<std::size_t>(a * cfg.n_plus));
    for (std::int64_t i = 0; i < pool_plus; ++i)
        if (!check_plus[static_cast<std::size_t>(i)]) raw_positions.push_back(i);

    std::vector<RunTranscript> out;
    out.reserve(static_cast<std::size_t>(a));
    for (std::int64_t round = 0; round < a; ++round) {
        RunTranscript t = shared;

        const std::vector<std::int64_t> slice(
            raw_positions.begin() + static_cast<std::ptrdiff_t>(round * cfg.n_plus),
            raw_positions.begin() + static_cast<std::ptrdiff_t>((round + 1) * cfg.n_plus));
        const gf2::BitVec x_alice = gather(alice_plus, slice);
        const gf2::BitVec n_slice = gather(noise_plus, slice);
        const gf2::BitVec x_bob = x_alice ^ n_slice;

        const gf2::BitVec z = gf2::random_bitvec(m, rng);
        const gf2::BitVec pad = cfg.code_c1.encode(z) ^ x_alice;
        const gf2::BitVec received = pad ^ x_bob;
        if (!(received == (cfg.code_c1.encode(z) ^ n_slice)))
            throw std::logic_error("simulate: one-time-pad channel equivalence violated");

        const gf2::BitVec z_bob = decode_message(cfg.code_c1, cfg.decoder, received);

        const gf2::BinaryCode hashed = gf2::sample_subcode(m, s, rng);
        const CosetLabeler labeler(hashed);
        t.alice_key = labeler.label(z);
        t.bob_key = labeler.label(z_bob);
        t.agree = t.alice_key == t.bob_key;
        out.push_back(std::move(t));
    }
    return out;
}

RunTranscript simulate_run(const SimConfig& cfg) {
    if (cfg.repeat_a != 1)
        throw precondition_error("simulate_run: repeat_a must be 1; use simulate_modified");
    return simulate_modified(cfg).front();
}

BatchSummary simulate_batch(const SimConfig& cfg, std::int64_t runs) {
    if (runs < 1) throw precondition_error("simulate_batch: runs must be >= 1");
    cfg.validate();

    BatchSummary b;
    b.runs = runs;
    b.k_plus_hist.assign(static_cast<std::size_t>(cfg.l_plus) + 1, 0);
    b.k_times_hist.assign(static_cast<std::size_t>(cfg.l_times) + 1, 0);

    std::int64_t aborted = 0, producing = 0, agreeing = 0;
    double key_len_sum = 0.0;
    for (std::int64_t i = 0; i < runs; ++i) {
        SimConfig run_cfg = cfg;
        run_cfg.seed = splitmix64(cfg.seed + kSeedStride * static_cast<std::uint64_t>(i + 1));
        const auto transcripts = simulate_modified(run_cfg);

        const auto& first = transcripts.front();
        ++b.k_plus_hist[static_cast<std::size_t>(first.k_plus)];
        ++b.k_times_hist[static_cast<std::size_t>(first.k_times)];
        if (first.aborted_plus) ++aborted;

        for (const auto& t : transcripts) {
            ++b.transcripts;
            if (t.aborted_plus || !t.abort_reason.empty()) continue;
            ++producing;
            if (t.agree) ++agreeing;
            key_len_sum += static_cast<double>(t.key_len);
        }
    }
    b.abort_rate = static_cast<double>(aborted) / static_cast<double>(runs);
    if (producing > 0) {
        b.agreement_rate = static_cast<double>(agreeing) / static_cast<double>(producing);
        b.mean_key_len = key_len_sum / static_cast<double>(producing);
    }
    return b;
}

double attach_bound(const RunTranscript& t, const bounds::ProtocolParams& params) {
    if (t.aborted_plus || !t.abort_reason.empty())
        throw precondition_error("attach_bound: transcript aborted");
    const std::int64_t k_eff = std::max(t.k_times, params.k_low);
    if (k_eff > params.k_high)
        throw precondition_error("attach_bound: observed count exceeds the threshold");
    bounds::ProtocolParams collapsed = params;
    collapsed.k_low = k_eff;
    collapsed.k_high = k_eff;
    return bounds::total_information_bound(collapsed).total_bound;
}

}  // namespace qkdsec::sim
