#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qkdsec/gf2.hpp"
#include "qkdsec/rng.hpp"
#include "qkdsec/secbounds.hpp"

namespace qkdsec::sim {

enum class DecoderKind {
    exhaustive,      // nearest codeword by full message scan; length <= 24
    hamming_blocks,  // per-block [7,4] syndrome correction
};

// One prepare-measure session: pooled raw+check strings in two bases,
// i.i.d. bit flips at channel_p_bit on the key basis and channel_p_phase on
// the conjugate one. params supplies thresholds, slack and the rate used by
// bound annotations; its (n, l) must equal (n_plus, l_times).
struct SimConfig {
    bounds::ProtocolParams params;
    std::int64_t n_plus = 0;
    std::int64_t l_plus = 0;
    std::int64_t n_times = 0;
    std::int64_t l_times = 0;
    std::int64_t repeat_a = 1;  // 1 = base protocol
    double channel_p_bit = 0.0;
    double channel_p_phase = 0.0;
    gf2::BinaryCode code_c1;
    DecoderKind decoder = DecoderKind::exhaustive;
    std::uint64_t seed = 0;

    void validate() const;
};

// Keys are empty whenever the run aborted (threshold trip on the conjugate
// basis) or the configuration yields a negative key length, in which case
// abort_reason says why and key_len keeps the honest m - s value.
struct RunTranscript {
    std::int64_t k_plus = 0;
    std::int64_t k_times = 0;
    bool aborted_plus = false;   // conjugate-basis count exceeded the threshold
    bool aborted_times = false;  // key-basis count exceeded the threshold
    bool replaced_low = false;   // observed count lifted to the lower clamp
    std::int64_t key_len = 0;
    gf2::BitVec alice_key;
    gf2::BitVec bob_key;
    bool agree = true;
    std::string abort_reason;
};

// Draw order, fixed for reproducibility: sender raw pool, key-basis noise,
// conjugate-basis noise, key-basis check positions, conjugate check
// positions, then per round the one-time-pad message and the hashing
// subcode. Identical seeds give identical transcripts.
RunTranscript simulate_run(const SimConfig& cfg);  // requires repeat_a == 1

// One estimation phase over pools of a*n + l positions per basis, then `a`
// post-processing rounds sharing the single (k_plus, k_times) estimate.
// Accepts repeat_a == 1, where it reproduces simulate_run exactly.
std::vector<RunTranscript> simulate_modified(const SimConfig& cfg);

struct BatchSummary {
    std::int64_t runs = 0;
    std::int64_t transcripts = 0;
    double abort_rate = 0.0;       // fraction of runs that tripped the abort
    double agreement_rate = 0.0;   // among key-producing transcripts; 0 if none
    double mean_key_len = 0.0;     // among key-producing transcripts; 0 if none
    std::vector<std::int64_t> k_plus_hist;   // one increment per run
    std::vector<std::int64_t> k_times_hist;  // one increment per run
};

// Aggregates `runs` independent sessions; run i is seeded by the i-th value
// of the splitmix64 stream started at cfg.seed, so aggregation order is
// immaterial.
BatchSummary simulate_batch(const SimConfig& cfg, std::int64_t runs);

// Security annotation for a realized transcript: the total leakage bound
// with both thresholds collapsed onto the observed (clamped) conjugate
// count. Throws on aborted transcripts.
double attach_bound(const RunTranscript& t, const bounds::ProtocolParams& params);

// Decode `received` to a message of `code`. Exhaustive decoding prefers the
// lowest-weight noise pattern, ties broken toward the lexicographically
// smallest one.
gf2::BitVec decode_message(const gf2::BinaryCode& code, DecoderKind kind,
                           const gf2::BitVec& received);

}  // namespace qkdsec::sim
