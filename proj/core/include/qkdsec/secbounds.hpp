#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qkdsec/error.hpp"

namespace qkdsec::bounds {

// Finite-size parameter set for one key-distillation direction: n raw bits
// protected by an [n, nR] code, l sampled check bits, an acceptance window
// [k_low, k_high] on the observed check-error count, and a statistical slack
// delta(k) added to the observed rate for every count in the window.
struct ProtocolParams {
    std::int64_t n = 0;
    std::int64_t l = 0;
    double rate_R = 0.0;
    std::int64_t k_low = 0;
    std::int64_t k_high = 0;
    std::function<double(std::int64_t)> delta;

    double delta_at(std::int64_t k) const;
    // n * (rate_R - h(k/l + delta(k))), the key length paid for by count k.
    double key_length(std::int64_t k) const;
    // Throws precondition_error on any violated constraint. Checks, for every
    // k in the window: delta finite and >= 0, k/l + delta(k) <= 1, and
    // key_length(k) >= 0; plus 1 <= l, 1 <= n, 0 <= k_low <= k_high <= l,
    // 2*k_high < n, and rate_R in [0, 1].
    void validate() const;
};

struct BoundReport {
    double total_bound = 0.0;     // term1 + term2
    double term1 = 0.0;           // clipped entropy of the worst-case mass
    double term2 = 0.0;           // worst-case key-length-weighted mass
    double max_mass = 0.0;        // the worst-case mass itself
    std::optional<double> per_bit_bound; // set when key_length(k_high) > 0
    std::int64_t argmax_j_term1 = 0;
    std::int64_t argmax_j_term2 = 0;
};

// Smoothing factor applied to the hypergeometric tail: 0 for k_prime < 0,
// min(2^{n(h(k_prime/n) - h(k/l + delta))}, 1) for 0 <= k_prime < n/2, and 1
// from n/2 on. Requires k/l + delta in [0, 1].
double f_factor(std::int64_t k_prime, std::int64_t k, std::int64_t n, std::int64_t l,
                double delta);

// Security bound on the total leaked information of the distilled key.
// Scans every population error count j once, accumulating for each the
// f-weighted hypergeometric mass over the acceptance window (counts at or
// below k_low share the k_low smoothing) and its key-length-weighted
// companion; the two maxima are taken independently.
BoundReport total_information_bound(const ProtocolParams& p);

// Per-key-bit variant: term1 / key_length(k_high) + max_mass. Requires a
// strictly positive key length at k_high.
BoundReport per_bit_information_bound(const ProtocolParams& p);

// The f-weighted mass and its weighted companion for every j in [0, n+l];
// diagnostic view of the scan behind the two bounds above.
struct MassProfile {
    std::vector<double> mass;
    std::vector<double> weighted;
};
MassProfile information_mass_profile(const ProtocolParams& p);

// Leakage bound when the phase-error weight distribution of the channel is
// known: eta_{m-s} applied to the g-factor average of `phase_weights`, whose
// index k runs over phase-error weights 0..n (n inferred from the size).
// Extracting m raw key bits and sacrificing s of them.
double known_channel_bound(std::int64_t m, std::int64_t s,
                           std::span<const double> phase_weights);

// Turns a bound on the ensemble-average leakage into one that holds with
// probability 1 - eps2 over the ensemble draw: min(avg_bound / eps2, 1).
double probabilistic_guarantee(double avg_bound, double eps2);

} // namespace qkdsec::bounds
