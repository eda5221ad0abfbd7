#include "qkdsec/secbounds.hpp"

#include "qkdsec/gf2.hpp"
#include "qkdsec/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qkdsec::bounds {

double ProtocolParams::delta_at(std::int64_t k) const {
    if (!delta) throw precondition_error("ProtocolParams: delta is unset");
    return delta(k);
}

double ProtocolParams::key_length(std::int64_t k) const {
    const double arg = static_cast<double>(k) / static_cast<double>(l) + delta_at(k);
    return static_cast<double>(n) * (rate_R - num::binary_entropy(arg));
}

void ProtocolParams::validate() const {
    if (n < 1 || l < 1) throw precondition_error("ProtocolParams: need n >= 1 and l >= 1");
    if (k_low < 0 || k_low > k_high || k_high > l)
        throw precondition_error("ProtocolParams: window must satisfy 0 <= k_low <= k_high <= l");
    if (2 * k_high >= n)
        throw precondition_error("ProtocolParams: window top must stay below n/2");
    if (!(rate_R >= 0.0 && rate_R <= 1.0))
        throw precondition_error("ProtocolParams: rate must lie in [0,1]");
    if (!delta) throw precondition_error("ProtocolParams: delta is unset");
    for (std::int64_t k = k_low; k <= k_high; ++k) {
        const double d = delta(k);
        if (!std::isfinite(d) || d < 0.0)
            throw precondition_error("ProtocolParams: delta must be finite and >= 0 on the window");
        const double arg = static_cast<double>(k) / static_cast<double>(l) + d;
        if (arg > 1.0)
            throw precondition_error("ProtocolParams: k/l + delta(k) exceeds 1 on the window");
        if (key_length(k) < 0.0)
            throw precondition_error("ProtocolParams: negative key length on the window");
    }
}

double f_factor(std::int64_t k_prime, std::int64_t k, std::int64_t n, std::int64_t l,
                double delta) {
    if (n < 1 || l < 1) throw precondition_error("f_factor: need n >= 1 and l >= 1");
    if (k < 0 || k > l) throw precondition_error("f_factor: need 0 <= k <= l");
    const double arg = static_cast<double>(k) / static_cast<double>(l) + delta;
    if (!(arg >= 0.0 && arg <= 1.0)) throw domain_error("f_factor: k/l + delta must lie in [0,1]");
    if (k_prime < 0) return 0.0;
    if (2 * k_prime >= n) return 1.0;
    const double expo = static_cast<double>(n) *
                        (num::binary_entropy(static_cast<double>(k_prime) / static_cast<double>(n)) -
                         num::binary_entropy(arg));
    return std::exp2(std::min(0.0, expo));
}

namespace {

struct ScanResult {
    double max_mass = -1.0;
    std::int64_t arg_mass = 0;
    double max_weighted = -1.0;
    std::int64_t arg_weighted = 0;
};

// One pass over the population error count j in [0, n+l]. For each j the
// mass sums the hypergeometric pmf over the acceptance window, each count
// carrying its smoothing factor (counts at or below k_low share k_low's);
// the weighted companion additionally carries the per-count key length.
ScanResult run_scan(const ProtocolParams& p, MassProfile* profile) {
    const std::int64_t n = p.n, l = p.l;
    constexpr double inv_ln2 = 1.0 / std::numbers::ln2;

    std::vector<double> lgfact(static_cast<std::size_t>(n + l) + 1);
    for (std::int64_t i = 0; i <= n + l; ++i)
        lgfact[static_cast<std::size_t>(i)] = std::lgamma(static_cast<double>(i) + 1.0);
    const auto log2_choose = [&](std::int64_t m, std::int64_t r) {
        return (lgfact[static_cast<std::size_t>(m)] - lgfact[static_cast<std::size_t>(r)] -
                lgfact[static_cast<std::size_t>(m - r)]) *
               inv_ln2;
    };

    std::vector<double> h_window(static_cast<std::size_t>(p.k_high) + 1, 0.0);
    std::vector<double> key_len(static_cast<std::size_t>(p.k_high) + 1, 0.0);
    for (std::int64_t k = p.k_low; k <= p.k_high; ++k) {
        const double arg = static_cast<double>(k) / static_cast<double>(l) + p.delta_at(k);
        h_window[static_cast<std::size_t>(k)] = num::binary_entropy(arg);
        key_len[static_cast<std::size_t>(k)] =
            static_cast<double>(n) * (p.rate_R - h_window[static_cast<std::size_t>(k)]);
    }
    std::vector<double> h_frac(static_cast<std::size_t>(n) + 1);
    for (std::int64_t i = 0; i <= n; ++i)
        h_frac[static_cast<std::size_t>(i)] =
            num::binary_entropy(static_cast<double>(i) / static_cast<double>(n));

    std::vector<double> lg_l(static_cast<std::size_t>(p.k_high) + 1);
    for (std::int64_t k = 0; k <= p.k_high; ++k) lg_l[static_cast<std::size_t>(k)] = log2_choose(l, k);
    std::vector<double> lg_n(static_cast<std::size_t>(n) + 1);
    for (std::int64_t i = 0; i <= n; ++i) lg_n[static_cast<std::size_t>(i)] = log2_choose(n, i);
    std::vector<double> lg_nl(static_cast<std::size_t>(n + l) + 1);
    for (std::int64_t j = 0; j <= n + l; ++j) lg_nl[static_cast<std::size_t>(j)] = log2_choose(n + l, j);

    const auto smoothing = [&](std::int64_t k_prime, std::int64_t k) -> double {
        if (k_prime < 0) return 0.0;
        if (2 * k_prime >= n) return 1.0;
        const double expo = static_cast<double>(n) * (h_frac[static_cast<std::size_t>(k_prime)] -
                                                      h_window[static_cast<std::size_t>(k)]);
        return std::exp2(std::min(0.0, expo));
    };

    ScanResult out;
    if (profile) {
        profile->mass.reserve(static_cast<std::size_t>(n + l) + 1);
        profile->weighted.reserve(static_cast<std::size_t>(n + l) + 1);
    }
    for (std::int64_t j = 0; j <= n + l; ++j) {
        const double lg_total = lg_nl[static_cast<std::size_t>(j)];
        const auto pmf = [&](std::int64_t k) {
            return std::exp2(lg_l[static_cast<std::size_t>(k)] +
                             lg_n[static_cast<std::size_t>(j - k)] - lg_total);
        };
        double mass = 0.0, weighted = 0.0;

        const double f_low = smoothing(j - p.k_low, p.k_low);
        if (f_low > 0.0) {
            double cdf = 0.0;
            const std::int64_t hi = std::min(p.k_low, j);
            for (std::int64_t k = std::max<std::int64_t>(0, j - n); k <= hi; ++k) cdf += pmf(k);
            mass += cdf * f_low;
            weighted += cdf * f_low * key_len[static_cast<std::size_t>(p.k_low)];
        }
        const std::int64_t lo = std::max(p.k_low + 1, j - n);
        const std::int64_t hi = std::min(p.k_high, j);
        for (std::int64_t k = lo; k <= hi; ++k) {
            const double f = smoothing(j - k, k);
            if (f == 0.0) continue;
            const double m = pmf(k) * f;
            mass += m;
            weighted += m * key_len[static_cast<std::size_t>(k)];
        }

        if (profile) {
            profile->mass.push_back(mass);
            profile->weighted.push_back(weighted);
        }
        if (mass > out.max_mass) {
            out.max_mass = mass;
            out.arg_mass = j;
        }
        if (weighted > out.max_weighted) {
            out.max_weighted = weighted;
            out.arg_weighted = j;
        }
    }
    return out;
}

BoundReport report_from(const ProtocolParams& p, const ScanResult& sc) {
    BoundReport r;
    r.max_mass = sc.max_mass;
    r.term1 = num::clipped_entropy(sc.max_mass);
    r.term2 = sc.max_weighted;
    r.total_bound = r.term1 + r.term2;
    r.argmax_j_term1 = sc.arg_mass;
    r.argmax_j_term2 = sc.arg_weighted;
    const double kl_top = p.key_length(p.k_high);
    if (kl_top > 0.0) r.per_bit_bound = r.term1 / kl_top + sc.max_mass;
    return r;
}

} // namespace

BoundReport total_information_bound(const ProtocolParams& p) {
    p.validate();
    return report_from(p, run_scan(p, nullptr));
}

BoundReport per_bit_information_bound(const ProtocolParams& p) {
    p.validate();
    if (!(p.key_length(p.k_high) > 0.0))
        throw precondition_error("per_bit_information_bound: key length at k_high must be positive");
    return report_from(p, run_scan(p, nullptr));
}

MassProfile information_mass_profile(const ProtocolParams& p) {
    p.validate();
    MassProfile profile;
    run_scan(p, &profile);
    return profile;
}

double known_channel_bound(std::int64_t m, std::int64_t s,
                           std::span<const double> phase_weights) {
    if (phase_weights.size() < 2)
        throw precondition_error("known_channel_bound: weights must cover counts 0..n with n >= 1");
    const std::int64_t n = static_cast<std::int64_t>(phase_weights.size()) - 1;
    if (m < 1 || s < 0 || s > m || m > n)
        throw precondition_error("known_channel_bound: need 0 <= s <= m <= n");
    double sum = 0.0;
    for (const double w : phase_weights) {
        if (!(w >= 0.0)) throw domain_error("known_channel_bound: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw precondition_error("known_channel_bound: weights must sum to 1");

    const double x = std::exp2(-static_cast<double>(s));
    double avg = 0.0;
    for (std::int64_t k = 0; k <= n; ++k)
        avg += phase_weights[static_cast<std::size_t>(k)] * gf2::g_factor(x, n, k);
    return num::eta(m - s, avg);
}

double probabilistic_guarantee(double avg_bound, double eps2) {
    if (!(avg_bound >= 0.0)) throw domain_error("probabilistic_guarantee: average bound must be >= 0");
    if (!(eps2 > 0.0)) throw domain_error("probabilistic_guarantee: eps2 must be positive");
    return std::min(avg_bound / eps2, 1.0);
}

} // namespace qkdsec::bounds
