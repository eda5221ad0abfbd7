#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qkdsec/error.hpp"
#include "qkdsec/secbounds.hpp"

namespace qkdsec::asym {

// Asymptotic regime descriptor: check fraction r = n/(n+l), an anticipated
// error-rate window [p_low, p_high], and the statistical slack granted on
// top of the anticipated rate, as a function of it.
struct AsymptoticConfig {
    double r = 0.0;
    double p_low = 0.0;
    double p_high = 0.0;
    std::function<double(double)> slack;

    double slack_at(double p) const;
    // r in (0,1); 0 <= p_low <= p_high < 1/2; slack finite and >= 0 on a
    // sampled grid over the window.
    void validate() const;
};

// Limiting security level when block sizes grow at fixed composition: the
// worst case over the window of the Gaussian tail
// Phi(-sqrt(r(1-r)) * slack(p) / sqrt(p(1-p))), resolved to 1e-6 absolute.
double normal_limit(const AsymptoticConfig& cfg);

// Slack that puts the standardized check statistic at tail mass target_eps:
// -sqrt((n+l)/(n l)) * sqrt(k/l (1-k/l)) * gauss_quantile(target_eps).
double solve_delta(std::int64_t n, std::int64_t l, std::int64_t k, double target_eps);

// The standardized statistic itself: -sqrt(n l/(n+l)) * delta / sqrt(k/l (1-k/l));
// gauss_cdf of it is the attained security level.
double table_statistic(std::int64_t n, std::int64_t l, std::int64_t k, double delta);

struct ExponentDetail {
    double exponent = 0.0;
    double argmin_p = 0.0;
    double argmin_eps_prime = 0.0;
};

// Asymptotic decay exponent (bits per transmitted qubit) of the total
// information bound: minimum over p in the window and eps' in [0, slack(p)]
// of h(p + r(eps-eps')) - (1-r)h(p) - 2r h(p+eps-eps') + r h(p+eps), with
// eps = slack(p). Grid pass plus golden-section refinement to 1e-9.
double exponent(const AsymptoticConfig& cfg);
ExponentDetail exponent_detail(const AsymptoticConfig& cfg);

// Slack achieving target exponent E at rate p in the quadratic regime:
// ((ln2)E r(1-2p) + sqrt((ln2)^2 E^2 r^2 + 4p(1-p) r(1-r)(ln2)E))
//   / (2(r(1-r) + (ln2)E r^2)).
// As E -> 0 it approaches sqrt(p(1-p))/sqrt(r(1-r)) * sqrt((ln2)E).
double epsilon_for_exponent(double E, double r, double p);

// Explicit finite-size bound assembled from an exponent E: with
// d = 2^{-(n+l)E},
//   k_high (n+l+1) n(R - h(p_low + slack(p_low))) d
//   + clipped_entropy(k_high (n+l+1) d).
// Requires a positive key length at p_low and n/(n+l) matching cfg.r.
double large_deviation_bound(const bounds::ProtocolParams& params,
                             const AsymptoticConfig& cfg, double E);

// (-r/n) log2(total_information_bound) for each member of a family sharing
// the composition (r, p_low, p_high, slack) with growing n; the sequence
// approaches exponent(cfg) from below.
std::vector<double> exponent_convergence_check(
    std::span<const bounds::ProtocolParams> family, const AsymptoticConfig& cfg);

// Reference guarantee this toolkit is compared against: with e = err_prob,
//   clipped_entropy(2(n/2+1)^2 e + 4(n+1)^2 exp(-eps_p^2 n/4))
//   + 4n(n/2+1)^2 e + 8n(n+1)^2 exp(-eps_p^2 n/4).
// The exponential terms are base-e by construction.
double baseline_bound(std::int64_t n, double eps_p, double err_prob);

} // namespace qkdsec::asym
