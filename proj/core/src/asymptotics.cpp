#include "qkdsec/asymptotics.hpp"

#include "qkdsec/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qkdsec::asym {

double AsymptoticConfig::slack_at(double p) const {
    if (!slack) throw precondition_error("AsymptoticConfig: slack is unset");
    return slack(p);
}

void AsymptoticConfig::validate() const {
    if (!(r > 0.0 && r < 1.0)) throw precondition_error("AsymptoticConfig: r must lie in (0,1)");
    if (!(p_low >= 0.0 && p_low <= p_high && p_high < 0.5))
        throw precondition_error("AsymptoticConfig: need 0 <= p_low <= p_high < 1/2");
    if (!slack) throw precondition_error("AsymptoticConfig: slack is unset");
    constexpr int grid = 64;
    for (int i = 0; i <= grid; ++i) {
        const double p = p_low + (p_high - p_low) * i / grid;
        const double s = slack(p);
        if (!std::isfinite(s) || s < 0.0)
            throw precondition_error("AsymptoticConfig: slack must be finite and >= 0 on the window");
    }
}

namespace {

struct ScalarMin {
    double x = 0.0;
    double fx = 0.0;
};

// Grid pass (1024 intervals) followed by golden-section refinement of the
// bracket around the best grid point; the final answer is whichever of the
// two is lower, so exact boundary minima survive refinement jitter.
template <typename F>
ScalarMin minimize_scalar(F&& f, double a, double b) {
    if (a == b) return {a, f(a)};
    constexpr int grid = 1024;
    ScalarMin best{a, f(a)};
    for (int i = 1; i <= grid; ++i) {
        const double x = a + (b - a) * i / grid;
        const double fx = f(x);
        if (fx < best.fx) best = {x, fx};
    }
    double lo = std::max(a, best.x - (b - a) / grid);
    double hi = std::min(b, best.x + (b - a) / grid);
    constexpr double invphi = 0.6180339887498949;
    double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > 1e-9) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2);
        }
    }
    const double xm = 0.5 * (lo + hi);
    const double fm = f(xm);
    if (fm < best.fx) best = {xm, fm};
    return best;
}

} // namespace

double normal_limit(const AsymptoticConfig& cfg) {
    cfg.validate();
    const double rr = std::sqrt(cfg.r * (1.0 - cfg.r));
    const auto tail = [&](double p) {
        const double s = cfg.slack_at(p);
        if (s == 0.0) return 0.5;
        const double spread = std::sqrt(p * (1.0 - p));
        if (spread == 0.0) return 0.0;
        return num::gauss_cdf(-rr * s / spread);
    };
    // maximize the tail = minimize its negation
    const ScalarMin m = minimize_scalar([&](double p) { return -tail(p); }, cfg.p_low, cfg.p_high);
    return -m.fx;
}

double solve_delta(std::int64_t n, std::int64_t l, std::int64_t k, double target_eps) {
    if (n < 1 || l < 1 || k <= 0 || k >= l)
        throw domain_error("solve_delta: need n >= 1 and 0 < k < l");
    if (!(target_eps > 0.0 && target_eps < 1.0))
        throw domain_error("solve_delta: target_eps must lie in (0, 1)");
    const double rate = static_cast<double>(k) / static_cast<double>(l);
    return -std::sqrt(static_cast<double>(n + l) / (static_cast<double>(n) * static_cast<double>(l))) *
           std::sqrt(rate * (1.0 - rate)) * num::gauss_quantile(target_eps);
}

double table_statistic(std::int64_t n, std::int64_t l, std::int64_t k, double delta) {
    if (n < 1 || l < 1 || k <= 0 || k >= l)
        throw domain_error("table_statistic: need n >= 1 and 0 < k < l");
    const double rate = static_cast<double>(k) / static_cast<double>(l);
    return -std::sqrt(static_cast<double>(n) * static_cast<double>(l) / static_cast<double>(n + l)) *
           delta / std::sqrt(rate * (1.0 - rate));
}

namespace {

double exponent_objective(double p, double eps, double eps_prime, double r) {
    return num::binary_entropy(p + r * (eps - eps_prime)) -
           (1.0 - r) * num::binary_entropy(p) -
           2.0 * r * num::binary_entropy(p + eps - eps_prime) +
           r * num::binary_entropy(p + eps);
}

} // namespace

ExponentDetail exponent_detail(const AsymptoticConfig& cfg) {
    cfg.validate();
    constexpr int grid = 64;
    for (int i = 0; i <= grid; ++i) {
        const double p = cfg.p_low + (cfg.p_high - cfg.p_low) * i / grid;
        if (!(p + cfg.slack_at(p) < 0.5))
            throw domain_error("exponent: p + slack(p) must stay below 1/2 on the window");
    }
    const auto inner = [&](double p) {
        const double eps = cfg.slack_at(p);
        if (eps == 0.0) return ScalarMin{0.0, 0.0};
        return minimize_scalar(
            [&](double eps_prime) { return exponent_objective(p, eps, eps_prime, cfg.r); }, 0.0, eps);
    };
    const ScalarMin outer =
        minimize_scalar([&](double p) { return inner(p).fx; }, cfg.p_low, cfg.p_high);
    ExponentDetail d;
    d.exponent = outer.fx;
    d.argmin_p = outer.x;
    d.argmin_eps_prime = inner(outer.x).x;
    return d;
}

double exponent(const AsymptoticConfig& cfg) { return exponent_detail(cfg).exponent; }

double epsilon_for_exponent(double E, double r, double p) {
    if (!(E >= 0.0)) throw domain_error("epsilon_for_exponent: E must be >= 0");
    if (!(r > 0.0 && r < 1.0)) throw domain_error("epsilon_for_exponent: r must lie in (0,1)");
    if (!(p > 0.0 && p < 0.5)) throw domain_error("epsilon_for_exponent: p must lie in (0, 1/2)");
    if (E == 0.0) return 0.0;
    const double le = std::numbers::ln2 * E;
    const double num = le * r * (1.0 - 2.0 * p) +
                       std::sqrt(le * le * r * r + 4.0 * p * (1.0 - p) * r * (1.0 - r) * le);
    return num / (2.0 * (r * (1.0 - r) + le * r * r));
}

double large_deviation_bound(const bounds::ProtocolParams& params,
                             const AsymptoticConfig& cfg, double E) {
    if (!(E >= 0.0)) throw domain_error("large_deviation_bound: E must be >= 0");
    cfg.validate();
    if (params.n < 1 || params.l < 1 || params.k_high < 0)
        throw precondition_error("large_deviation_bound: invalid sizes");
    const double r_actual = static_cast<double>(params.n) / static_cast<double>(params.n + params.l);
    if (std::abs(r_actual - cfg.r) > 1e-9)
        throw precondition_error("large_deviation_bound: params and cfg disagree on the check fraction");
    const double key_len =
        static_cast<double>(params.n) *
        (params.rate_R - num::binary_entropy(cfg.p_low + cfg.slack_at(cfg.p_low)));
    if (!(key_len > 0.0))
        throw precondition_error("large_deviation_bound: key length at p_low must be positive");
    const double decay = std::exp2(-static_cast<double>(params.n + params.l) * E);
    const double coef = static_cast<double>(params.k_high) * static_cast<double>(params.n + params.l + 1);
    return coef * key_len * decay + num::clipped_entropy(coef * decay);
}

std::vector<double> exponent_convergence_check(
    std::span<const bounds::ProtocolParams> family, const AsymptoticConfig& cfg) {
    cfg.validate();
    std::vector<double> out;
    out.reserve(family.size());
    for (const bounds::ProtocolParams& p : family) {
        const double r_actual = static_cast<double>(p.n) / static_cast<double>(p.n + p.l);
        if (std::abs(r_actual - cfg.r) > 1e-9)
            throw precondition_error("exponent_convergence_check: family member breaks the check fraction");
        const double l = static_cast<double>(p.l);
        if (p.k_high != std::llround(cfg.p_high * l) || p.k_low != std::llround(cfg.p_low * l))
            throw precondition_error("exponent_convergence_check: thresholds drift from the window rates");
        if (std::abs(p.delta_at(p.k_high) - cfg.slack_at(static_cast<double>(p.k_high) / l)) > 1e-12)
            throw precondition_error("exponent_convergence_check: slack disagrees with the config");
        const double total = bounds::total_information_bound(p).total_bound;
        out.push_back(-cfg.r / static_cast<double>(p.n) * std::log2(total));
    }
    return out;
}

double baseline_bound(std::int64_t n, double eps_p, double err_prob) {
    if (n < 1) throw precondition_error("baseline_bound: n must be >= 1");
    if (!(eps_p > 0.0)) throw domain_error("baseline_bound: eps_p must be positive");
    if (!(err_prob >= 0.0 && err_prob <= 1.0))
        throw domain_error("baseline_bound: err_prob must lie in [0,1]");
    const double nn = static_cast<double>(n);
    const double half_sq = (nn / 2.0 + 1.0) * (nn / 2.0 + 1.0);
    const double succ_sq = (nn + 1.0) * (nn + 1.0);
    const double tail = std::exp(-eps_p * eps_p * nn / 4.0);
    const double arg = 2.0 * half_sq * err_prob + 4.0 * succ_sq * tail;
    return num::clipped_entropy(arg) + 4.0 * nn * half_sq * err_prob + 8.0 * nn * succ_sq * tail;
}

} // namespace qkdsec::asym
