#include "qkdsec/numerics.hpp"

#include <cmath>
#include <numbers>

namespace qkdsec::num {

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("binary_entropy: p must lie in [0,1]");
    const double q = p <= 0.5 ? p : 1.0 - p; // 1-p exact for p in [1/2, 1]
    if (q == 0.0) return 0.0;
    return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

double clipped_entropy(double x) {
    if (!(x >= 0.0)) throw domain_error("clipped_entropy: x must be >= 0");
    if (x >= 0.5) return 1.0;
    return binary_entropy(x);
}

double eta(std::int64_t k, double x) {
    if (k < 0) throw domain_error("eta: k must be >= 0");
    return clipped_entropy(x) + static_cast<double>(k) * x;
}

double kl_bernoulli(double p, double q) {
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("kl_bernoulli: p must lie in [0,1]");
    if (!(q >= 0.0 && q <= 1.0)) throw domain_error("kl_bernoulli: q must lie in [0,1]");
    if (q == 0.0 || q == 1.0) {
        if (p == q) return 0.0;
        throw domain_error("kl_bernoulli: divergence infinite at q in {0,1}");
    }
    double d = 0.0;
    if (p > 0.0) d += p * std::log2(p / q);
    if (p < 1.0) d += (1.0 - p) * std::log2((1.0 - p) / (1.0 - q));
    return d;
}

double shannon_entropy(std::span<const double> p) {
    double h = 0.0;
    for (const double v : p) {
        if (!(v >= 0.0)) throw domain_error("shannon_entropy: negative entry");
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
}

LogWeight log2_binomial(std::int64_t n, std::int64_t k) {
    if (n < 0) throw domain_error("log2_binomial: n must be >= 0");
    if (k < 0 || k > n) return LogWeight::zero();
    const double lg = (std::lgamma(static_cast<double>(n) + 1.0) -
                       std::lgamma(static_cast<double>(k) + 1.0) -
                       std::lgamma(static_cast<double>(n - k) + 1.0)) /
                      std::numbers::ln2;
    return LogWeight::from_log2(lg);
}

double hypergeom_pmf(std::int64_t k, std::int64_t n, std::int64_t l, std::int64_t j) {
    if (n < 1 || l < 1) throw precondition_error("hypergeom_pmf: need n >= 1 and l >= 1");
    if (j < 0 || j > n + l) throw precondition_error("hypergeom_pmf: j must lie in [0, n+l]");
    const LogWeight num = log2_binomial(l, k) * log2_binomial(n, j - k);
    if (num.is_zero()) return 0.0;
    return (num / log2_binomial(n + l, j)).value();
}

double gauss_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

// Rational approximation of the standard normal quantile (relative error
// about 1e-9 everywhere on (0,1)); Newton makes it exact to roundoff.
double gauss_quantile_seed(double p) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace

double gauss_quantile(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw domain_error("gauss_quantile: eps must lie in (0,1)");
    double x = gauss_quantile_seed(eps);
    for (int i = 0; i < 2; ++i) {
        const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        if (pdf <= 0.0) break; // beyond ~|x| = 38 the seed is already exact
        x -= (gauss_cdf(x) - eps) / pdf;
    }
    return x;
}

} // namespace qkdsec::num
