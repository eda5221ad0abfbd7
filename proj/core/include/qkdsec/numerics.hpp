#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <span>

#include "qkdsec/error.hpp"

namespace qkdsec::num {

// Binary entropy in bits; 0 log 0 = 0. Evaluated through min(p, 1-p) so the
// symmetry h(p) = h(1-p) holds exactly whenever 1-p is itself exact.
double binary_entropy(double p);

// binary_entropy below 1/2, exactly 1 from 1/2 on. Defined for all x >= 0:
// several bounds feed arguments past 1 and rely on the clip staying flat.
double clipped_entropy(double x);

// clipped_entropy(x) + k*x, k >= 0.
double eta(std::int64_t k, double x);

// Bernoulli Kullback-Leibler divergence in bits. Endpoint q in {0,1} is
// admitted only when p == q (divergence 0); otherwise it is infinite and
// rejected as a domain error.
double kl_bernoulli(double p, double q);

// Shannon entropy in bits of a probability vector. Entries must be
// nonnegative; the caller is responsible for normalization.
double shannon_entropy(std::span<const double> p);

// A nonnegative weight carried as its base-2 logarithm; -inf encodes zero.
// Multiplication adds logs, addition is a max-anchored log-sum-exp, so
// products of thousands of binomials neither overflow nor underflow.
class LogWeight {
public:
    constexpr LogWeight() = default;

    static constexpr LogWeight zero() { return LogWeight(); }
    static constexpr LogWeight one() { return from_log2(0.0); }
    static constexpr LogWeight from_log2(double lg) {
        LogWeight w;
        w.lg_ = lg;
        return w;
    }
    static LogWeight from_value(double v) {
        if (!(v >= 0.0)) throw domain_error("LogWeight: value must be >= 0");
        return from_log2(std::log2(v)); // log2(0) == -inf
    }

    double log2() const { return lg_; }
    double value() const { return std::exp2(lg_); }
    bool is_zero() const { return lg_ == -std::numeric_limits<double>::infinity(); }

    friend LogWeight operator*(LogWeight a, LogWeight b) {
        if (a.is_zero() || b.is_zero()) return zero(); // avoid -inf + inf
        return from_log2(a.lg_ + b.lg_);
    }
    friend LogWeight operator/(LogWeight a, LogWeight b) {
        if (b.is_zero()) throw domain_error("LogWeight: division by zero");
        if (a.is_zero()) return zero();
        return from_log2(a.lg_ - b.lg_);
    }
    friend LogWeight operator+(LogWeight a, LogWeight b) {
        if (a.lg_ < b.lg_) {
            const LogWeight t = a;
            a = b;
            b = t;
        }
        if (b.is_zero()) return a;
        return from_log2(a.lg_ + std::log2(1.0 + std::exp2(b.lg_ - a.lg_)));
    }

    auto operator<=>(const LogWeight&) const = default;

private:
    double lg_ = -std::numeric_limits<double>::infinity();
};

// log2 of the binomial coefficient C(n, k); exact zero for k outside [0, n].
LogWeight log2_binomial(std::int64_t n, std::int64_t k);

// Probability that k of the j marked items land in the l-slot part of an
// (n+l)-slot population. Out-of-support k gives 0.
double hypergeom_pmf(std::int64_t k, std::int64_t n, std::int64_t l, std::int64_t j);

// Standard normal CDF, accurate in both tails (erfc based).
double gauss_cdf(double x);

// Inverse of gauss_cdf on (0, 1). Rational initial guess polished by Newton
// steps; round-trips through gauss_cdf to full double precision.
double gauss_quantile(double eps);

} // namespace qkdsec::num
