#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qkdsec/gf2.hpp"
#include "qkdsec/rng.hpp"

namespace qkdsec::audit {

// Joint law of the (bit-flip pattern x, phase-flip pattern z) footprint of a
// generalized Pauli channel on n qubits, held as a dense 4^n table indexed
// (x << n) | z. Everything this module certifies depends on the channel only
// through this classical object. Guarded to n <= 12.
class PauliDistribution {
public:
    // Entries must be nonnegative and sum to 1 within 1e-12; the table must
    // have exactly 4^n entries.
    static PauliDistribution from_joint(std::int64_t n_qubits, std::vector<double> joint);

    // Normalized i.i.d. exponentials: a smooth, almost-surely full-support
    // random point of the simplex.
    static PauliDistribution random(std::int64_t n_qubits, Rng& rng);

    std::int64_t n_qubits() const { return n_; }
    double at(std::uint64_t x, std::uint64_t z) const;
    const std::vector<double>& joint() const { return joint_; }

private:
    PauliDistribution() = default;

    std::int64_t n_ = 0;
    std::vector<double> joint_;
};

struct PauliMarginals {
    std::vector<double> p_x;     // 2^n entries
    std::vector<double> p_z;     // 2^n entries
    std::vector<double> weight;  // n+1 entries: mass of {z : |z| = k}
};

PauliMarginals marginals(const PauliDistribution& p);

// Exact information the environment gains about a uniformly random
// computational-basis input: sum_x P_X(x) H(P_{Z|X}(.|x)), in bits. Purely
// classical — no density matrices involved.
double eve_information(const PauliDistribution& p);

// Closed-form cap on eve_information: eta_n(1 - P_Z(0)).
double eve_information_bound(const PauliDistribution& p);

struct EntropySplit {
    double entropy = 0;
    double bound = 0;
};

// H(P) versus h(1 - P(0)) + log2(d-1) * (1 - P(0)) for a distribution on
// d >= 2 points; the bound dominates, with equality for the uniform law.
EntropySplit entropy_split_bound(std::span<const double> p);

struct SubcodeAuditResult {
    double average_error = 0;    // exact ensemble mean, or sampled mean
    double bound = 0;
    double sigma = 0;            // standard error of the mean; 0 when exhaustive
    bool exhaustive = false;
    std::int64_t instances = 0;  // subspaces enumerated, or trials run
    bool passed = false;         // mean <= bound (exhaustive) or <= bound + 4 sigma
};

// Random-extension ensemble audit. Extends c1 (dimension t) by sub_add_dim
// uniformly random dimensions, evaluates the exact coset-decoding error of
// each extension against channel w, and compares the ensemble average with
//   sum_k P_W(|e| = k) * g(2^{sub_add_dim + t - n} | n, k).
// When the ensemble holds at most 10^4 subspaces it is enumerated in full
// (trials then ignored); otherwise `trials` independent samples are drawn
// from forked rng streams and the comparison allows 4 sigma of slack.
SubcodeAuditResult subcode_ensemble_audit(const gf2::BinaryCode& c1, std::int64_t sub_add_dim,
                                          const gf2::AdditiveChannel& w, std::int64_t trials,
                                          Rng& rng);

// Every extension of c1 by add_dim dimensions, one BinaryCode per subspace.
// Refuses ensembles larger than 10^4.
std::vector<gf2::BinaryCode> enumerate_extensions(const gf2::BinaryCode& c1, std::int64_t add_dim);

// Number of add_dim-dimensional subspaces of F_2^free_dim (the Gaussian
// binomial coefficient), saturated at 10^4 + 1.
std::int64_t count_extensions(std::int64_t free_dim, std::int64_t add_dim);

}  // namespace qkdsec::audit
