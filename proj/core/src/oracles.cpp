#include "qkdsec/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "qkdsec/error.hpp"
#include "qkdsec/numerics.hpp"

namespace qkdsec::audit {

namespace {

// Compensated accumulation; the 1e-12 normalization gate would otherwise be
// unreachable for 4^12-entry tables.
double kahan_sum(const std::vector<double>& v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace

PauliDistribution PauliDistribution::from_joint(std::int64_t n_qubits, std::vector<double> joint) {
    if (n_qubits < 1 || n_qubits > 12)
        throw precondition_error("PauliDistribution: n_qubits must lie in [1, 12]");
    const std::size_t want = std::size_t{1} << (2 * n_qubits);
    if (joint.size() != want)
        throw precondition_error("PauliDistribution: joint table must have 4^n entries");
    for (double v : joint)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw domain_error("PauliDistribution: entries must be nonnegative and finite");
    if (std::abs(kahan_sum(joint) - 1.0) > 1e-12)
        throw domain_error("PauliDistribution: entries must sum to 1");
    PauliDistribution p;
    p.n_ = n_qubits;
    p.joint_ = std::move(joint);
    return p;
}

PauliDistribution PauliDistribution::random(std::int64_t n_qubits, Rng& rng) {
    if (n_qubits < 1 || n_qubits > 12)
        throw precondition_error("PauliDistribution: n_qubits must lie in [1, 12]");
    const std::size_t cells = std::size_t{1} << (2 * n_qubits);
    std::vector<double> joint(cells);
    for (auto& v : joint) v = -std::log1p(-rng.next_unit());
    const double total = kahan_sum(joint);
    for (auto& v : joint) v /= total;
    return from_joint(n_qubits, std::move(joint));
}

double PauliDistribution::at(std::uint64_t x, std::uint64_t z) const {
    const std::uint64_t side = std::uint64_t{1} << n_;
    if (x >= side || z >= side) throw precondition_error("PauliDistribution: index out of range");
    return joint_[(x << n_) | z];
}

PauliMarginals marginals(const PauliDistribution& p) {
    const std::int64_t n = p.n_qubits();
    const std::size_t side = std::size_t{1} << n;
    const auto& joint = p.joint();

    PauliMarginals m;
    m.p_x.assign(side, 0.0);
    m.p_z.assign(side, 0.0);
    m.weight.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::size_t x = 0; x < side; ++x) {
        const std::size_t base = x << n;
        double row = 0.0;
        for (std::size_t z = 0; z < side; ++z) {
            row += joint[base | z];
            m.p_z[z] += joint[base | z];
        }
        m.p_x[x] = row;
    }
    for (std::size_t z = 0; z < side; ++z) m.weight[std::popcount(z)] += m.p_z[z];
    return m;
}

double eve_information(const PauliDistribution& p) {
    const std::int64_t n = p.n_qubits();
    const std::size_t side = std::size_t{1} << n;
    const auto& joint = p.joint();

    double total = 0.0;
    for (std::size_t x = 0; x < side; ++x) {
        const std::size_t base = x << n;
        double px = 0.0;
        for (std::size_t z = 0; z < side; ++z) px += joint[base | z];
        if (px <= 0.0) continue;
        const double lg_px = std::log2(px);
        // px * H(P_{Z|X}(.|x)) without forming the conditional explicitly.
        double contrib = 0.0;
        for (std::size_t z = 0; z < side; ++z) {
            const double v = joint[base | z];
            if (v > 0.0) contrib -= v * (std::log2(v) - lg_px);
        }
        total += contrib;
    }
    return std::max(0.0, total);
}

double eve_information_bound(const PauliDistribution& p) {
    const auto m = marginals(p);
    const double q = std::clamp(1.0 - m.p_z[0], 0.0, 1.0);
    return num::eta(p.n_qubits(), q);
}

EntropySplit entropy_split_bound(std::span<const double> p) {
    if (p.size() < 2) throw precondition_error("entropy_split_bound: need at least two outcomes");
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw domain_error("entropy_split_bound: entries must be nonnegative and finite");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw domain_error("entropy_split_bound: entries must sum to 1");

    EntropySplit out;
    out.entropy = num::shannon_entropy(p);
    const double q = std::clamp(1.0 - p[0], 0.0, 1.0);
    out.bound = num::binary_entropy(q) + std::log2(static_cast<double>(p.size() - 1)) * q;
    return out;
}

std::int64_t count_extensions(std::int64_t free_dim, std::int64_t add_dim) {
    if (free_dim < 0 || add_dim < 0)
        throw precondition_error("count_extensions: dimensions must be nonnegative");
    if (add_dim > free_dim) return 0;
    constexpr std::int64_t cap = 10001;
    // Saturating Pascal recurrence for the Gaussian binomial:
    //   [d, s] = [d-1, s-1] + 2^s [d-1, s].
    std::vector<std::vector<std::int64_t>> tab(
        static_cast<std::size_t>(free_dim) + 1,
        std::vector<std::int64_t>(static_cast<std::size_t>(add_dim) + 1, 0));
    for (std::int64_t d = 0; d <= free_dim; ++d) tab[d][0] = 1;
    for (std::int64_t d = 1; d <= free_dim; ++d) {
        for (std::int64_t s = 1; s <= std::min(d, add_dim); ++s) {
            const std::int64_t shift = std::min<std::int64_t>(s, 62);
            std::int64_t v = tab[d - 1][s - 1];
            if (tab[d - 1][s] > 0) {
                if (shift >= 40 || tab[d - 1][s] > (cap << 20))
                    v = cap;
                else
                    v += (std::int64_t{1} << shift) * tab[d - 1][s];
            }
            tab[d][s] = std::min(v, cap);
        }
    }
    return tab[free_dim][add_dim];
}

std::vector<gf2::BinaryCode> enumerate_extensions(const gf2::BinaryCode& c1, std::int64_t add_dim) {
    const std::int64_t n = c1.length_n;
    const std::int64_t t = c1.dimension();
    if (add_dim < 0 || t + add_dim > n)
        throw precondition_error("enumerate_extensions: need 0 <= add_dim <= length - dim");
    const std::int64_t d = n - t;
    const std::int64_t total = count_extensions(d, add_dim);
    if (total > 10000) throw precondition_error("enumerate_extensions: ensemble exceeds 10^4 subspaces");

    // Quotient coordinates: the non-pivot columns of c1's reduced generator.
    // A subspace of F_2^d in reduced echelon form lifts row-by-row onto those
    // columns; distinct echelon forms give distinct extensions, so each
    // subspace appears exactly once.
    gf2::BitMatrix reduced = c1.generator;
    const auto pivots = gf2::to_rref(reduced);
    std::vector<std::int64_t> free_cols;
    {
        std::vector<char> is_pivot(static_cast<std::size_t>(n), 0);
        for (auto p : pivots) is_pivot[static_cast<std::size_t>(p)] = 1;
        for (std::int64_t j = 0; j < n; ++j)
            if (!is_pivot[static_cast<std::size_t>(j)]) free_cols.push_back(j);
    }

    std::vector<gf2::BinaryCode> out;
    out.reserve(static_cast<std::size_t>(total));
    if (add_dim == 0) {
        out.push_back(c1);
        return out;
    }

    std::vector<std::int64_t> comb(static_cast<std::size_t>(add_dim));
    std::iota(comb.begin(), comb.end(), 0);
    const auto advance = [&]() -> bool {
        std::int64_t i = add_dim - 1;
        while (i >= 0 && comb[static_cast<std::size_t>(i)] == d - add_dim + i) --i;
        if (i < 0) return false;
        ++comb[static_cast<std::size_t>(i)];
        for (std::int64_t j = i + 1; j < add_dim; ++j)
            comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
        return true;
    };

    do {
        std::vector<char> is_piv(static_cast<std::size_t>(d), 0);
        for (auto c : comb) is_piv[static_cast<std::size_t>(c)] = 1;
        std::vector<std::pair<std::int64_t, std::int64_t>> slots;  // (row, quotient column)
        for (std::int64_t i = 0; i < add_dim; ++i)
            for (std::int64_t j = comb[static_cast<std::size_t>(i)] + 1; j < d; ++j)
                if (!is_piv[static_cast<std::size_t>(j)]) slots.emplace_back(i, j);

        const std::uint64_t fills = std::uint64_t{1} << slots.size();
        for (std::uint64_t mask = 0; mask < fills; ++mask) {
            gf2::BitMatrix g = reduced;
            std::vector<gf2::BitVec> rows(static_cast<std::size_t>(add_dim), gf2::BitVec(n));
            for (std::int64_t i = 0; i < add_dim; ++i)
                rows[static_cast<std::size_t>(i)].set(
                    free_cols[static_cast<std::size_t>(comb[static_cast<std::size_t>(i)])], true);
            for (std::size_t f = 0; f < slots.size(); ++f)
                if ((mask >> f) & 1ull)
                    rows[static_cast<std::size_t>(slots[f].first)].set(
                        free_cols[static_cast<std::size_t>(slots[f].second)], true);
            for (auto& r : rows) g.append_row(std::move(r));
            out.push_back(gf2::BinaryCode::from_generator(n, std::move(g)));
        }
    } while (advance());

    if (static_cast<std::int64_t>(out.size()) != total)
        throw std::logic_error("enumerate_extensions: enumeration count mismatch");
    return out;
}

SubcodeAuditResult subcode_ensemble_audit(const gf2::BinaryCode& c1, std::int64_t sub_add_dim,
                                          const gf2::AdditiveChannel& w, std::int64_t trials,
                                          Rng& rng) {
    const std::int64_t n = c1.length_n;
    if (w.length_n != n) throw precondition_error("subcode_ensemble_audit: channel length mismatch");
    if (n > 12) throw precondition_error("subcode_ensemble_audit: length capped at 12");
    const std::int64_t t = c1.dimension();
    if (sub_add_dim < 0 || t + sub_add_dim > n)
        throw precondition_error("subcode_ensemble_audit: need 0 <= sub_add_dim <= length - dim");
    if (trials < 1) throw precondition_error("subcode_ensemble_audit: trials must be >= 1");

    const auto wd = w.weight_distribution();
    const double x = std::exp2(static_cast<double>(sub_add_dim + t - n));
    double bound = 0.0;
    for (std::int64_t k = 0; k <= n; ++k)
        bound += wd[static_cast<std::size_t>(k)] * gf2::g_factor(x, n, k);

    SubcodeAuditResult res;
    res.bound = bound;
    if (count_extensions(n - t, sub_add_dim) <= 10000) {
        const auto codes = enumerate_extensions(c1, sub_add_dim);
        double sum = 0.0;
        for (const auto& c2 : codes) sum += gf2::exact_error_probability(w, c1, c2);
        res.average_error = sum / static_cast<double>(codes.size());
        res.exhaustive = true;
        res.instances = static_cast<std::int64_t>(codes.size());
        res.passed = res.average_error <= res.bound + 1e-12;
    } else {
        // Forked child streams keep the trials order-independent.
        double sum = 0.0, sumsq = 0.0;
        for (std::int64_t i = 0; i < trials; ++i) {
            Rng child = rng.fork(static_cast<std::uint64_t>(i));
            const gf2::BinaryCode c2 = gf2::sample_extension(c1, sub_add_dim, child);
            const double e = gf2::exact_error_probability(w, c1, c2);
            sum += e;
            sumsq += e * e;
        }
        const double mean = sum / static_cast<double>(trials);
        const double var =
            trials > 1 ? std::max(0.0, (sumsq - static_cast<double>(trials) * mean * mean) /
                                           static_cast<double>(trials - 1))
                       : 0.0;
        res.average_error = mean;
        res.sigma = std::sqrt(var / static_cast<double>(trials));
        res.exhaustive = false;
        res.instances = trials;
        res.passed = mean <= bound + 4.0 * res.sigma;
    }
    return res;
}

}  // namespace qkdsec::audit
