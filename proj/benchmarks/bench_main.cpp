#include <benchmark/benchmark.h>

#include "qkdsec/asymptotics.hpp"
#include "qkdsec/gf2.hpp"
#include "qkdsec/numerics.hpp"
#include "qkdsec/protocol.hpp"
#include "qkdsec/rng.hpp"
#include "qkdsec/secbounds.hpp"

namespace {

using namespace qkdsec;

bounds::ProtocolParams table_params(std::int64_t n, std::int64_t l, std::int64_t k) {
    bounds::ProtocolParams p;
    p.n = n;
    p.l = l;
    p.rate_R = 0.5;
    p.k_low = p.k_high = k;
    p.delta = [](std::int64_t) { return 0.01; };
    return p;
}

void BM_total_information_bound(benchmark::State& state) {
    const auto p = table_params(state.range(0), state.range(0) / 10, state.range(0) * 3 / 400);
    for (auto _ : state) {
        benchmark::DoNotOptimize(bounds::total_information_bound(p));
    }
}
BENCHMARK(BM_total_information_bound)->Arg(1000)->Arg(10000)->Arg(40000);

void BM_hypergeom_row(benchmark::State& state) {
    const std::int64_t n = state.range(0), l = n / 10;
    for (auto _ : state) {
        double acc = 0;
        for (std::int64_t k = 0; k <= l; ++k) acc += num::hypergeom_pmf(k, n, l, (n + l) / 12);
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_hypergeom_row)->Arg(10000)->Arg(40000);

void BM_rank(benchmark::State& state) {
    Rng rng(7);
    const std::int64_t n = state.range(0);
    gf2::BitMatrix m(0, n);
    for (std::int64_t i = 0; i < n; ++i) m.append_row(gf2::random_bitvec(n, rng));
    for (auto _ : state) {
        benchmark::DoNotOptimize(gf2::rank(m));
    }
}
BENCHMARK(BM_rank)->Arg(64)->Arg(256)->Arg(1024);

void BM_sample_full_rank(benchmark::State& state) {
    Rng rng(11);
    const std::int64_t n = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gf2::sample_full_rank_matrix(n / 2, n, rng));
    }
}
BENCHMARK(BM_sample_full_rank)->Arg(64)->Arg(256);

void BM_min_distance_decode(benchmark::State& state) {
    Rng rng(3);
    const auto c2 = gf2::BinaryCode::hamming74_blocks(2);
    const auto c1 = gf2::sample_extension(gf2::BinaryCode::from_generator(14, gf2::BitMatrix(0, 14)),
                                          4, rng);
    const auto y = gf2::random_bitvec(14, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gf2::min_distance_decode(y, c1, c2));
    }
}
BENCHMARK(BM_min_distance_decode);

void BM_simulate_run(benchmark::State& state) {
    sim::SimConfig cfg;
    cfg.code_c1 = gf2::BinaryCode::hamming74_blocks(state.range(0));
    cfg.n_plus = cfg.n_times = cfg.code_c1.length_n;
    cfg.l_plus = cfg.l_times = 40;
    cfg.channel_p_bit = 0.01;
    cfg.channel_p_phase = 0.0;
    cfg.decoder = sim::DecoderKind::hamming_blocks;
    cfg.params.n = cfg.n_plus;
    cfg.params.l = cfg.l_times;
    cfg.params.rate_R = 1.0;
    cfg.params.k_low = 0;
    cfg.params.k_high = 10;
    cfg.params.delta = [](std::int64_t) { return 0.0; };
    std::uint64_t seed = 1;
    for (auto _ : state) {
        cfg.seed = seed++;
        benchmark::DoNotOptimize(sim::simulate_run(cfg));
    }
}
BENCHMARK(BM_simulate_run)->Arg(2)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
