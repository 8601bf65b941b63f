// Serial references against the OpenMP kernels, pairwise per kernel.

#include <benchmark/benchmark.h>

#include <vector>

#include "qtwist/arith.hpp"
#include "qtwist/curve.hpp"
#include "qtwist/lvalue.hpp"
#include "qtwist/pointcount.hpp"
#include "qtwist/resonator.hpp"
#include "qtwist/twists.hpp"

using namespace qtwist;

namespace {

const CurveConfig& curve() {
    static const CurveConfig cfg = load_curve_config(QTWIST_DATA_DIR "/11a1.conf");
    return cfg;
}

const CoefficientTable& table() {
    static const CoefficientTable t = build_coefficients(curve(), 1000000);
    return t;
}

std::vector<i64> twists(std::size_t count) {
    const i64 a = discover_classes(curve(), 1).front();
    std::vector<i64> ds;
    for (const auto& t : enum_family(curve(), a, 1, 20000, 80000, sieve_primes(1000))) ds.push_back(t.d);
    if (ds.size() > count) ds.resize(count);
    return ds;
}

void BM_PrimeSieveSerial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(sieve_primes_serial(static_cast<u64>(st.range(0))));
}
void BM_PrimeSieveParallel(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(sieve_primes(static_cast<u64>(st.range(0))));
}
BENCHMARK(BM_PrimeSieveSerial)->Arg(10000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PrimeSieveParallel)->Arg(10000000)->Unit(benchmark::kMillisecond);

std::vector<u32> good_primes(u64 limit) {
    std::vector<u32> good;
    for (u32 p : sieve_primes(limit))
        if (curve().conductor % p != 0) good.push_back(p);
    return good;
}

void BM_TracesSerial(benchmark::State& st) {
    const auto ps = good_primes(static_cast<u64>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(traces_serial(curve().model, ps));
}
void BM_TracesParallel(benchmark::State& st) {
    const auto ps = good_primes(static_cast<u64>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(traces_parallel(curve().model, curve().conductor, ps));
}
BENCHMARK(BM_TracesSerial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TracesParallel)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_CentralValuesSerial(benchmark::State& st) {
    const LValueEngine eng(curve(), table());
    const auto ds = twists(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        for (i64 d : ds) benchmark::DoNotOptimize(eng.central_value_serial(d, 1e-8));
}
void BM_CentralValuesParallel(benchmark::State& st) {
    const LValueEngine eng(curve(), table());
    const auto ds = twists(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(eng.central_values(ds, 1e-8));
}
BENCHMARK(BM_CentralValuesSerial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CentralValuesParallel)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_FamilySerial(benchmark::State& st) {
    const i64 a = discover_classes(curve(), 1).front();
    const u64 X = static_cast<u64>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(enum_family_serial(curve(), a, 1, X / 2, 5 * X / 2));
}
void BM_FamilyParallel(benchmark::State& st) {
    const i64 a = discover_classes(curve(), 1).front();
    const u64 X = static_cast<u64>(st.range(0));
    const auto ps = sieve_primes(isqrt(5 * X / 2) + 1);
    for (auto _ : st) benchmark::DoNotOptimize(enum_family(curve(), a, 1, X / 2, 5 * X / 2, ps));
}
BENCHMARK(BM_FamilySerial)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FamilyParallel)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_ResonateSerial(benchmark::State& st) {
    const Resonator r({static_cast<u64>(st.range(0)), 1, std::make_pair(u64{3}, u64{200})}, curve(), table());
    const auto ds = twists(2000);
    for (auto _ : st)
        for (i64 d : ds) benchmark::DoNotOptimize(r.resonate_serial(d));
}
void BM_ResonateParallel(benchmark::State& st) {
    const Resonator r({static_cast<u64>(st.range(0)), 1, std::make_pair(u64{3}, u64{200})}, curve(), table());
    const auto ds = twists(2000);
    for (auto _ : st) benchmark::DoNotOptimize(r.resonate_all(ds));
}
BENCHMARK(BM_ResonateSerial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResonateParallel)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
