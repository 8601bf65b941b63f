#include "qtwist/resonator.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "qtwist/error.hpp"
#include "qtwist/reduce.hpp"

namespace qtwist {

double ResonatorParams::L() const {
    if (M < 3) return 0.0;
    const double lm = std::log(static_cast<double>(M));
    const double v = lm * std::log(lm);
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

std::pair<double, double> ResonatorParams::paper_window() const {
    const double l = L();
    if (l <= 0.0) return {1.0, 0.0};
    const double ll = std::log(l);
    return {l * l, std::exp(ll * ll)};
}

std::pair<double, double> ResonatorParams::window() const {
    if (window_override)
        return {static_cast<double>(window_override->first), static_cast<double>(window_override->second)};
    return paper_window();
}

void ResonatorParams::validate() const {
    if (M < 1) throw DomainError("resonator: M must be >= 1");
    if (sign != 1 && sign != -1) throw DomainError("resonator: sign must be +1 or -1");
    if (window_override) return;
    const double l = L();
    if (!(l > 0.0) || std::log(l) < 2.0)
        throw DomainError("resonator: the window [L^2, exp((log L)^2)] is empty for M = " + std::to_string(M) +
                          " (needs log L >= 2, i.e. log M log log M >= e^4); pass a window override");
}

Resonator::Resonator(const ResonatorParams& params, const CurveConfig& cfg, const CoefficientTable& table)
    : params_(params), L_(params.L()) {
    params_.validate();
    const auto [lo, hi] = params_.window();
    const double top = std::min(hi, static_cast<double>(params_.M));
    if (top >= 3.0 && top > static_cast<double>(table.nmax()))
        throw ResourceError("resonator: coefficient table must reach min(window hi, M) = " +
                            std::to_string(static_cast<u64>(top)));
    const u64 N0 = cfg.n0();
    for (u32 p : table.primes()) {
        if (static_cast<double>(p) > top) break;
        if (p == 2 || N0 % p == 0 || static_cast<double>(p) < lo) continue;
        const double pd = static_cast<double>(p);
        const double b = params_.sign * table.a(p) * L_ / (std::sqrt(pd) * std::log(pd));
        primes_.push_back({p, b});
        if (primes_.size() > kMaxWindowPrimes) throw ResourceError("resonator: window has too many primes");
    }
}

double Resonator::b_prime(u64 p) const {
    auto it = std::lower_bound(primes_.begin(), primes_.end(), p,
                               [](const WindowPrime& w, u64 q) { return w.p < q; });
    return it != primes_.end() && it->p == p ? it->b : 0.0;
}

double Resonator::b(u64 m) const {
    if (m == 0) throw DomainError("resonator: b(m) needs m >= 1");
    double v = 1.0;
    for (const auto& [p, e] : factorize_trial(m).factors) {
        if (e > 1) return 0.0;
        v *= b_prime(p);
        if (v == 0.0) return 0.0;
    }
    return v;
}

ResonatorValue Resonator::resonate(i64 d) const {
    ResonatorValue out;
    out.d = d;
    const u64 M = params_.M;
    // b(p) chi_d(p) over primes with b(p) != 0
    std::vector<std::pair<u64, double>> w;
    for (const auto& wp : primes_)
        if (wp.b != 0.0) w.emplace_back(wp.p, kronecker(d, static_cast<i64>(wp.p)) * wp.b);
    CompensatedSum acc;
    u64 count = 0;
    // Squarefree products of increasing primes with product <= M.
    auto dfs = [&](auto&& self, std::size_t start, u64 m, double term) -> void {
        acc.add(term);
        ++count;
        for (std::size_t i = start; i < w.size(); ++i) {
            if (w[i].first > M / m) break;
            self(self, i + 1, m * w[i].first, term * w[i].second);
        }
    };
    dfs(dfs, 0, 1, 1.0);
    out.value = acc.value();
    out.support_count = count;
    return out;
}

ResonatorValue Resonator::resonate_serial(i64 d) const {
    ResonatorValue out;
    out.d = d;
    CompensatedSum acc;
    for (u64 m = 1; m <= params_.M; m += 2) {
        const double bm = b(m);
        if (bm == 0.0) continue;
        const int chi = kronecker(d, static_cast<i64>(m));
        ++out.support_count;
        acc.add(bm * chi);
    }
    out.value = acc.value();
    return out;
}

std::vector<ResonatorValue> Resonator::resonate_all(std::span<const i64> ds) const {
    std::vector<ResonatorValue> out(ds.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (i64 i = 0; i < static_cast<i64>(ds.size()); ++i)
        out[static_cast<std::size_t>(i)] = resonate(ds[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace qtwist
