#include "qtwist/lvalue.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>
#include <omp.h>

#include "qtwist/error.hpp"
#include "qtwist/reduce.hpp"
#include "qtwist/twists.hpp"

namespace qtwist {

namespace {

u64 abs_u64(i64 d) { return static_cast<u64>(d < 0 ? -static_cast<__int128>(d) : d); }

// chi_d(r) for 0 <= r < |d|. Odd squarefree d = 1 mod 4 gives the Jacobi
// symbol (r / |d|), built from per-prime Legendre tables; anything else
// falls back to the Kronecker symbol.
std::vector<signed char> character_table(i64 d) {
    const u64 m = abs_u64(d);
    std::vector<signed char> chi(m, 1);
    if (m == 1) return chi;
    const Factorization f = factorize_trial(m);
    if (mod_floor(d, 4) != 1 || !f.squarefree()) {
        for (u64 r = 0; r < m; ++r) chi[r] = static_cast<signed char>(kronecker(d, static_cast<i64>(r)));
        return chi;
    }
    for (const auto& [q, e] : f.factors) {
        std::vector<signed char> leg(q, -1);
        leg[0] = 0;
        for (u64 i = 1; i <= q / 2; ++i) leg[i * i % q] = 1;
        u64 idx = 0;
        for (u64 r = 0; r < m; ++r) {
            chi[r] = static_cast<signed char>(chi[r] * leg[idx]);
            if (++idx == q) idx = 0;
        }
    }
    return chi;
}

}  // namespace

LValueEngine::LValueEngine(const CurveConfig& cfg, const CoefficientTable& table)
    : cfg_(cfg), table_(table), c_(table.nmax() + 1, 0.0) {
    const auto A = table.raw();
    for (u64 n = 1; n <= table.nmax(); ++n) c_[n] = static_cast<double>(A[n]) / static_cast<double>(n);
}

double LValueEngine::conductor_scale(i64 d) const {
    return std::sqrt(static_cast<double>(cfg_.conductor)) * static_cast<double>(abs_u64(d)) /
           (2.0 * std::numbers::pi);
}

u64 LValueEngine::truncation(double Q, double tol) {
    if (!(tol > 0.0) || !(tol < 1.0)) throw DomainError("truncation: tol must lie in (0, 1)");
    return static_cast<u64>(std::ceil(Q * (std::log(1.0 / tol) + std::log(Q + 2.0) + 4.0)));
}

u64 LValueEngine::required_nmax(i64 d, double tol) const {
    return truncation(conductor_scale(d), tol);
}

double LValueEngine::tail_bound(double Q, u64 T) {
    // 2 * sum_{n > T} 2 exp(-n/Q)
    return 4.0 * std::exp(-static_cast<double>(T + 1) / Q) / -std::expm1(-1.0 / Q);
}

void LValueEngine::require(u64 T) const {
    if (T > table_.nmax())
        throw ResourceError("coefficient table too short: need nmax >= " + std::to_string(T) + ", have " +
                            std::to_string(table_.nmax()));
}

CentralValue LValueEngine::central_value_truncated(i64 d, u64 T) const {
    CentralValue out;
    out.d = d;
    out.root_number = root_number(cfg_, d);
    if (out.root_number == -1) return out;
    require(T);

    const double Q = conductor_scale(d);
    const u64 m = abs_u64(d);
    const std::vector<signed char> chi = character_table(d);

    // Blocks are whole periods of chi; within a block the weight
    // chi(r) exp(-r/Q) is shared and the block offset contributes one
    // exponential factor.
    const u64 B = m * std::max<u64>(1, (4096 + m - 1) / m);
    std::vector<double> cw(B);
    for (u64 r = 0; r < B; ++r) cw[r] = chi[r % m] * std::exp(-static_cast<double>(r) / Q);

    CompensatedSum total;
    for (u64 base = 0; base <= T; base += B) {
        const u64 len = std::min(B, T + 1 - base);
        const double* c = c_.data() + base;
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
        u64 r = 0;
        for (; r + 4 <= len; r += 4) {
            s0 += c[r] * cw[r];
            s1 += c[r + 1] * cw[r + 1];
            s2 += c[r + 2] * cw[r + 2];
            s3 += c[r + 3] * cw[r + 3];
        }
        for (; r < len; ++r) s0 += c[r] * cw[r];
        total.add(std::exp(-static_cast<double>(base) / Q) * ((s0 + s1) + (s2 + s3)));
    }

    out.truncation = T;
    out.tail_bound = tail_bound(Q, T);
    out.value = 2.0 * total.value();
    out.raw = out.value;
    if (out.value < 0.0 && out.value >= -std::max(out.tail_bound, 1e-12)) out.value = 0.0;
    return out;
}

CentralValue LValueEngine::central_value(i64 d, double tol) const {
    return central_value_truncated(d, truncation(conductor_scale(d), tol));
}

CentralValue LValueEngine::central_value_serial(i64 d, double tol) const {
    CentralValue out;
    out.d = d;
    out.root_number = root_number(cfg_, d);
    if (out.root_number == -1) return out;
    const double Q = conductor_scale(d);
    const u64 T = truncation(Q, tol);
    require(T);
    CompensatedSum total;
    for (u64 n = 1; n <= T; ++n) {
        const int chi = kronecker(d, static_cast<i64>(n));
        if (chi == 0) continue;
        total.add(chi * c_[n] * std::exp(-static_cast<double>(n) / Q));
    }
    out.truncation = T;
    out.tail_bound = tail_bound(Q, T);
    out.value = 2.0 * total.value();
    out.raw = out.value;
    if (out.value < 0.0 && out.value >= -std::max(out.tail_bound, 1e-12)) out.value = 0.0;
    return out;
}

std::vector<CentralValue> LValueEngine::central_values(std::span<const i64> ds, double tol) const {
    for (i64 d : ds) require(root_number(cfg_, d) == 1 ? required_nmax(d, tol) : 0);
    std::vector<CentralValue> out(ds.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (i64 i = 0; i < static_cast<i64>(ds.size()); ++i)
        out[static_cast<std::size_t>(i)] = central_value(ds[static_cast<std::size_t>(i)], tol);
    return out;
}

double LValueEngine::central_value_balanced(i64 d, double X0, double tol) const {
    if (!(X0 > 0.0)) throw DomainError("central_value_balanced: X0 must be positive");
    const int eps = root_number(cfg_, d);
    const double Q = conductor_scale(d);
    const u64 T = truncation(Q * std::max(X0, 1.0 / X0), tol);
    require(T);
    CompensatedSum total;
    for (u64 n = 1; n <= T; ++n) {
        const int chi = kronecker(d, static_cast<i64>(n));
        if (chi == 0) continue;
        const double x = static_cast<double>(n) / Q;
        total.add(chi * c_[n] * (std::exp(-x / X0) + eps * std::exp(-x * X0)));
    }
    return total.value();
}

double LValueEngine::completed(i64 d, double s, double X0, double tol) const {
    if (!(X0 > 0.0)) throw DomainError("completed: X0 must be positive");
    if (!(s > -0.5 && s < 1.5)) throw DomainError("completed: s must lie in (-1/2, 3/2)");
    const int eps = root_number(cfg_, d);
    const double Q = conductor_scale(d);
    // The tighter tolerance absorbs the (Q/n)^s weights on the tail.
    const u64 T = truncation(Q * std::max(X0, 1.0 / X0), tol * 1e-2);
    require(T);
    CompensatedSum total;
    for (u64 n = 1; n <= T; ++n) {
        const int chi = kronecker(d, static_cast<i64>(n));
        if (chi == 0 || table_.A(n) == 0) continue;
        // a(n) = A_n / sqrt(n)
        const double an = static_cast<double>(table_.A(n)) / std::sqrt(static_cast<double>(n));
        const double ratio = Q / static_cast<double>(n);
        const double x = static_cast<double>(n) / Q;
        const double first = std::pow(ratio, s) * boost::math::tgamma(s + 0.5, x / X0);
        const double second = std::pow(ratio, 1.0 - s) * boost::math::tgamma(1.5 - s, x * X0);
        total.add(chi * an * (first + eps * second));
    }
    return total.value();
}

namespace {

struct LocalSeries {
    u64 p;
    int chi;
    double ap;  // normalized a(p)
    bool bad;
};

std::vector<LocalSeries> local_data(const CurveConfig& cfg, const CoefficientTable& table, i64 a_residue) {
    std::vector<LocalSeries> out;
    for (u64 p : cfg.n0_primes()) {
        if (p > table.nmax()) throw ResourceError("local_factor_La: coefficient table must cover p | N0");
        out.push_back({p, kronecker(a_residue, static_cast<i64>(p)), table.a(p), cfg.bad_at(p)});
    }
    return out;
}

}  // namespace

double local_factor_La(const CurveConfig& cfg, const CoefficientTable& table, i64 a_residue, double s) {
    if (!(s > 0.0)) throw DomainError("local_factor_La: s must be positive");
    double value = 1.0;
    for (const auto& L : local_data(cfg, table, a_residue)) {
        const double x = L.chi * std::pow(static_cast<double>(L.p), -s);
        const double local = L.bad ? 1.0 - L.ap * x : 1.0 - L.ap * x + x * x;
        value /= local;
    }
    return value;
}

double local_factor_La_series(const CurveConfig& cfg, const CoefficientTable& table, i64 a_residue, double s,
                              u64 bound) {
    if (!(s > 0.0)) throw DomainError("local_factor_La_series: s must be positive");
    // Per prime: the terms a(p^k) chi(p)^k p^{-ks} for p^k <= bound.
    struct Power {
        u64 q;
        double term;
    };
    std::vector<std::vector<Power>> powers;
    for (const auto& L : local_data(cfg, table, a_residue)) {
        std::vector<Power> list{{1, 1.0}};
        double prev = 1.0, prev2 = 0.0;  // normalized a(p^{k-1}), a(p^{k-2})
        const double ps = std::pow(static_cast<double>(L.p), -s);
        double scale = 1.0;
        for (u64 q = L.p; q <= bound; q *= L.p) {
            const double cur = L.bad ? L.ap * prev : L.ap * prev - prev2;
            prev2 = prev;
            prev = cur;
            scale *= L.chi * ps;
            list.push_back({q, cur * scale});
            if (q > bound / L.p) break;
        }
        powers.push_back(std::move(list));
    }
    CompensatedSum total;
    // Depth-first over prime powers with product <= bound.
    auto walk = [&](auto&& self, std::size_t i, u64 n, double term) -> void {
        if (i == powers.size()) {
            total.add(term);
            return;
        }
        for (const auto& pw : powers[i]) {
            if (pw.q > bound / n) break;
            self(self, i + 1, n * pw.q, term * pw.term);
        }
    };
    walk(walk, 0, 1, 1.0);
    return total.value();
}

}  // namespace qtwist
