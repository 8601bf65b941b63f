#include "qtwist/eulerfactors.hpp"

#include <cmath>
#include <numbers>

#include "qtwist/error.hpp"
#include "qtwist/reduce.hpp"

namespace qtwist {

EulerFactors::EulerFactors(const CurveConfig& cfg, const CoefficientTable& table, u64 pmax)
    : cfg_(cfg), table_(table), pmax_(pmax) {
    if (pmax < 2) throw DomainError("EulerFactors: pmax must be >= 2");
    if (pmax > table.nmax()) throw ResourceError("EulerFactors: coefficient table must cover pmax");
}

void EulerFactors::require_good(u64 p, const char* what) const {
    if (cfg_.divides_n0(p))
        throw DomainError(std::string(what) + ": p = " + std::to_string(p) + " divides N0");
}

double EulerFactors::Y(u64 p) const {
    require_good(p, "Y");
    const double pd = static_cast<double>(p);
    const double A = table_.A(p);
    return 1.0 - (A * A / pd - 2.0) / pd + 1.0 / (pd * pd);
}

double EulerFactors::B(u64 p) const {
    const double pd = static_cast<double>(p);
    return 1.0 + Y(p) / pd + 1.0 / pd;
}

double EulerFactors::h(u64 p) const { return (1.0 + 1.0 / static_cast<double>(p)) / B(p); }

double EulerFactors::h_tilde(u64 p, int k) const {
    if (k < 1) throw DomainError("h_tilde: k must be >= 1");
    const double inv = 1.0 / B(p);
    return k % 2 ? inv : (1.0 + 1.0 / static_cast<double>(p)) * inv;
}

double EulerFactors::C_p(u64 p) const {
    if (cfg_.divides_n0(p)) return 1.0 / sym2_local(cfg_, table_, p);
    const double q = 1.0 - 1.0 / static_cast<double>(p);
    return q * q * B(p);
}

namespace {

int valuation(u64 n, u64 p) {
    int e = 0;
    while (n % p == 0) {
        n /= p;
        ++e;
    }
    return e;
}

}  // namespace

double EulerFactors::G_p(u64 p, u64 u, u64 ell) const {
    if (cfg_.divides_n0(p)) return 1.0 / sym2_local(cfg_, table_, p);
    const double pd = static_cast<double>(p);
    const int ku = valuation(u, p);
    const int kl = valuation(ell, p);
    if (ku % 2 == 1) return (1.0 - 1.0 / pd) * (1.0 - 1.0 / pd);  // p | u1
    if (ku > 0 || kl > 0) return (1.0 - 1.0 / pd) * (1.0 - 1.0 / (pd * pd));
    return C_p(p);
}

double EulerFactors::h_of(u64 ell) const {
    double v = 1.0;
    for (const auto& [p, e] : factorize_trial(ell).factors) {
        if (e > 1) throw DomainError("h_of: ell must be squarefree");
        v *= h(p);
    }
    return v;
}

double EulerFactors::h_tilde_of(u64 u) const {
    double v = 1.0;
    for (const auto& [p, e] : factorize_trial(u).factors) v *= h_tilde(p, e);
    return v;
}

TruncatedProduct EulerFactors::C_E() const {
    CompensatedSum full, half;
    for (u32 p : table_.primes()) {
        if (p > pmax_) break;
        const double lf = std::log(C_p(p));
        full.add(lf);
        if (2 * u64{p} <= pmax_) half.add(lf);
    }
    // C_p = 1 - (1 + a(p)^2)/p^2 + O(p^-3), so |log C_p| <= 6/p^2 and the
    // tail is at most 6 sum_{p > pmax} p^{-2} <= 6/(pmax log pmax).
    TruncatedProduct out;
    out.value = std::exp(full.value());
    out.value_half = std::exp(half.value());
    out.tail = 6.0 / (static_cast<double>(pmax_) * std::log(static_cast<double>(pmax_)));
    out.pmax = pmax_;
    return out;
}

double EulerFactors::G(u64 u, u64 ell) const {
    if (u == 0 || ell == 0) throw DomainError("G: u and ell must be positive");
    if (gcd(u, ell) != 1) throw DomainError("G: gcd(u, ell) must be 1");
    if (gcd(u * ell, cfg_.n0()) != 1) throw DomainError("G: gcd(u ell, N0) must be 1");
    for (const auto& [p, e] : factorize_trial(ell).factors) {
        if (e > 1) throw DomainError("G: ell must be squarefree");
        if (p > pmax_) throw DomainError("G: ell has a prime above pmax");
    }
    for (const auto& [p, e] : factorize_trial(u).factors)
        if (p > pmax_) throw DomainError("G: u has a prime above pmax");
    CompensatedSum acc;
    for (u32 p : table_.primes()) {
        if (p > pmax_) break;
        acc.add(std::log(G_p(p, u, ell)));
    }
    return std::exp(acc.value());
}

TruncatedProduct EulerFactors::sym2_times_C() const {
    CompensatedSum full, half;
    for (u32 p : table_.primes()) {
        if (p > pmax_) break;
        const double lf = std::log(sym2_local(cfg_, table_, p) * C_p(p));
        full.add(lf);
        if (2 * u64{p} <= pmax_) half.add(lf);
    }
    TruncatedProduct out;
    out.value = std::exp(full.value());
    out.value_half = std::exp(half.value());
    out.tail = std::fabs(full.value() - half.value());
    out.pmax = pmax_;
    return out;
}

TruncatedProduct EulerFactors::zeta2_partial() const {
    CompensatedSum full, half;
    for (u32 p : table_.primes()) {
        if (p > pmax_) break;
        const double pd = static_cast<double>(p);
        const double lf = -std::log1p(-1.0 / (pd * pd));
        full.add(lf);
        if (2 * u64{p} <= pmax_) half.add(lf);
    }
    TruncatedProduct out;
    out.value = std::exp(full.value());
    out.value_half = std::exp(half.value());
    out.tail = 1.0 / (static_cast<double>(pmax_) * std::log(static_cast<double>(pmax_)));  // sum_{p > x} p^{-2}
    out.pmax = pmax_;
    return out;
}

double EulerFactors::bracket1(const Resonator& r, u64 p) const {
    const double b = r.b_prime(p);
    if (b == 0.0) return 1.0;
    return 1.0 + b * b * h_tilde(p, 2) + 2.0 * table_.a(p) * b * h_tilde(p, 1) / std::sqrt(static_cast<double>(p));
}

double EulerFactors::bracket2(const Resonator& r, u64 p) const {
    const double b = r.b_prime(p);
    const double pd = static_cast<double>(p);
    return 1.0 + b * b * pd / (pd + 1.0);
}

double EulerFactors::g1_prime(const Resonator& r, u64 p) const {
    if (cfg_.divides_n0(p)) return 0.0;
    return h(p) / static_cast<double>(p) / bracket1(r, p);
}

double EulerFactors::g2_prime(const Resonator& r, u64 p) const {
    if (cfg_.divides_n0(p)) return 0.0;
    return 1.0 / (static_cast<double>(p) + 1.0) / bracket2(r, p);
}

double EulerFactors::g1(const Resonator& r, u64 ell) const {
    double v = 1.0;
    for (const auto& [p, e] : factorize_trial(ell).factors) {
        if (e > 1) return 0.0;
        v *= g1_prime(r, p);
    }
    return v;
}

double EulerFactors::g2(const Resonator& r, u64 ell) const {
    double v = 1.0;
    for (const auto& [p, e] : factorize_trial(ell).factors) {
        if (e > 1) return 0.0;
        v *= g2_prime(r, p);
    }
    return v;
}

std::vector<u64> EulerFactors::nonpositive_brackets(const Resonator& r) const {
    std::vector<u64> out;
    for (const auto& wp : r.primes())
        if (bracket1(r, wp.p) <= 0.0) out.push_back(wp.p);
    return out;
}

double EulerFactors::X1(const Resonator& r, double phi0, double X, double La_half, double sym2_C) const {
    // Brackets differ from 1 only at window primes.
    double brackets = 1.0;
    for (const auto& wp : r.primes()) brackets *= bracket1(r, wp.p);
    return brackets * 2.0 * X / static_cast<double>(cfg_.n0()) * phi0 * La_half * sym2_C;
}

double EulerFactors::X2(const Resonator& r, double phi0, double X) const {
    double brackets = 1.0;
    for (const auto& wp : r.primes()) brackets *= bracket2(r, wp.p);
    double local = 1.0;
    for (u64 p : cfg_.n0_primes()) {
        const double pd = static_cast<double>(p);
        local /= 1.0 - 1.0 / (pd * pd);
    }
    const double zeta2 = std::numbers::pi * std::numbers::pi / 6.0;
    return X / (static_cast<double>(cfg_.n0()) * zeta2) * phi0 * local * brackets;
}

boost::rational<std::int64_t> h_exact(u64 p, std::int64_t Ap) {
    const std::int64_t P = static_cast<std::int64_t>(p);
    return boost::rational<std::int64_t>((P + 1) * P * P, P * P * P + P * P + (P + 1) * (P + 1) - Ap * Ap);
}

}  // namespace qtwist
