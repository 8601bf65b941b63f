#include "qtwist/twists.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "qtwist/error.hpp"

namespace qtwist {

FamilyParams FamilyParams::paper(const CurveConfig& cfg, i64 a, int sign, double X, int W) {
    if (W < 20) throw DomainError("--paper-regime requires W >= 20 (got W = " + std::to_string(W) + ")");
    if (!(X >= 16.0)) throw DomainError("--paper-regime requires X >= 16");
    FamilyParams p;
    p.a = static_cast<i64>(mod_floor(a, cfg.n0()));
    p.sign = sign;
    p.X = X;
    p.W = W;
    p.s = 2.023;
    p.z = std::pow(X, 1.0 / (W + 0.5));
    p.D = std::pow(X, 2.023 / (W + 0.5));
    const double M = std::pow(X, (W - 19.73) / (22.0 * W + 12.0));
    p.M = std::max<u64>(1, static_cast<u64>(std::floor(M)));
    p.validate(cfg);
    return p;
}

u64 FamilyParams::lo() const { return static_cast<u64>(std::ceil(X / 2.0)); }
u64 FamilyParams::hi() const { return static_cast<u64>(std::floor(2.5 * X)); }

void FamilyParams::validate(const CurveConfig& cfg) const {
    const u64 N0 = cfg.n0();
    if (a < 0 || static_cast<u64>(a) >= N0) throw DomainError("family: residue a must lie in [0, N0)");
    if (a % 8 != 1 && a % 8 != 5) throw DomainError("family: a must be 1 or 5 mod 8");
    if (gcd(static_cast<u64>(a), N0) != 1) throw DomainError("family: gcd(a, N0) must be 1");
    if (sign != 1 && sign != -1) throw DomainError("family: sign must be +1 or -1");
    if (!(X > 0.0)) throw DomainError("family: X must be positive");
    if (W < 0) throw DomainError("family: W must be >= 0");
    if (!(z > 0.0) || !(D > 0.0)) throw DomainError("family: z and D must be positive");
    if (M < 1) throw DomainError("family: M must be >= 1");
}

int root_number(const CurveConfig& cfg, i64 d) {
    if (d == 0) throw DomainError("root_number: d must be nonzero");
    const u64 m = static_cast<u64>(d < 0 ? -static_cast<__int128>(d) : d);
    if (gcd(m, 2 * cfg.conductor) != 1)
        throw DomainError("root_number: gcd(d, 2N) != 1 for d = " + std::to_string(d));
    return cfg.root_number * kronecker(d, -static_cast<i64>(cfg.conductor));
}

namespace {

// |d| residue mod N0 for d = a mod N0 of the given sign.
u64 abs_residue(i64 a, int sign, u64 N0) {
    return sign > 0 ? mod_floor(a, N0) : mod_floor(-a, N0);
}

}  // namespace

std::vector<i64> discover_classes(const CurveConfig& cfg, int sign, std::size_t samples,
                                  std::vector<ClassReport>* report) {
    if (sign != 1 && sign != -1) throw DomainError("discover_classes: sign must be +1 or -1");
    if (samples == 0) throw DomainError("discover_classes: samples must be positive");
    const u64 N0 = cfg.n0();
    std::vector<i64> out;
    for (u64 a = 1; a < N0; ++a) {
        if (a % 8 != 1 && a % 8 != 5) continue;
        if (gcd(a, N0) != 1) continue;
        ClassReport rep;
        rep.a = static_cast<i64>(a);
        rep.sign = sign;
        const u64 r0 = abs_residue(static_cast<i64>(a), sign, N0);
        bool seen_minus = false;
        for (u64 m = r0; rep.sampled < samples; m += N0) {
            if (!is_squarefree(m)) continue;
            const i64 d = sign * static_cast<i64>(m);
            ++rep.sampled;
            if (root_number(cfg, d) == 1)
                ++rep.positive;
            else
                seen_minus = true;
        }
        rep.admitted = rep.positive == rep.sampled;
        rep.mixed = rep.positive > 0 && seen_minus;
        if (rep.admitted) out.push_back(rep.a);
        if (report) report->push_back(rep);
    }
    return out;
}

std::vector<TwistDiscriminant> enum_family(const CurveConfig& cfg, i64 a, int sign, u64 lo, u64 hi,
                                           const PrimeTable& primes) {
    const u64 N0 = cfg.n0();
    if (a < 0 || static_cast<u64>(a) >= N0) throw DomainError("enum_family: a must lie in [0, N0)");
    if (sign != 1 && sign != -1) throw DomainError("enum_family: sign must be +1 or -1");
    if (gcd(static_cast<u64>(a), N0) != 1 || (a % 4) != 1)
        throw DomainError("enum_family: a must be 1 mod 4 and coprime to N0");
    lo = std::max<u64>(lo, 1);
    if (hi < lo) return {};
    const u64 root = isqrt(hi);
    if (primes.limit() < root) throw DomainError("enum_family: prime table must reach sqrt(hi)");

    const u64 r0 = abs_residue(a, sign, N0);
    if (hi < r0) return {};
    const u64 kmin = lo > r0 ? (lo - r0 + N0 - 1) / N0 : 0;
    const u64 kmax = (hi - r0) / N0;
    if (kmax < kmin) return {};

    // Sieving primes with the first k at which q | r0 + k N0.
    struct Sieving {
        u64 q;
        u64 k0;
    };
    std::vector<Sieving> sieving;
    for (u32 q : primes) {
        if (q > root) break;
        if (N0 % q == 0) continue;
        const u64 inv = powmod(N0 % q, q - 2, q);
        sieving.push_back({q, mulmod(q - r0 % q, inv, q) % q});
    }

    constexpr u64 kSegment = u64{1} << 14;
    const u64 nk = kmax - kmin + 1;
    const u64 nseg = (nk + kSegment - 1) / kSegment;
    std::vector<std::vector<TwistDiscriminant>> found(nseg);

#pragma omp parallel for schedule(dynamic, 1)
    for (i64 s = 0; s < static_cast<i64>(nseg); ++s) {
        const u64 kb = kmin + static_cast<u64>(s) * kSegment;
        const u64 len = std::min(kSegment, kmax + 1 - kb);
        std::vector<u64> rem(len);
        std::vector<unsigned char> squarefree(len, 1);
        std::vector<std::vector<std::pair<u64, int>>> factors(len);
        for (u64 i = 0; i < len; ++i) rem[i] = r0 + (kb + i) * N0;
        for (const auto& [q, k0] : sieving) {
            u64 i = (k0 + q - kb % q) % q;
            for (; i < len; i += q) {
                int e = 0;
                while (rem[i] % q == 0) {
                    rem[i] /= q;
                    ++e;
                }
                if (e > 1) squarefree[i] = 0;
                factors[i].emplace_back(q, e);
            }
        }
        auto& out = found[static_cast<std::size_t>(s)];
        for (u64 i = 0; i < len; ++i) {
            if (!squarefree[i]) continue;
            const u64 m = r0 + (kb + i) * N0;
            const i64 d = sign * static_cast<i64>(m);
            const int eps = root_number(cfg, d);
            if (eps != 1) continue;
            TwistDiscriminant t;
            t.d = d;
            t.factorization.n = m;
            t.factorization.factors = std::move(factors[i]);
            if (rem[i] > 1) t.factorization.factors.emplace_back(rem[i], 1);
            t.omega = t.factorization.omega();
            t.root_number = eps;
            t.trivial = d == 1;
            out.push_back(std::move(t));
        }
    }

    std::vector<TwistDiscriminant> family;
    for (auto& v : found) std::move(v.begin(), v.end(), std::back_inserter(family));
    return family;
}

std::vector<TwistDiscriminant> enum_family(const CurveConfig& cfg, const FamilyParams& params,
                                           const PrimeTable& primes) {
    params.validate(cfg);
    return enum_family(cfg, params.a, params.sign, params.lo(), params.hi(), primes);
}

std::vector<TwistDiscriminant> enum_family_serial(const CurveConfig& cfg, i64 a, int sign, u64 lo, u64 hi) {
    const u64 N0 = cfg.n0();
    std::vector<TwistDiscriminant> out;
    for (u64 m = std::max<u64>(lo, 1); m <= hi; ++m) {
        const i64 d = sign * static_cast<i64>(m);
        if (mod_floor(d, N0) != static_cast<u64>(a)) continue;
        if (!is_fundamental_discriminant(d)) continue;
        if (gcd(m, 2 * cfg.conductor) != 1) continue;
        const int eps = root_number(cfg, d);
        if (eps != 1) continue;
        TwistDiscriminant t;
        t.d = d;
        t.factorization = factorize_trial(m);
        t.omega = t.factorization.omega();
        t.root_number = eps;
        t.trivial = d == 1;
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<TwistDiscriminant> filter_almost_prime(const std::vector<TwistDiscriminant>& family, int W) {
    std::vector<TwistDiscriminant> out;
    std::copy_if(family.begin(), family.end(), std::back_inserter(out),
                 [W](const TwistDiscriminant& t) { return t.omega <= W; });
    return out;
}

bool is_rough(const TwistDiscriminant& t, const CurveConfig& cfg, double z) {
    const u64 N0 = cfg.n0();
    return std::none_of(t.factorization.factors.begin(), t.factorization.factors.end(), [&](const auto& f) {
        return static_cast<double>(f.first) < z && N0 % f.first != 0;
    });
}

std::vector<TwistDiscriminant> filter_rough(const std::vector<TwistDiscriminant>& family, const CurveConfig& cfg,
                                            double z) {
    std::vector<TwistDiscriminant> out;
    std::copy_if(family.begin(), family.end(), std::back_inserter(out),
                 [&](const TwistDiscriminant& t) { return is_rough(t, cfg, z); });
    return out;
}

}  // namespace qtwist
