#include "qtwist/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include <omp.h>

#include "qtwist/error.hpp"

namespace qtwist {

bool PrimeTable::contains(u64 n) const noexcept {
    if (n > 0xffffffffULL) return false;
    return std::binary_search(primes_.begin(), primes_.end(), static_cast<u32>(n));
}

u64 isqrt(u64 n) noexcept {
    using u128 = unsigned __int128;
    u64 r = std::min<u64>(static_cast<u64>(std::sqrt(static_cast<double>(n))), 0xFFFFFFFFULL);
    while (r > 0 && static_cast<u128>(r) * r > n) --r;
    while (r < 0xFFFFFFFFULL && static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

u64 gcd(u64 a, u64 b) noexcept {
    while (b != 0) {
        const u64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

u64 mulmod(u64 a, u64 b, u64 m) noexcept {
    return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

u64 powmod(u64 base, u64 exp, u64 m) noexcept {
    u64 result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

PrimeTable sieve_primes_serial(u64 limit) {
    if (limit < 2) throw DomainError("sieve_primes: limit must be >= 2");
    if (limit > kMaxSieveLimit) throw ResourceError("sieve_primes: limit exceeds memory budget");
    std::vector<bool> composite(limit + 1, false);
    std::vector<u32> primes;
    for (u64 i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        primes.push_back(static_cast<u32>(i));
        for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return PrimeTable(limit, std::move(primes));
}

PrimeTable sieve_primes(u64 limit) {
    if (limit < 2) throw DomainError("sieve_primes: limit must be >= 2");
    if (limit > kMaxSieveLimit) throw ResourceError("sieve_primes: limit exceeds memory budget");

    const u64 root = isqrt(limit);
    if (root < 2) return sieve_primes_serial(limit);
    const std::vector<u32> base = sieve_primes_serial(std::max<u64>(root, 2)).primes();

    // Segments cover [lo, hi) in absolute integers; memory per segment is
    // kSegment bytes regardless of limit.
    constexpr u64 kSegment = u64{1} << 18;
    const u64 nseg = (limit + 1 + kSegment - 1) / kSegment;
    std::vector<std::vector<u32>> found(nseg);

#pragma omp parallel for schedule(dynamic, 1)
    for (i64 s = 0; s < static_cast<i64>(nseg); ++s) {
        const u64 lo = static_cast<u64>(s) * kSegment;
        const u64 hi = std::min(lo + kSegment, limit + 1);
        std::vector<unsigned char> mark(hi - lo, 1);
        for (u64 i = lo; i < std::min<u64>(hi, 2); ++i) mark[i - lo] = 0;
        for (u32 p : base) {
            const u64 pp = u64{p} * p;
            if (pp >= hi) break;
            u64 start = std::max(pp, (lo + p - 1) / p * p);
            for (u64 j = start; j < hi; j += p) mark[j - lo] = 0;
        }
        auto& out = found[static_cast<std::size_t>(s)];
        for (u64 i = lo; i < hi; ++i)
            if (mark[i - lo]) out.push_back(static_cast<u32>(i));
    }

    std::size_t total = 0;
    for (const auto& v : found) total += v.size();
    std::vector<u32> primes;
    primes.reserve(total);
    for (const auto& v : found) primes.insert(primes.end(), v.begin(), v.end());
    return PrimeTable(limit, std::move(primes));
}

bool Factorization::squarefree() const noexcept {
    return std::all_of(factors.begin(), factors.end(), [](const auto& f) { return f.second == 1; });
}

std::string Factorization::to_string() const {
    if (factors.empty()) return "1";
    std::ostringstream os;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) os << '*';
        os << factors[i].first;
        if (factors[i].second > 1) os << '^' << factors[i].second;
    }
    return os.str();
}

Factorization factorize(i64 n, const PrimeTable& table) {
    if (n == 0) throw DomainError("factorize: n must be nonzero");
    Factorization out;
    u64 m = static_cast<u64>(n < 0 ? -static_cast<__int128>(n) : n);
    out.n = m;
    for (u32 p : table) {
        if (u64{p} * p > m) break;
        if (m % p) continue;
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        out.factors.emplace_back(p, e);
    }
    if (m > 1) {
        const auto lim = static_cast<unsigned __int128>(table.limit());
        if (static_cast<unsigned __int128>(m) > lim * lim)
            throw IncompleteFactorization("factorize: cofactor " + std::to_string(m) +
                                          " exceeds limit^2 of the prime table");
        out.factors.emplace_back(m, 1);
    }
    return out;
}

Factorization factorize_trial(u64 n) {
    if (n == 0) throw DomainError("factorize_trial: n must be nonzero");
    Factorization out;
    out.n = n;
    for (u64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.factors.emplace_back(p, e);
    }
    if (n > 1) out.factors.emplace_back(n, 1);
    return out;
}

int jacobi(i64 a, u64 n) noexcept {
    u64 x = mod_floor(a, n);
    int t = 1;
    while (x != 0) {
        while ((x & 1) == 0) {
            x >>= 1;
            const u64 r = n & 7;
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(x, n);
        if ((x & 3) == 3 && (n & 3) == 3) t = -t;
        x %= n;
    }
    return n == 1 ? t : 0;
}

int kronecker(i64 d, i64 n) noexcept {
    if (n == 0) return (d == 1 || d == -1) ? 1 : 0;
    int t = 1;
    u64 m;
    if (n < 0) {
        m = static_cast<u64>(-(n + 1)) + 1;
        if (d < 0) t = -t;
    } else {
        m = static_cast<u64>(n);
    }
    const int v = __builtin_ctzll(m);
    if (v > 0) {
        if ((d & 1) == 0) return 0;
        if (v & 1) {
            const u64 r = mod_floor(d, 8);
            if (r == 3 || r == 5) t = -t;
        }
        m >>= v;
    }
    return t * jacobi(d, m);
}

bool is_squarefree(u64 n) noexcept {
    if (n == 0) return false;
    for (u64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return false;
    }
    return true;
}

bool is_fundamental_discriminant(i64 d) noexcept {
    if (d == 0) return false;
    const u64 ad = static_cast<u64>(d < 0 ? -static_cast<__int128>(d) : d);
    if (mod_floor(d, 4) == 1) return is_squarefree(ad);
    if (mod_floor(d, 4) != 0) return false;
    const i64 m = d / 4;
    const u64 r = mod_floor(m, 4);
    return (r == 2 || r == 3) && is_squarefree(ad / 4);
}

}  // namespace qtwist
