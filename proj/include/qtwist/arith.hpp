#pragma once

// Integer primitives: primes, factorization, quadratic symbols and
// fundamental discriminants.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qtwist {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using u32 = std::uint32_t;

// Largest sieve limit accepted by sieve_primes (memory budget for the
// resulting table is about 4 bytes per prime).
inline constexpr u64 kMaxSieveLimit = u64{1} << 32;

class PrimeTable {
public:
    PrimeTable() = default;
    PrimeTable(u64 limit, std::vector<u32> primes) : limit_(limit), primes_(std::move(primes)) {}

    u64 limit() const noexcept { return limit_; }
    const std::vector<u32>& primes() const noexcept { return primes_; }
    std::size_t size() const noexcept { return primes_.size(); }
    u32 operator[](std::size_t i) const noexcept { return primes_[i]; }
    auto begin() const noexcept { return primes_.begin(); }
    auto end() const noexcept { return primes_.end(); }

    // Binary search; valid for n <= limit().
    bool contains(u64 n) const noexcept;

private:
    u64 limit_ = 0;
    std::vector<u32> primes_;
};

// Segmented sieve of Eratosthenes, OpenMP over segments.
PrimeTable sieve_primes(u64 limit);
// Plain single-array sieve; reference for tests and the benchmark.
PrimeTable sieve_primes_serial(u64 limit);

struct Factorization {
    u64 n = 1;
    std::vector<std::pair<u64, int>> factors;  // ascending primes, exponents >= 1

    int omega() const noexcept { return static_cast<int>(factors.size()); }
    bool squarefree() const noexcept;
    std::string to_string() const;  // "3*5^2"; "1" for n = 1
};

// Trial division by the table. Throws IncompleteFactorization when a cofactor
// above limit^2 remains.
Factorization factorize(i64 n, const PrimeTable& table);
// Trial division without a table (small arguments, tests, config checks).
Factorization factorize_trial(u64 n);

u64 isqrt(u64 n) noexcept;
u64 gcd(u64 a, u64 b) noexcept;
u64 mulmod(u64 a, u64 b, u64 m) noexcept;
u64 powmod(u64 base, u64 exp, u64 m) noexcept;

// Jacobi symbol (a/n) for odd n > 0.
int jacobi(i64 a, u64 n) noexcept;
// Full Kronecker symbol (d/n), any signs.
int kronecker(i64 d, i64 n) noexcept;

bool is_squarefree(u64 n) noexcept;
bool is_fundamental_discriminant(i64 d) noexcept;

// Non-negative residue of a modulo m.
inline u64 mod_floor(i64 a, u64 m) noexcept {
    const i64 r = a % static_cast<i64>(m);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

}  // namespace qtwist
