#pragma once

// The fixed elliptic curve E: configuration, Hecke coefficients, Satake
// parameters and the symmetric-square Euler product.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qtwist/arith.hpp"

namespace qtwist {

// Long Weierstrass model [a1, a2, a3, a4, a6] and the usual derived invariants.
struct WeierstrassModel {
    std::array<i64, 5> a{};

    i64 b2() const noexcept { return a[0] * a[0] + 4 * a[1]; }
    i64 b4() const noexcept { return 2 * a[3] + a[0] * a[2]; }
    i64 b6() const noexcept { return a[2] * a[2] + 4 * a[4]; }
    __int128 b8() const noexcept;
    __int128 c4() const noexcept;
    __int128 c6() const noexcept;
    __int128 discriminant() const noexcept;
};

struct CurveConfig {
    std::string label;
    WeierstrassModel model;
    u64 conductor = 0;
    int root_number = 1;
    double real_period = 0.0;
    int torsion_order = 1;
    double u_tilde = 1.0;                  // positive half-integer
    std::map<u64, int> bad_tamagawa;       // c_p for p | N0
    std::map<u64, double> sym2_override;   // L_p(1, sym^2 E) for p | N0
    std::optional<int> twist_torsion_order;

    u64 n0() const noexcept;               // lcm(8, N)
    std::vector<u64> n0_primes() const;    // primes dividing N0, ascending
    bool divides_n0(u64 p) const noexcept { return n0() % p == 0; }
    bool bad_at(u64 p) const noexcept { return conductor % p == 0; }

    // Throws ConfigError on any violated invariant.
    void validate() const;
};

// key = value text, one key per line, '#' comments. Lists as [..], maps as
// {p: value, ...}.
CurveConfig parse_curve_config(const std::string& text);
CurveConfig load_curve_config(const std::string& path);

// Normalized a(p) = (p + 1 - #E(F_p)) / sqrt(p) for good p. Throws DomainError
// when p | N.
double ap_point_count(const CurveConfig& cfg, u64 p);

class CoefficientTable {
public:
    CoefficientTable() = default;

    u64 nmax() const noexcept { return nmax_; }
    const PrimeTable& primes() const noexcept { return primes_; }

    // Unnormalized integer coefficient A_n = a(n) sqrt(n).
    std::int32_t A(u64 n) const { return an_.at(n); }
    // Normalized a(n).
    double a(u64 n) const { return static_cast<double>(an_.at(n)) / std::sqrt(static_cast<double>(n)); }
    std::span<const std::int32_t> raw() const noexcept { return an_; }

    bool is_bad(u64 p) const noexcept { return conductor_ % p == 0; }
    // (alpha_p, beta_p) with alpha_p + beta_p = a(p), alpha_p beta_p = 1, good p only.
    std::pair<std::complex<double>, std::complex<double>> satake(u64 p) const;

    // A_p for every prime p <= nmax, aligned with primes().
    std::vector<std::int32_t> prime_coefficients() const;

    friend CoefficientTable build_coefficients_from_primes(const CurveConfig&, u64, const PrimeTable&,
                                                           std::span<const std::int32_t>);

private:
    u64 nmax_ = 0;
    u64 conductor_ = 1;
    PrimeTable primes_;
    std::vector<std::int32_t> an_;
};

// Upper bound on nmax accepted by build_coefficients.
inline constexpr u64 kMaxCoefficients = u64{1} << 31;

// Point counts for every prime (OpenMP), then a multiplicative sieve.
CoefficientTable build_coefficients(const CurveConfig& cfg, u64 nmax);
// Same, reusing known A_p for the leading primes (e.g. from a cache).
CoefficientTable build_coefficients(const CurveConfig& cfg, u64 nmax, std::span<const std::int32_t> known_ap);
CoefficientTable build_coefficients_from_primes(const CurveConfig& cfg, u64 nmax, const PrimeTable& primes,
                                                std::span<const std::int32_t> ap);

// (sum_{p <= x} a(p)^2 log p) / x.
double pnt_ratio(const CoefficientTable& table, u64 x);

// Local factor L_p(1, sym^2 E). Good primes use the Satake form, p | N uses
// (1 - a(p)^2/p)^{-1}; CurveConfig::sym2_override wins for p | N0.
double sym2_local(const CurveConfig& cfg, const CoefficientTable& table, u64 p);

struct Sym2Value {
    double value = 0.0;       // product over p <= pmax
    double value_half = 0.0;  // product over p <= pmax/2
    u64 pmax = 0;
};
Sym2Value sym2_value(const CoefficientTable& table, const CurveConfig& cfg, u64 pmax);

}  // namespace qtwist
