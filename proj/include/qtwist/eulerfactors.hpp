#pragma once

// Arithmetic factors of the first-moment and congruence-sum main terms.
// Every infinite product is truncated at a shared pmax.
//
//   Y(p) = (1 - alpha^2/p)(1 - beta^2/p) = 1 - (a(p)^2 - 2)/p + 1/p^2
//   B(p) = 1 + Y(p)/p + 1/p
//   h(p) = (1 + 1/p) / B(p)
//   h~(p^k) = 1/B(p) for odd k, (1 + 1/p)/B(p) for even k
//   C_p(E) = (1 - 1/p)^2 B(p) for p not dividing N0, L_p(1, sym^2 E)^{-1} otherwise

#include <cstdint>
#include <vector>

#include <boost/rational.hpp>

#include "qtwist/arith.hpp"
#include "qtwist/curve.hpp"
#include "qtwist/resonator.hpp"

namespace qtwist {

struct TruncatedProduct {
    double value = 0.0;       // over p <= pmax
    double value_half = 0.0;  // over p <= pmax/2
    double tail = 0.0;        // estimate of |log(value) - log(limit)|
    u64 pmax = 0;
};

class EulerFactors {
public:
    // The table must cover pmax and outlive this object.
    EulerFactors(const CurveConfig& cfg, const CoefficientTable& table, u64 pmax = 100000);

    u64 pmax() const noexcept { return pmax_; }
    const CurveConfig& config() const noexcept { return cfg_; }

    // Per-prime factors; all throw DomainError for p | N0.
    double Y(u64 p) const;
    double B(u64 p) const;
    double h(u64 p) const;
    double h_tilde(u64 p, int k) const;
    // Any prime.
    double C_p(u64 p) const;
    // Four-case local factor of G(1; u, l) at p.
    double G_p(u64 p, u64 u, u64 ell) const;

    // Multiplicative extensions.
    double h_of(u64 ell) const;        // ell squarefree, coprime to N0
    double h_tilde_of(u64 u) const;    // u coprime to N0
    TruncatedProduct C_E() const;
    // G(1; u, l) = prod_{p <= pmax} G_p(1; u, l); u l must be <= pmax-smooth.
    double G(u64 u, u64 ell) const;
    // L(1, sym^2 E) C(E) as one product, which converges faster than either factor.
    TruncatedProduct sym2_times_C() const;
    // prod_{p <= pmax} (1 - 1/p^2)^{-1}
    TruncatedProduct zeta2_partial() const;

    // Resonated factors.
    double bracket1(const Resonator& r, u64 p) const;  // 1 + b^2 h~(p^2) + 2 a(p) b h~(p) / sqrt(p)
    double bracket2(const Resonator& r, u64 p) const;  // 1 + b^2 p/(p+1)
    double g1_prime(const Resonator& r, u64 p) const;
    double g2_prime(const Resonator& r, u64 p) const;
    double g1(const Resonator& r, u64 ell) const;       // 0 unless ell squarefree and coprime to N0
    double g2(const Resonator& r, u64 ell) const;
    // Window primes with bracket1 <= 0.
    std::vector<u64> nonpositive_brackets(const Resonator& r) const;

    // X1 = prod bracket1 (2X/N0) Phi^(0) L_a(1/2) L(1, sym^2 E) C(E)
    double X1(const Resonator& r, double phi0, double X, double La_half, double sym2_C) const;
    // X2 = X/(N0 zeta(2)) Phi^(0) prod_{p | N0} (1 - 1/p^2)^{-1} prod bracket2
    double X2(const Resonator& r, double phi0, double X) const;

private:
    void require_good(u64 p, const char* what) const;

    CurveConfig cfg_;
    const CoefficientTable& table_;
    u64 pmax_;
};

// h(p) in exact rational arithmetic from the integer trace A_p:
// h(p) = (p + 1) p^2 / (p^3 + p^2 + (p + 1)^2 - A_p^2).
boost::rational<std::int64_t> h_exact(u64 p, std::int64_t Ap);

}  // namespace qtwist
