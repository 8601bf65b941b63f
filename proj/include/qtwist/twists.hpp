#pragma once

// The twist family: fundamental discriminants d coprime to 2N in a fixed
// class a mod N0 and of fixed sign, with root number +1, plus the
// almost-prime and rough filters.

#include <optional>
#include <string>
#include <vector>

#include "qtwist/arith.hpp"
#include "qtwist/curve.hpp"

namespace qtwist {

struct FamilyParams {
    i64 a = 1;          // residue class mod N0, stored in [0, N0)
    int sign = 1;       // sign of d
    double X = 0.0;     // window |d| in [X/2, 5X/2]
    int W = 0;          // cap on omega(d); 0 means no cap
    double z = 2.0;     // roughness cutoff
    double D = 4.0;     // sieve level
    double s = 2.0;     // log D / log z
    u64 M = 1;          // resonator length

    // Parameter relations used for the headline bound: s = 2.023,
    // z = X^{1/(W+0.5)}, D = X^{2.023/(W+0.5)}, M = X^{(W-19.73)/(22W+12)}.
    // Requires W >= 20.
    static FamilyParams paper(const CurveConfig& cfg, i64 a, int sign, double X, int W);

    u64 lo() const;  // ceil(X/2)
    u64 hi() const;  // floor(5X/2)

    // Throws DomainError on a violated invariant.
    void validate(const CurveConfig& cfg) const;
};

struct TwistDiscriminant {
    i64 d = 0;
    int omega = 0;
    Factorization factorization;
    int root_number = 1;
    bool trivial = false;  // d = 1
};

// epsilon_E kronecker(d, -N). Throws DomainError unless gcd(d, 2N) = 1.
int root_number(const CurveConfig& cfg, i64 d);

struct ClassReport {
    i64 a = 0;
    int sign = 1;
    std::size_t sampled = 0;
    std::size_t positive = 0;  // members with root number +1
    bool admitted = false;     // every sample had root number +1
    bool mixed = false;        // both root numbers occurred
};

// Residues a mod N0 with a = 1, 5 mod 8, gcd(a, N0) = 1 whose sampled
// fundamental discriminants of the given sign all have root number +1.
std::vector<i64> discover_classes(const CurveConfig& cfg, int sign, std::size_t samples = 100,
                                  std::vector<ClassReport>* report = nullptr);

// Family members with lo <= |d| <= hi, ascending in |d|. Segmented factor
// sieve along the progression, OpenMP over segments. The prime table must
// reach sqrt(hi).
std::vector<TwistDiscriminant> enum_family(const CurveConfig& cfg, i64 a, int sign, u64 lo, u64 hi,
                                           const PrimeTable& primes);
std::vector<TwistDiscriminant> enum_family(const CurveConfig& cfg, const FamilyParams& params,
                                           const PrimeTable& primes);
// One-candidate-at-a-time reference: definitional tests and trial division.
std::vector<TwistDiscriminant> enum_family_serial(const CurveConfig& cfg, i64 a, int sign, u64 lo, u64 hi);

// omega(d) <= W.
std::vector<TwistDiscriminant> filter_almost_prime(const std::vector<TwistDiscriminant>& family, int W);
// No prime factor p < z with p not dividing N0.
std::vector<TwistDiscriminant> filter_rough(const std::vector<TwistDiscriminant>& family, const CurveConfig& cfg,
                                            double z);
bool is_rough(const TwistDiscriminant& t, const CurveConfig& cfg, double z);

}  // namespace qtwist
