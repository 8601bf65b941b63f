#pragma once

// Empirical moments over the twist family next to their predicted main terms:
// character sums, the twisted first moment, and the resonated congruence
// sums C and D, plus the remainder ledger sum_l |r_l|.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtwist/arith.hpp"
#include "qtwist/bump.hpp"
#include "qtwist/curve.hpp"
#include "qtwist/eulerfactors.hpp"
#include "qtwist/resonator.hpp"
#include "qtwist/twists.hpp"

namespace qtwist {

// Family members with X/2 <= |d| <= 5X/2 and their weights Phi(|d|/X).
struct WeightedFamily {
    i64 a = 1;
    int sign = 1;
    double X = 0.0;
    std::vector<TwistDiscriminant> members;
    std::vector<double> phi;

    std::size_t size() const noexcept { return members.size(); }
    std::vector<i64> discriminants() const;
};

// The prime table must reach sqrt(5X/2).
WeightedFamily weighted_family(const CurveConfig& cfg, i64 a, int sign, double X, const BumpFunction& bump,
                               const PrimeTable& primes);

// Constants shared by the first-moment and C-sum main terms.
struct MainTermInputs {
    double phi0 = 0.0;     // int Phi(x) dx
    double La_half = 0.0;  // L_a(1/2)
    double sym2_C = 0.0;   // L(1, sym^2 E) C(E)
};
MainTermInputs main_term_inputs(const CurveConfig& cfg, const CoefficientTable& table, const EulerFactors& ef,
                                i64 a, const BumpFunction& bump);

enum class MomentKind { char_square, char_nonsquare, first_moment, C_sum, D_sum };
std::string to_string(MomentKind kind);

struct MomentReport {
    MomentKind kind = MomentKind::char_square;
    nlohmann::json params;
    double empirical = 0.0;
    double predicted = 0.0;
    double ratio = 0.0;            // empirical / predicted; NaN when predicted = 0
    double remainder_scale = 0.0;  // size of the error term, constants omitted
    std::size_t family_size = 0;   // members with l | d

    nlohmann::json to_json() const;
    std::string to_jsonl() const;  // one line, no trailing newline
};

// sum_{l | d} chi_d(n) Phi(|d|/X). Predicted
//   Phi^(0) X/(l N0) prod_{p | nl} (1 + 1/p)^{-1} prod_{p not | N0} (1 - 1/p^2)
// for square n, 0 otherwise; remainder scale X^{1/2} n^{1/2}.
// Requires gcd(n, l) = 1, gcd(nl, N0) = 1, l squarefree.
MomentReport char_moment(const CurveConfig& cfg, const WeightedFamily& fam, u64 n, u64 ell, double phi0);

// sum_{l | d} L(1/2, E_d) chi_d(u) Phi(|d|/X) against
//   2 X a(u1)/(l u1^{1/2} N0) Phi^(0) L_a(1/2) L(1, sym^2 E) C(E) h~(u) h(l);
// remainder scale X^{7/8} u^{3/8} l^{1/4}. lvalues is aligned with fam.
MomentReport first_moment(const CurveConfig& cfg, const CoefficientTable& table, const EulerFactors& ef,
                          const WeightedFamily& fam, std::span<const double> lvalues, u64 u, u64 ell,
                          const MainTermInputs& in);

// sum_{l | d} L(1/2, E_d) R(d)^2 Phi(|d|/X) against g1(l) X1; remainder scale
// X^{7/8} M^{11/4} l^{1/4}.
MomentReport congruence_C(const CurveConfig& cfg, const EulerFactors& ef, const WeightedFamily& fam,
                          std::span<const double> lvalues, std::span<const double> resonator_values,
                          const Resonator& res, u64 ell, const MainTermInputs& in);

// sum_{l | d} R(d)^2 Phi(|d|/X) against g2(l) X2; remainder scale M^3 X^{1/2}.
MomentReport congruence_D(const CurveConfig& cfg, const EulerFactors& ef, const WeightedFamily& fam,
                          std::span<const double> resonator_values, const Resonator& res, u64 ell, double phi0);

// Sums of per-member weights over members divisible by l, for every
// squarefree l <= D coprime to N0. Filled in family order.
class DivisorBuckets {
public:
    DivisorBuckets(const WeightedFamily& fam, std::span<const double> weights, u64 D);
    u64 level() const noexcept { return D_; }
    // |A_l|; 0 for l not squarefree or sharing a factor with every member.
    double operator()(u64 ell) const;

private:
    u64 D_;
    std::vector<double> sums_;
};

struct RemainderLedger {
    u64 D = 0;
    std::size_t terms = 0;   // squarefree l <= D coprime to N0
    double R = 0.0;          // sum |r_l|
    double max_abs = 0.0;    // max |r_l|
    u64 argmax = 0;
};

// r_l = |A_l| - g(l) X_hat over squarefree l <= D coprime to N0.
RemainderLedger remainder_ledger(const CurveConfig& cfg, const DivisorBuckets& buckets,
                                 const std::function<double(u64)>& g, double X_hat);

}  // namespace qtwist
