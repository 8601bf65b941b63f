#pragma once

// Extreme central values over rough twists, the resonance ratios that bound
// them, the comparison bound, and the BSD quantity
//   S(E_d) = L(1/2, E_d) |E_d(Q)_tors|^2 / (Omega(E_d) Tam(E_d)).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtwist/arith.hpp"
#include "qtwist/curve.hpp"
#include "qtwist/moments.hpp"
#include "qtwist/twists.hpp"

namespace qtwist {

// 2 sqrt((W - 19.73)/(22W + 12)); W >= 20.
double theorem_bound_coefficient(int W);
// exp(coefficient sqrt(log X / log log X)), with the o(1) term set to 0.
double theorem_bound(double X, int W);

struct ExtremeReport {
    FamilyParams params;
    std::size_t family_size = 0;    // rough members
    std::size_t superset_size = 0;  // members with omega <= W
    i64 max_d = 0, min_d = 0;
    double max_value = 0.0, min_value = 0.0;
    i64 superset_max_d = 0;
    double superset_max_value = 0.0;
    std::optional<double> ratio_plus, ratio_minus;  // nullopt when the denominator is 0
    double theorem_bound = 0.0;                      // o(1) = 0
    bool sandwich_ok = true;        // max >= ratio+, min <= ratio-
    bool superset_ok = true;        // superset max >= rough max
    bool rough_implies_omega = true;  // every rough member has omega <= W

    nlohmann::json to_json() const;
};

// Exact max/min of the clamped values over the rough members and over the
// omega <= W superset; ratios weight by R^2 Phi with the matching resonator
// sign. Ties go to the smaller |d|. All spans align with fam. Throws
// DomainError if no member is rough.
ExtremeReport extreme_search(const CurveConfig& cfg, const FamilyParams& params, const WeightedFamily& fam,
                             std::span<const double> lvalues, std::span<const double> r_plus,
                             std::span<const double> r_minus);

// 1 + #roots mod p of 4x^3 + b2 x^2 + 2 b4 x + b6 (type I0* at p | d).
// Requires p odd, p | d, p not dividing N0.
int tamagawa_twist(const CurveConfig& cfg, u64 p, i64 d);
// prod_{p | d} T_p(d) times the configured c_p for p | N0.
u64 tamagawa_product(const CurveConfig& cfg, const TwistDiscriminant& t);

struct ShaReport {
    i64 d = 0;
    double L_value = 0.0;
    int torsion_sq = 1;
    double period_twist = 0.0;  // u~ Omega / sqrt|d|
    u64 tamagawa = 1;
    double S_value = 0.0;
    bool root_number_minus = false;  // root number -1: S = 0

    nlohmann::json to_json() const;
};

// Throws ConfigError when the period is missing.
ShaReport sha_row(const CurveConfig& cfg, const TwistDiscriminant& t, double L_value);

struct ShaSummary {
    std::size_t rows = 0;
    i64 max_d = 0;
    double max_S = 0.0;
    double comparison = 0.0;  // sqrt(X) theorem_bound(X, W)

    nlohmann::json to_json() const;
};
ShaSummary sha_summary(std::span<const ShaReport> rows, double X, int W);

}  // namespace qtwist
