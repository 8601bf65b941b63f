#pragma once

// Central values L(1/2, E_d) from the exact smoothed series
//   L(1/2, E_d) = (1 + eps(d)) sum_n a(n) chi_d(n) n^{-1/2} exp(-n/Q),
// Q = sqrt(N)|d|/(2 pi), and the finite Euler product L_a(s) at p | N0.

#include <span>
#include <vector>

#include "qtwist/arith.hpp"
#include "qtwist/curve.hpp"

namespace qtwist {

struct CentralValue {
    i64 d = 0;
    double value = 0.0;       // clamped at 0 when within the tail bound of 0
    double raw = 0.0;         // unclamped sum
    u64 truncation = 0;       // T: terms n <= T were summed
    double tail_bound = 0.0;  // rigorous bound on the omitted terms
    int root_number = 1;
};

class LValueEngine {
public:
    // The table must outlive the engine.
    LValueEngine(const CurveConfig& cfg, const CoefficientTable& table);

    double conductor_scale(i64 d) const;  // Q = sqrt(N)|d|/(2 pi)
    // T = ceil(Q (log(1/tol) + log(Q + 2) + 4)).
    static u64 truncation(double Q, double tol);
    // nmax a table needs for central_value(d, tol).
    u64 required_nmax(i64 d, double tol) const;
    // Tail of the omitted terms n > T, using |a(n)| <= tau(n) <= 2 sqrt(n).
    static double tail_bound(double Q, u64 T);

    // Blocked kernel: per-d character table times a periodic weight.
    CentralValue central_value(i64 d, double tol) const;
    // Same series with an explicit truncation T.
    CentralValue central_value_truncated(i64 d, u64 T) const;
    // Direct loop with a Kronecker symbol per term; reference for the kernel.
    CentralValue central_value_serial(i64 d, double tol) const;
    // OpenMP over d; output aligned with ds.
    std::vector<CentralValue> central_values(std::span<const i64> ds, double tol) const;

    // Balanced smoothing: sum a(n) chi(n) n^{-1/2} (exp(-n/(Q X0)) + eps exp(-n X0/Q)).
    // Equals the central value for every X0 > 0.
    double central_value_balanced(i64 d, double X0, double tol) const;

    // Completed Lambda(s, E_d) = Q^s Gamma(s + 1/2) L(s, E_d) for real s,
    // from the incomplete-gamma series split at X0.
    double completed(i64 d, double s, double X0, double tol) const;

    const CoefficientTable& table() const noexcept { return table_; }
    const CurveConfig& config() const noexcept { return cfg_; }

private:
    void require(u64 T) const;

    CurveConfig cfg_;
    const CoefficientTable& table_;
    std::vector<double> c_;  // a(n) n^{-1/2} = A_n / n
};

// L_a(s) as the Euler product over p | N0 with chi(p) = kronecker(a, p),
// which is constant on the class a mod N0.
double local_factor_La(const CurveConfig& cfg, const CoefficientTable& table, i64 a_residue, double s);
// The same Dirichlet series summed over N0-smooth n <= bound.
double local_factor_La_series(const CurveConfig& cfg, const CoefficientTable& table, i64 a_residue, double s,
                              u64 bound);

}  // namespace qtwist
