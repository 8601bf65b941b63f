#pragma once

// Linear sieve: the bound functions F, f and a runner that compares the
// sieve bounds with a directly computed sifted sum.
//
//   sF(s) = 2 e^gamma on [1, 3],  (sF(s))' = f(s - 1) for s > 3
//   sf(s) = 0 at s = 2,           (sf(s))' = F(s - 1) for s > 2

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "qtwist/arith.hpp"

namespace qtwist {

class SieveFunctionTable {
public:
    SieveFunctionTable() = default;

    const std::vector<double>& grid() const noexcept { return s_; }
    const std::vector<double>& F_values() const noexcept { return F_; }
    const std::vector<double>& f_values() const noexcept { return f_; }
    double step() const noexcept { return h_; }
    double smax() const noexcept { return s_.empty() ? 0.0 : s_.back(); }

    // Closed forms where they hold (F on [1, 3], f on [1, 4]); four-point
    // Lagrange interpolation on the grid elsewhere.
    double F(double s) const;
    double f(double s) const;

    friend SieveFunctionTable sieve_functions(double smax, double step);

private:
    double interpolate(const std::vector<double>& v, double s) const;

    double h_ = 0.0;
    std::vector<double> s_, F_, f_;
};

// Closed forms: F(s) = 2e^gamma/s (1 <= s <= 3), f(s) = 2e^gamma log(s-1)/s
// (2 <= s <= 4), f = 0 below 2.
double sieve_F_closed(double s);
double sieve_f_closed(double s);
// sF(s) = 2e^gamma (1 + int_2^{s-1} log(t-1)/t dt) for 3 <= s <= 5.
double sieve_F_second_closed(double s);

// Grid s = 1 + i step up to smax. Requires smax <= 10, 1/step an integer and
// step <= 1e-3 (NumericalError otherwise). The delay system is integrated
// with a fourth-order cumulative stencil.
SieveFunctionTable sieve_functions(double smax, double step);

struct SieveWeight {
    u64 n = 0;
    double a = 0.0;  // a_n >= 0
};

struct SieveRun {
    // inputs
    std::vector<SieveWeight> weights;
    std::function<double(u64)> g;           // g(p) for p in the prime set, 0 <= g(p) < 1
    std::function<bool(u64)> in_prime_set;  // the sifting set P
    double X_hat = 0.0;
    double D = 0.0;
    double z = 0.0;
    double correction_constant = 0.0;  // c in c (log D)^{-1/6}

    // outputs
    double s = 0.0;
    double V = 0.0;      // prod_{p in P, p <= z} (1 - g(p))
    double R = 0.0;      // sum_{l | P(z), l <= D} |r_l|
    std::size_t remainder_terms = 0;
    double S_empirical = 0.0;  // sum_{(n, P(z)) = 1} a_n
    std::optional<double> lower;  // X V f(s) - R, only for s >= 2
    double upper = 0.0;           // X V F(s) + R
    std::optional<double> lower_corrected;
    double upper_corrected = 0.0;
};

// |A_l| for squarefree l.
using CongruenceOracle = std::function<double(u64)>;

// r_l = |A_l| - g(l) X_hat over l | P(z), l <= D; OpenMP over l with an
// ordered reduction. Throws DomainError if s < 1; the lower bound needs s >= 2.
SieveRun run_sieve(SieveRun run, const SieveFunctionTable& table, const CongruenceOracle& oracle);

// |A_l| straight from the weights.
CongruenceOracle weights_oracle(const std::vector<SieveWeight>& weights);

struct DensityCheck {
    bool ok = true;
    double w = 0.0;  // first violating pair, if any
    double z = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    std::size_t pairs = 0;
};

// prod_{w <= p < z', p in P} (1 - g(p))^{-1} <= (log z'/log w)(1 + L/log w)
// for all 2 <= w < z' <= z. The worst cases sit at w = a prime and z' just
// above a prime, so those pairs are scanned.
DensityCheck density_condition_check(const std::function<double(u64)>& g,
                                     const std::function<bool(u64)>& in_prime_set, double z, double L_const);

struct SweepRow {
    double s = 0.0;
    double F = 0.0;
    double f = 0.0;
};
// f and F at n + 1 evenly spaced s in [s_lo, s_hi].
std::vector<SweepRow> sieve_sweep(const SieveFunctionTable& table, double s_lo, double s_hi, int n);

}  // namespace qtwist
