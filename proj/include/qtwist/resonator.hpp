#pragma once

// Resonator R(d) = sum over odd m <= M of b(m) chi_d(m), with b multiplicative,
// supported on squarefree m whose primes lie in the window, and
// b(p) = sign a(p) L / (sqrt(p) log p), L = sqrt(log M log log M).

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qtwist/arith.hpp"
#include "qtwist/curve.hpp"

namespace qtwist {

struct ResonatorParams {
    u64 M = 1;
    int sign = 1;
    std::optional<std::pair<u64, u64>> window_override;  // [lo, hi]; lo > hi is empty

    // sqrt(log M log log M); 0 for M < 3, where log log M <= 0.
    double L() const;
    // [L^2, exp((log L)^2)]
    std::pair<double, double> paper_window() const;
    // The window in force: the override if present, else the default window [L^2, exp((log L)^2)].
    std::pair<double, double> window() const;
    std::string regime() const { return window_override ? "override" : "paper"; }

    // Without an override the default window must be nonempty, i.e. log L >= 2.
    void validate() const;
};

struct WindowPrime {
    u64 p = 0;
    double b = 0.0;
};

struct ResonatorValue {
    i64 d = 0;
    double value = 0.0;
    u64 support_count = 0;  // m <= M with b(m) != 0 that were summed
};

// Largest number of window primes accepted.
inline constexpr std::size_t kMaxWindowPrimes = std::size_t{1} << 20;

class Resonator {
public:
    // Window primes: odd, coprime to N0, inside the window and <= M.
    Resonator(const ResonatorParams& params, const CurveConfig& cfg, const CoefficientTable& table);

    const ResonatorParams& params() const noexcept { return params_; }
    const std::vector<WindowPrime>& primes() const noexcept { return primes_; }
    double L() const noexcept { return L_; }

    // b(p) for a prime (0 outside the window).
    double b_prime(u64 p) const;
    // b(m) by factoring m.
    double b(u64 m) const;

    // Depth-first search over window primes with product cap M.
    ResonatorValue resonate(i64 d) const;
    // Loop over odd m <= M; reference for resonate.
    ResonatorValue resonate_serial(i64 d) const;
    // OpenMP over d; output aligned with ds.
    std::vector<ResonatorValue> resonate_all(std::span<const i64> ds) const;

private:
    ResonatorParams params_;
    double L_ = 0.0;
    std::vector<WindowPrime> primes_;
};

}  // namespace qtwist
