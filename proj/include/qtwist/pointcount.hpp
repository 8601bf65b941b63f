#pragma once

// Trace of Frobenius A_p = p + 1 - #E(F_p).

#include <span>
#include <vector>

#include "qtwist/arith.hpp"
#include "qtwist/curve.hpp"

namespace qtwist {

// Counts every projective point of the reduced long Weierstrass model, in
// O(p) with a quadratic-residue table. At bad primes this is the singular
// cubic, which gives 1 / -1 / 0 for split / nonsplit / additive reduction.
i64 trace_bruteforce(const WeierstrassModel& model, u64 p);

// Baby-step giant-step on the short model y^2 = x^3 + a x + b over F_p
// (p >= 5, good reduction), combining point orders on E and its quadratic
// twist until one group order in the Hasse interval is left. Falls back to
// the O(p) count if that does not happen within a fixed number of points.
i64 trace_bsgs(const WeierstrassModel& model, u64 p);

// Dispatch: brute force for small or bad p, BSGS otherwise.
i64 trace_of_frobenius(const WeierstrassModel& model, u64 conductor, u64 p);

// A_p for each prime, OpenMP over primes.
std::vector<std::int32_t> traces_parallel(const WeierstrassModel& model, u64 conductor, std::span<const u32> primes);
// Serial brute-force reference.
std::vector<std::int32_t> traces_serial(const WeierstrassModel& model, std::span<const u32> primes);

}  // namespace qtwist
