#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "qtwist/curve.hpp"

namespace qtwist::testing {

inline const CurveConfig& curve_11a1() {
    static const CurveConfig cfg = load_curve_config(QTWIST_DATA_DIR "/11a1.conf");
    return cfg;
}

// Built once per process and reused by every test case.
inline const CoefficientTable& table_11a1(u64 nmax) {
    static std::map<u64, std::unique_ptr<CoefficientTable>> tables;
    auto& slot = tables[nmax];
    if (!slot) slot = std::make_unique<CoefficientTable>(build_coefficients(curve_11a1(), nmax));
    return *slot;
}

// q-expansion of eta(z)^2 eta(11z)^2 = q prod (1 - q^n)^2 (1 - q^{11n})^2,
// the newform attached to 11a1: coefficient of q^n for 1 <= n <= nmax.
inline std::vector<std::int64_t> eta_product_11(std::size_t nmax) {
    std::vector<std::int64_t> c(nmax, 0);  // c[k] = coefficient of q^k in the product
    c[0] = 1;
    auto mul_one_minus = [&](std::size_t step) {
        for (std::size_t k = nmax - 1; k >= step; --k) c[k] -= c[k - step];
    };
    for (std::size_t n = 1; n < nmax; ++n) {
        mul_one_minus(n);
        mul_one_minus(n);
        if (11 * n < nmax) {
            mul_one_minus(11 * n);
            mul_one_minus(11 * n);
        }
    }
    std::vector<std::int64_t> a(nmax + 1, 0);
    for (std::size_t n = 1; n <= nmax; ++n) a[n] = c[n - 1];
    return a;
}

}  // namespace qtwist::testing
