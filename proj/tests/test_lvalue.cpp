#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "common.hpp"
#include "qtwist/error.hpp"
#include "qtwist/lvalue.hpp"
#include "qtwist/twists.hpp"

using namespace qtwist;
using qtwist::testing::curve_11a1;
using qtwist::testing::table_11a1;

namespace {

std::vector<i64> sample_twists(std::size_t count, u64 hi) {
    const auto& cfg = curve_11a1();
    std::vector<i64> out;
    for (int sign : {1, -1})
        for (i64 a : discover_classes(cfg, sign))
            for (const auto& t : enum_family_serial(cfg, a, sign, 2, hi)) out.push_back(t.d);
    std::sort(out.begin(), out.end(), [](i64 x, i64 y) { return std::llabs(x) < std::llabs(y); });
    if (out.size() > count) out.resize(count);
    return out;
}

}  // namespace

TEST_SUITE("lvalue") {
TEST_CASE("untwisted value matches the BSD prediction for 11a1") {
    const auto& cfg = curve_11a1();
    const LValueEngine eng(cfg, table_11a1(1000));
    // Omega c_11 |Sha| / |tors|^2 = Omega * 5 / 25
    const double expect = cfg.real_period / 5.0;
    CHECK(eng.central_value(1, 1e-12).value == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("blocked kernel agrees with the direct loop") {
    const auto& cfg = curve_11a1();
    const auto& t = table_11a1(2000000);
    const LValueEngine eng(cfg, t);
    for (i64 d : sample_twists(60, 20000)) {
        const auto a = eng.central_value(d, 1e-10);
        const auto b = eng.central_value_serial(d, 1e-10);
        CHECK(a.truncation == b.truncation);
        CHECK(a.raw == doctest::Approx(b.raw).epsilon(1e-11).scale(1.0));
    }
    std::vector<i64> ds = sample_twists(40, 20000);
    const auto all = eng.central_values(ds, 1e-8);
    for (std::size_t i = 0; i < ds.size(); ++i) CHECK(all[i].raw == eng.central_value(ds[i], 1e-8).raw);
}

TEST_CASE("value does not depend on the smoothing split") {
    const auto& cfg = curve_11a1();
    const LValueEngine eng(cfg, table_11a1(2000000));
    for (i64 d : sample_twists(30, 5000)) {
        const double v = eng.central_value(d, 1e-12).raw;
        for (double X0 : {0.5, 1.0, 2.0, 3.0}) CHECK(eng.central_value_balanced(d, X0, 1e-12) == doctest::Approx(v).scale(1.0).epsilon(1e-9));
    }
}

TEST_CASE("completed L-function satisfies the functional equation") {
    const auto& cfg = curve_11a1();
    const LValueEngine eng(cfg, table_11a1(2000000));
    for (i64 d : sample_twists(20, 3000)) {
        const double l6 = eng.completed(d, 0.6, 1.0, 1e-12);
        const double l4 = eng.completed(d, 0.4, 2.0, 1e-12);
        CHECK(std::fabs(l6 - l4) <= 1e-8 * std::max(1.0, std::fabs(l4)));
        // at s = 1/2, Lambda = Gamma(1) Q^{1/2} L(1/2)
        const double c = eng.completed(d, 0.5, 1.5, 1e-12);
        const double Q = eng.conductor_scale(d);
        const double ref = std::sqrt(Q) * eng.central_value(d, 1e-12).raw;
        CHECK(std::fabs(c - ref) <= 1e-8 * std::max(1.0, std::fabs(ref)));
    }
}

TEST_CASE("truncation, tail bound and table coverage") {
    const auto& cfg = curve_11a1();
    const auto& t = table_11a1(1000);
    const LValueEngine eng(cfg, t);
    const double Q = eng.conductor_scale(5);
    CHECK(Q == doctest::Approx(std::sqrt(11.0) * 5.0 / (2.0 * std::numbers::pi)));
    const u64 T = LValueEngine::truncation(Q, 1e-8);
    CHECK(LValueEngine::tail_bound(Q, T) < 1e-8);
    // direct sum of the bound terms
    double direct = 0.0;
    for (u64 n = T + 1; n < T + 100000; ++n) direct += 4.0 * std::exp(-static_cast<double>(n) / Q);
    CHECK(LValueEngine::tail_bound(Q, T) == doctest::Approx(direct).epsilon(1e-9));
    // a large twist with root number +1 needs more of the table than is built
    i64 dbig = 100001;
    while (!(is_fundamental_discriminant(dbig) && gcd(static_cast<u64>(dbig), 88) == 1 && root_number(cfg, dbig) == 1))
        dbig += 4;
    CHECK_THROWS_AS(eng.central_value(dbig, 1e-8), ResourceError);
    CHECK_THROWS_AS(LValueEngine::truncation(Q, 0.0), DomainError);
    // root number -1 twists vanish identically
    i64 dminus = 0;
    for (i64 d = 5; d < 1000; d += 4)
        if (is_fundamental_discriminant(d) && gcd(static_cast<u64>(d), 22) == 1 && root_number(cfg, d) == -1) {
            dminus = d;
            break;
        }
    REQUIRE(dminus != 0);
    CHECK(eng.central_value(dminus, 1e-8).value == 0.0);
}

TEST_CASE("L_a from the Euler product matches the Dirichlet series") {
    const auto& cfg = curve_11a1();
    const auto& t = table_11a1(100000);
    for (i64 a : {1, 5, 89 % 88, 37}) {
        const double prod = local_factor_La(cfg, t, a, 0.5);
        const double series = local_factor_La_series(cfg, t, a, 0.5, 1000000000000000ULL);
        CHECK(prod == doctest::Approx(series).epsilon(1e-6));
        const double prod2 = local_factor_La(cfg, t, a, 2.0);
        const double series2 = local_factor_La_series(cfg, t, a, 2.0, 100000);
        CHECK(prod2 == doctest::Approx(series2).epsilon(1e-9));
    }
    // a(2) = -2/sqrt 2, a(11) = 1/sqrt 11; chi(2) = 1 for a = 1 mod 8, chi(11) = kronecker(1, 11) = 1
    const double p2 = 1.0 / (1.0 + 1.0 + 0.5);
    const double p11 = 1.0 / (1.0 - 1.0 / 11.0);
    CHECK(local_factor_La(cfg, t, 1, 0.5) == doctest::Approx(p2 * p11).epsilon(1e-12));
}
}
