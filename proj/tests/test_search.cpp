#include <doctest.h>

#include <cmath>
#include <random>

#include "common.hpp"
#include "qtwist/error.hpp"
#include "qtwist/lvalue.hpp"
#include "qtwist/search.hpp"

using namespace qtwist;
using qtwist::testing::curve_11a1;
using qtwist::testing::table_11a1;

TEST_SUITE("search") {
TEST_CASE("comparison bound") {
    CHECK(std::fabs(theorem_bound_coefficient(20) - 2.0 * std::sqrt(0.27 / 452.0)) < 1e-15);
    CHECK(theorem_bound_coefficient(20) == doctest::Approx(0.04888).epsilon(1e-4));
    double prev = 0.0;
    for (int W = 20; W <= 2000; ++W) {
        const double c = theorem_bound_coefficient(W);
        CHECK(c > prev);
        CHECK(c < 2.0 / std::sqrt(22.0));
        prev = c;
    }
    CHECK(theorem_bound_coefficient(100000000) == doctest::Approx(0.42640).epsilon(1e-4));
    for (double X : {16.0, 1e4, 1e8, 1e20})
        for (int W : {20, 25, 100}) CHECK(theorem_bound(X, W) > 1.0);
    CHECK_THROWS_AS(theorem_bound_coefficient(19), DomainError);
    CHECK_THROWS_AS(theorem_bound(10.0, 20), DomainError);
}

TEST_CASE("Tamagawa numbers at p | d") {
    const auto& cfg = curve_11a1();
    const auto primes = sieve_primes(5000);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        u64 p;
        do p = primes[1 + rng() % (primes.size() - 1)];
        while (p == 11);
        const i64 d = static_cast<i64>(p) * static_cast<i64>(1 + 2 * (rng() % 50)) * (rng() % 2 ? 1 : -1);
        const int T = tamagawa_twist(cfg, p, d);
        CHECK((T == 1 || T == 2 || T == 4));
        // root count by brute force on the cubic
        int roots = 0;
        for (u64 x = 0; x < p; ++x) {
            const __int128 X = x;
            const __int128 v = 4 * X * X * X - 4 * X * X - 40 * X - 79;
            if (((v % static_cast<__int128>(p)) + p) % p == 0) ++roots;
        }
        CHECK(T == 1 + roots);
    }
    CHECK_THROWS_AS(tamagawa_twist(cfg, 11, 11), DomainError);
    CHECK_THROWS_AS(tamagawa_twist(cfg, 3, 5), DomainError);
    CHECK_THROWS_AS(tamagawa_twist(cfg, 2, 8), DomainError);
}

TEST_CASE("sha rows") {
    const auto& cfg = curve_11a1();
    const LValueEngine eng(cfg, table_11a1(200000));
    TwistDiscriminant one;
    one.d = 1;
    const auto r1 = sha_row(cfg, one, eng.central_value(1, 1e-12).value);
    CHECK(r1.torsion_sq == 25);
    CHECK(r1.tamagawa == 5);
    CHECK(r1.S_value == doctest::Approx(1.0).epsilon(1e-10));

    const auto fam = enum_family_serial(cfg, 1, 1, 100, 5000);
    for (const auto& t : fam) {
        const auto r = sha_row(cfg, t, eng.central_value(t.d, 1e-10).value);
        CHECK(r.period_twist * std::sqrt(static_cast<double>(t.d)) == doctest::Approx(cfg.real_period).epsilon(1e-15));
        CHECK(r.tamagawa <= static_cast<u64>(std::pow(4.0, t.omega)) * 5);
        CHECK(r.S_value >= 0.0);
        // BSD: S is a perfect square for these rank-zero or rank-two twists
        const double root = std::sqrt(r.S_value);
        CHECK(std::fabs(root - std::round(root)) < 1e-6);
    }
    // S / L scales as sqrt|d|
    TwistDiscriminant a = fam.front(), b = fam.front();
    b.d = 4 * a.d;
    CHECK(sha_row(cfg, b, 1.0).period_twist == doctest::Approx(sha_row(cfg, a, 1.0).period_twist / 2.0));
    TwistDiscriminant minus = fam.front();
    minus.root_number = -1;
    CHECK(sha_row(cfg, minus, 3.0).S_value == 0.0);
    CHECK(sha_row(cfg, minus, 3.0).root_number_minus);
    auto bad = cfg;
    bad.real_period = 0.0;
    CHECK_THROWS_AS(sha_row(bad, one, 1.0), ConfigError);
}

TEST_CASE("extreme search sandwich and superset") {
    const auto& cfg = curve_11a1();
    const auto& table = table_11a1(2000000);
    const LValueEngine eng(cfg, table);
    const BumpFunction bump;
    const auto primes = sieve_primes(1000);
    const auto fam = weighted_family(cfg, 1, 1, 20000, bump, primes);
    std::vector<double> L;
    for (const auto& v : eng.central_values(fam.discriminants(), 1e-8)) L.push_back(v.value);
    FamilyParams p;
    p.a = 1;
    p.X = 20000;
    p.W = 2;
    p.z = 20.0;
    p.D = 400.0;
    p.M = 200;
    const Resonator rp({200, 1, std::make_pair(u64{3}, u64{60})}, cfg, table);
    const Resonator rm({200, -1, std::make_pair(u64{3}, u64{60})}, cfg, table);
    std::vector<double> Rp, Rm;
    for (const auto& v : rp.resonate_all(fam.discriminants())) Rp.push_back(v.value);
    for (const auto& v : rm.resonate_all(fam.discriminants())) Rm.push_back(v.value);
    const auto rep = extreme_search(cfg, p, fam, L, Rp, Rm);
    CHECK(rep.sandwich_ok);
    CHECK(rep.superset_ok);
    CHECK(rep.max_value >= *rep.ratio_plus);
    CHECK(rep.min_value <= *rep.ratio_minus);
    // the + resonator should favor large values relative to the - one
    CHECK(*rep.ratio_plus >= *rep.ratio_minus);
    std::size_t rough = 0;
    double mx = 0.0;
    for (std::size_t i = 0; i < fam.size(); ++i)
        if (is_rough(fam.members[i], cfg, 20.0)) {
            ++rough;
            mx = std::max(mx, L[i]);
        }
    CHECK(rep.family_size == rough);
    CHECK(rep.max_value == mx);
    CHECK(rep.theorem_bound == 0.0);  // W < 20: not reported

    // single-element family
    WeightedFamily one;
    one.X = fam.X;
    one.members = {fam.members[fam.size() / 2]};
    one.phi = {1.0};
    const double v = L[fam.size() / 2];
    p.z = 2.0;
    const auto r1 = extreme_search(cfg, p, one, std::vector<double>{v}, std::vector<double>{1.3},
                                   std::vector<double>{0.7});
    CHECK(r1.max_value == v);
    CHECK(r1.min_value == v);
    CHECK(*r1.ratio_plus == doctest::Approx(v));
    CHECK(*r1.ratio_minus == doctest::Approx(v));
    // orthogonal resonator: ratio undefined
    const auto r0 = extreme_search(cfg, p, one, std::vector<double>{v}, std::vector<double>{0.0},
                                   std::vector<double>{0.0});
    CHECK(!r0.ratio_plus.has_value());
    CHECK(r0.to_json()["ratio_plus"].is_null());
}
}
