#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "qtwist/error.hpp"
#include "qtwist/twists.hpp"

using namespace qtwist;
using qtwist::testing::curve_11a1;

TEST_SUITE("twists") {
TEST_CASE("root number is eps_E times kronecker(d, -N)") {
    const auto& cfg = curve_11a1();
    CHECK(root_number(cfg, 1) == 1);
    CHECK(root_number(cfg, 5) == kronecker(5, -11));
    CHECK(root_number(cfg, -3) == kronecker(-3, -11));
    CHECK_THROWS_AS(root_number(cfg, 33), DomainError);
    CHECK_THROWS_AS(root_number(cfg, 0), DomainError);
}

TEST_CASE("admissible classes have constant root number +1") {
    const auto& cfg = curve_11a1();
    for (int sign : {1, -1}) {
        std::vector<ClassReport> rep;
        const auto classes = discover_classes(cfg, sign, 100, &rep);
        CHECK(!classes.empty());
        for (const auto& r : rep) {
            CHECK(r.admitted == (r.positive == r.sampled));
            if (r.admitted) CHECK(!r.mixed);
        }
        for (i64 a : classes) {
            CHECK((a % 8 == 1 || a % 8 == 5));
            // all members in a window, by definition
            for (const auto& t : enum_family_serial(cfg, a, sign, 1, 20000)) CHECK(t.root_number == 1);
        }
    }
}

TEST_CASE("segmented enumeration matches the one-at-a-time reference") {
    const auto& cfg = curve_11a1();
    const auto primes = sieve_primes(1000);
    for (int sign : {1, -1}) {
        for (i64 a : discover_classes(cfg, sign)) {
            const auto fast = enum_family(cfg, a, sign, 1, 300000, primes);
            const auto slow = enum_family_serial(cfg, a, sign, 1, 300000);
            REQUIRE(fast.size() == slow.size());
            for (std::size_t i = 0; i < fast.size(); ++i) {
                CHECK(fast[i].d == slow[i].d);
                CHECK(fast[i].omega == slow[i].omega);
                CHECK(fast[i].factorization.factors == slow[i].factorization.factors);
            }
            if (!fast.empty() && fast.front().d == 1) CHECK(fast.front().trivial);
        }
    }
}

TEST_CASE("members are fundamental, coprime to 2N, in class and window") {
    const auto& cfg = curve_11a1();
    const auto primes = sieve_primes(2000);
    const auto fam = enum_family(cfg, 1, 1, 5000, 2500000, primes);
    for (std::size_t i = 0; i < fam.size(); ++i) {
        const auto& t = fam[i];
        CHECK(is_fundamental_discriminant(t.d));
        CHECK(gcd(static_cast<u64>(t.d), 22) == 1);
        CHECK(mod_floor(t.d, 88) == 1);
        CHECK(t.d >= 5000);
        CHECK(t.d <= 2500000);
        if (i) CHECK(fam[i - 1].d < t.d);
    }
}

TEST_CASE("almost-prime and rough filters") {
    const auto& cfg = curve_11a1();
    const auto fam = enum_family_serial(cfg, 1, 1, 1, 100000);
    const auto ap = filter_almost_prime(fam, 2);
    for (const auto& t : ap) CHECK(t.omega <= 2);
    const auto rough = filter_rough(fam, cfg, 30.0);
    for (const auto& t : rough)
        for (const auto& [p, e] : t.factorization.factors) CHECK(p >= 30);
    std::size_t count = 0;
    for (const auto& t : fam)
        if (std::all_of(t.factorization.factors.begin(), t.factorization.factors.end(),
                        [](const auto& f) { return f.first >= 30; }))
            ++count;
    CHECK(count == rough.size());
}

TEST_CASE("parameter relations of the headline regime") {
    const auto& cfg = curve_11a1();
    const auto p = FamilyParams::paper(cfg, 1, 1, 1e8, 20);
    CHECK(p.s == 2.023);
    CHECK(p.z == doctest::Approx(std::pow(1e8, 1.0 / 20.5)));
    CHECK(p.D == doctest::Approx(std::pow(p.z, 2.023)));
    CHECK(p.M == static_cast<u64>(std::floor(std::pow(1e8, 0.27 / 452.0))));
    CHECK(p.lo() == 50000000);
    CHECK(p.hi() == 250000000);
    CHECK_THROWS_AS(FamilyParams::paper(cfg, 1, 1, 1e8, 19), DomainError);
    CHECK_THROWS_AS(FamilyParams::paper(cfg, 3, 1, 1e8, 20), DomainError);  // 3 mod 8
    CHECK_THROWS_AS(FamilyParams::paper(cfg, 1, 1, 10, 20), DomainError);
}
}
