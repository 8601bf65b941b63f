#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "qtwist/error.hpp"
#include "qtwist/resonator.hpp"

using namespace qtwist;
using qtwist::testing::curve_11a1;
using qtwist::testing::table_11a1;

TEST_SUITE("resonator") {
TEST_CASE("length scale and window") {
    ResonatorParams p{1000, 1, std::nullopt};
    const double lm = std::log(1000.0);
    CHECK(p.L() == doctest::Approx(std::sqrt(lm * std::log(lm))));
    CHECK(ResonatorParams{2, 1, std::nullopt}.L() == 0.0);
    const auto [lo, hi] = p.paper_window();
    CHECK(lo == doctest::Approx(p.L() * p.L()));
    CHECK(hi == doctest::Approx(std::exp(std::log(p.L()) * std::log(p.L()))));
    CHECK(p.regime() == "paper");
    // log L < 2 at M = 1000: empty default window
    CHECK_THROWS_AS(p.validate(), DomainError);
    ResonatorParams q{1000, 1, std::make_pair(u64{3}, u64{50})};
    CHECK_NOTHROW(q.validate());
    CHECK(q.regime() == "override");
    CHECK_THROWS_AS((ResonatorParams{1000, 0, q.window_override}.validate()), DomainError);
}

TEST_CASE("window primes and b(p)") {
    const auto& cfg = curve_11a1();
    const auto& t = table_11a1(10000);
    const Resonator r({2000, -1, std::make_pair(u64{2}, u64{60})}, cfg, t);
    std::vector<u64> expect;
    for (u64 p : {3, 5, 7, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59}) expect.push_back(p);
    std::vector<u64> got;
    for (const auto& w : r.primes()) got.push_back(w.p);
    CHECK(got == expect);  // 2 and 11 divide N0
    for (const auto& w : r.primes()) {
        const double pd = static_cast<double>(w.p);
        CHECK(w.b == doctest::Approx(-t.a(w.p) * r.L() / (std::sqrt(pd) * std::log(pd))));
    }
    CHECK(r.b_prime(19) == 0.0);  // a(19) = 0
    CHECK(r.b_prime(61) == 0.0);
    CHECK(r.b(3 * 5 * 7) == doctest::Approx(r.b_prime(3) * r.b_prime(5) * r.b_prime(7)));
    CHECK(r.b(9) == 0.0);
    CHECK(r.b(1) == 1.0);
}

TEST_CASE("depth-first resonator equals the loop over m") {
    const auto& cfg = curve_11a1();
    const auto& t = table_11a1(10000);
    for (u64 M : {1ULL, 3ULL, 100ULL, 3000ULL}) {
        for (int sign : {1, -1}) {
            const Resonator r({M, sign, std::make_pair(u64{3}, u64{200})}, cfg, t);
            std::vector<i64> ds;
            for (i64 d = 5; d < 3000; d += 8)
                if (is_fundamental_discriminant(d)) ds.push_back(d);
            const auto all = r.resonate_all(ds);
            for (std::size_t i = 0; i < ds.size(); ++i) {
                const auto s = r.resonate_serial(ds[i]);
                CHECK(all[i].value == doctest::Approx(s.value).epsilon(1e-12));
                CHECK(all[i].support_count == s.support_count);
            }
        }
    }
}

TEST_CASE("empty window gives R = 1") {
    const auto& cfg = curve_11a1();
    const auto& t = table_11a1(1000);
    const Resonator r({500, 1, std::make_pair(u64{1}, u64{0})}, cfg, t);
    CHECK(r.primes().empty());
    CHECK(r.resonate(89).value == 1.0);
    CHECK(r.resonate(89).support_count == 1);
}
}
