#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "common.hpp"
#include "qtwist/cache.hpp"
#include "qtwist/error.hpp"

using namespace qtwist;
using qtwist::testing::curve_11a1;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("qtwist-test-" + name + "-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::uint64_t file_hash(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), {});
    return fnv1a(buf);
}

}  // namespace

TEST_SUITE("cache") {
TEST_CASE("cache directory resolution") {
    CHECK(cache_dir("/x/y") == fs::path("/x/y"));
    ::setenv(kCacheDirEnv, "/tmp/from-env", 1);
    CHECK(cache_dir() == fs::path("/tmp/from-env"));
    ::unsetenv(kCacheDirEnv);
    CHECK(cache_dir() == fs::path(".qtwist-cache"));
}

TEST_CASE("FNV-1a reference values") {
    const std::string a = "a", foobar = "foobar";
    CHECK(fnv1a({}) == 0xcbf29ce484222325ULL);
    CHECK(fnv1a(std::span(reinterpret_cast<const unsigned char*>(a.data()), a.size())) == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a(std::span(reinterpret_cast<const unsigned char*>(foobar.data()), foobar.size())) ==
          0x85944171f73967e8ULL);
}

TEST_CASE("coefficient cache: build, hit, extend, detect corruption") {
    const auto& cfg = curve_11a1();
    const auto dir = fresh_dir("coeffs");
    const auto path = coefficient_cache_path(dir, cfg.label);
    CHECK_THROWS_AS(require_coefficients(cfg, 1000, dir), MissingPrerequisite);

    CacheStatus st;
    const auto t1 = load_or_build_coefficients(cfg, 1000, dir, &st);
    CHECK(st == CacheStatus::built);
    const auto h1 = file_hash(path);
    const auto t2 = load_or_build_coefficients(cfg, 1000, dir, &st);
    CHECK(st == CacheStatus::hit);
    CHECK(file_hash(path) == h1);
    for (u64 n = 1; n <= 1000; ++n) CHECK(t1.A(n) == t2.A(n));

    const auto t3 = load_or_build_coefficients(cfg, 10000, dir, &st);
    CHECK(st == CacheStatus::extended);
    CHECK(cached_nmax(cfg, dir) == 10000);
    const auto ref = build_coefficients(cfg, 10000);
    for (u64 n = 1; n <= 10000; ++n) CHECK(t3.A(n) == ref.A(n));
    CHECK(require_coefficients(cfg, 5000, dir).A(4999) == ref.A(4999));
    CHECK_THROWS_AS(require_coefficients(cfg, 20000, dir), MissingPrerequisite);

    {
        std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
        f.seekp(100);
        char c;
        f.seekg(100);
        f.read(&c, 1);
        c = static_cast<char>(c ^ 0x5a);
        f.seekp(100);
        f.write(&c, 1);
    }
    CHECK(!load_coefficient_cache(path).has_value());
    CHECK_THROWS_AS(require_coefficients(cfg, 1000, dir), MissingPrerequisite);
    const auto t4 = load_or_build_coefficients(cfg, 10000, dir, &st);
    CHECK(st == CacheStatus::rebuilt);
    CHECK(load_coefficient_cache(path).has_value());
    for (u64 n = 1; n <= 10000; ++n) CHECK(t4.A(n) == ref.A(n));
    fs::remove_all(dir);
}

TEST_CASE("L-value cache: append, reopen, ignore a torn record") {
    const auto dir = fresh_dir("lvalues");
    const auto path = LValueCache::default_path(dir, "11a1", 1e-8);
    {
        LValueCache c(path, "11a1", 1e-8);
        CHECK(c.size() == 0);
        c.put({89, 1.5, 1.5, 1234, 1e-9, 1});
        c.put_all(std::vector<CentralValue>{{-3, 0.25, 0.25, 10, 1e-10, 1}, {89, 1.75, 1.75, 99, 0.0, 1}});
        CHECK(c.size() == 2);
    }
    CHECK(fs::file_size(path) == 8 + 4 + 4 + 8 + 3 * 28);
    {
        std::ofstream f(path, std::ios::binary | std::ios::app);
        f.write("torn", 4);
    }
    LValueCache c(path, "11a1", 1e-8);
    CHECK(c.size() == 2);
    CHECK(c.get(89)->value == 1.75);  // later record wins
    CHECK(c.get(89)->T == 99);
    CHECK(c.get(-3)->tail == 1e-10);
    CHECK(!c.get(5).has_value());
    c.put({5, 2.0, 2.0, 7, 0.0, 1});
    LValueCache again(path, "11a1", 1e-8);
    CHECK(again.size() == 3);
    CHECK(again.get(5)->value == 2.0);
    CHECK_THROWS_AS(LValueCache(path, "37a1", 1e-8), ConfigError);
    CHECK_THROWS_AS(LValueCache(path, "11a1", 1e-9), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("cached central values equal fresh ones") {
    const auto& cfg = curve_11a1();
    const auto dir = fresh_dir("cv");
    const auto& table = qtwist::testing::table_11a1(200000);
    const LValueEngine eng(cfg, table);
    std::vector<i64> ds;
    for (i64 d = 5; d < 2000; d += 4)
        if (is_fundamental_discriminant(d) && gcd(static_cast<u64>(d), 22) == 1) ds.push_back(d);
    LValueCache c(LValueCache::default_path(dir, cfg.label, 1e-8), cfg.label, 1e-8);
    const auto first = cached_central_values(eng, c, ds, 1e-8);
    const auto second = cached_central_values(eng, c, ds, 1e-8);
    CHECK(first == second);
    for (std::size_t i = 0; i < ds.size(); ++i) CHECK(first[i] == eng.central_value(ds[i], 1e-8).value);
    fs::remove_all(dir);
}
}
