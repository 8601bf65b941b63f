#pragma once

// On-disk caches: point-count traces A_p per curve, and central values per
// (curve, tol). The cache directory comes from QTWIST_CACHE_DIR, falling back
// to ".qtwist-cache" in the working directory.
//
// Coefficient file coeffs-<label>.bin, little-endian:
//   "QTCF0001" | u32 label length | label | u64 nmax | u64 count |
//   i32 A_p[count] for the primes p <= nmax in order | u64 FNV-1a of all
//   preceding bytes
// Written to a temporary file and renamed into place.
//
// L-value file lvalues-<label>-<tol>.bin, little-endian:
//   "QTLV0001" | u32 label length | label | f64 tol | records
//   record (28 bytes) = i64 d | f64 value | f64 tail | u32 T
// Append-only with a single writer. The index is rebuilt by scanning on open;
// a trailing partial record is ignored and later records for the same d win.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qtwist/arith.hpp"
#include "qtwist/curve.hpp"
#include "qtwist/lvalue.hpp"

namespace qtwist {

inline constexpr const char* kCacheDirEnv = "QTWIST_CACHE_DIR";

// The override if nonempty, else $QTWIST_CACHE_DIR, else ".qtwist-cache".
std::filesystem::path cache_dir(const std::string& override_dir = "");

std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept;

struct CoefficientCache {
    std::string label;
    u64 nmax = 0;
    std::vector<std::int32_t> ap;  // A_p for primes p <= nmax
};

std::filesystem::path coefficient_cache_path(const std::filesystem::path& dir, const std::string& label);
void save_coefficient_cache(const std::filesystem::path& path, const CoefficientCache& cache);
// nullopt if the file is missing, truncated, or fails the checksum.
std::optional<CoefficientCache> load_coefficient_cache(const std::filesystem::path& path);

enum class CacheStatus { hit, extended, built, rebuilt };
std::string to_string(CacheStatus s);

// Reuses the cached traces, computing and saving only what is missing.
// A file that fails its checksum is rebuilt from scratch.
CoefficientTable load_or_build_coefficients(const CurveConfig& cfg, u64 nmax, const std::filesystem::path& dir,
                                            CacheStatus* status = nullptr);
// Cache-only variant for consumers: throws MissingPrerequisite when the
// cache is absent, corrupt, or shorter than nmax.
CoefficientTable require_coefficients(const CurveConfig& cfg, u64 nmax, const std::filesystem::path& dir);
// Largest nmax available in the cache, 0 if none.
u64 cached_nmax(const CurveConfig& cfg, const std::filesystem::path& dir);

struct CachedValue {
    double value = 0.0;
    double tail = 0.0;
    std::uint32_t T = 0;
};

class LValueCache {
public:
    LValueCache(std::filesystem::path path, std::string label, double tol);

    static std::filesystem::path default_path(const std::filesystem::path& dir, const std::string& label, double tol);

    const std::filesystem::path& path() const noexcept { return path_; }
    std::size_t size() const noexcept { return index_.size(); }

    std::optional<CachedValue> get(i64 d) const;
    void put(const CentralValue& v);
    void put_all(std::span<const CentralValue> vs);

private:
    void scan();

    std::filesystem::path path_;
    std::string label_;
    double tol_;
    std::unordered_map<i64, CachedValue> index_;
};

// Clamped central values for ds, computing only those missing from the cache
// (OpenMP) and appending them in input order.
std::vector<double> cached_central_values(const LValueEngine& engine, LValueCache& cache, std::span<const i64> ds,
                                          double tol);

}  // namespace qtwist
