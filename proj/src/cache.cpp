#include "qtwist/cache.hpp"

#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "qtwist/error.hpp"

namespace qtwist {

static_assert(std::endian::native == std::endian::little, "cache files assume a little-endian host");

namespace {

constexpr char kCoeffMagic[8] = {'Q', 'T', 'C', 'F', '0', '0', '0', '1'};
constexpr char kLValueMagic[8] = {'Q', 'T', 'L', 'V', '0', '0', '0', '1'};
constexpr std::size_t kRecordSize = 28;

template <class T>
void put_raw(std::vector<unsigned char>& buf, const T& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    buf.insert(buf.end(), p, p + sizeof(T));
}

template <class T>
bool get_raw(const std::vector<unsigned char>& buf, std::size_t& pos, T& v) {
    if (pos + sizeof(T) > buf.size()) return false;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return true;
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ResourceError("cannot create cache directory " + dir.string() + ": " + ec.message());
}

std::vector<unsigned char> header(const char (&magic)[8], const std::string& label) {
    std::vector<unsigned char> buf(magic, magic + 8);
    put_raw(buf, static_cast<std::uint32_t>(label.size()));
    buf.insert(buf.end(), label.begin(), label.end());
    return buf;
}

std::string safe_label(const std::string& label) {
    std::string out = label;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
    return out.empty() ? "curve" : out;
}

}  // namespace

std::filesystem::path cache_dir(const std::string& override_dir) {
    if (!override_dir.empty()) return override_dir;
    if (const char* env = std::getenv(kCacheDirEnv); env && *env) return env;
    return ".qtwist-cache";
}

std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t h) noexcept {
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::filesystem::path coefficient_cache_path(const std::filesystem::path& dir, const std::string& label) {
    return dir / ("coeffs-" + safe_label(label) + ".bin");
}

void save_coefficient_cache(const std::filesystem::path& path, const CoefficientCache& cache) {
    if (path.has_parent_path()) ensure_dir(path.parent_path());
    std::vector<unsigned char> buf = header(kCoeffMagic, cache.label);
    put_raw(buf, static_cast<std::uint64_t>(cache.nmax));
    put_raw(buf, static_cast<std::uint64_t>(cache.ap.size()));
    const auto* p = reinterpret_cast<const unsigned char*>(cache.ap.data());
    buf.insert(buf.end(), p, p + cache.ap.size() * sizeof(std::int32_t));
    put_raw(buf, fnv1a(buf));

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ResourceError("cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!out) throw ResourceError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw ResourceError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::optional<CoefficientCache> load_coefficient_cache(const std::filesystem::path& path) {
    const auto buf = read_file(path);
    if (buf.size() < 8 + 4 + 16 + 8 || std::memcmp(buf.data(), kCoeffMagic, 8) != 0) return std::nullopt;
    std::uint64_t stored = 0;
    std::memcpy(&stored, buf.data() + buf.size() - 8, 8);
    if (fnv1a(std::span(buf.data(), buf.size() - 8)) != stored) return std::nullopt;

    std::size_t pos = 8;
    std::uint32_t len = 0;
    if (!get_raw(buf, pos, len) || pos + len > buf.size()) return std::nullopt;
    CoefficientCache c;
    c.label.assign(reinterpret_cast<const char*>(buf.data() + pos), len);
    pos += len;
    std::uint64_t nmax = 0, count = 0;
    if (!get_raw(buf, pos, nmax) || !get_raw(buf, pos, count)) return std::nullopt;
    if (pos + count * sizeof(std::int32_t) + 8 != buf.size()) return std::nullopt;
    c.nmax = nmax;
    c.ap.resize(count);
    std::memcpy(c.ap.data(), buf.data() + pos, count * sizeof(std::int32_t));
    return c;
}

std::string to_string(CacheStatus s) {
    switch (s) {
        case CacheStatus::hit: return "hit";
        case CacheStatus::extended: return "extended";
        case CacheStatus::built: return "built";
        case CacheStatus::rebuilt: return "rebuilt";
    }
    return "unknown";
}

CoefficientTable load_or_build_coefficients(const CurveConfig& cfg, u64 nmax, const std::filesystem::path& dir,
                                            CacheStatus* status) {
    const auto path = coefficient_cache_path(dir, cfg.label);
    const bool exists = std::filesystem::exists(path);
    auto cached = load_coefficient_cache(path);
    if (cached && cached->label != cfg.label) cached.reset();

    if (cached && cached->nmax >= nmax) {
        if (status) *status = CacheStatus::hit;
        const PrimeTable primes = sieve_primes(std::max<u64>(nmax, 2));
        return build_coefficients_from_primes(cfg, nmax, primes, cached->ap);
    }
    const std::vector<std::int32_t> known = cached ? cached->ap : std::vector<std::int32_t>{};
    CoefficientTable table = build_coefficients(cfg, nmax, known);
    save_coefficient_cache(path, {cfg.label, nmax, table.prime_coefficients()});
    if (status) *status = cached ? CacheStatus::extended : exists ? CacheStatus::rebuilt : CacheStatus::built;
    return table;
}

CoefficientTable require_coefficients(const CurveConfig& cfg, u64 nmax, const std::filesystem::path& dir) {
    const auto path = coefficient_cache_path(dir, cfg.label);
    const auto cached = load_coefficient_cache(path);
    if (!cached || cached->label != cfg.label)
        throw MissingPrerequisite("no valid coefficient cache at " + path.string() + "; run coeffs first");
    if (cached->nmax < nmax)
        throw MissingPrerequisite("coefficient cache covers nmax = " + std::to_string(cached->nmax) +
                                  ", need " + std::to_string(nmax) + "; run coeffs first with --nmax " +
                                  std::to_string(nmax));
    const PrimeTable primes = sieve_primes(std::max<u64>(nmax, 2));
    return build_coefficients_from_primes(cfg, nmax, primes, cached->ap);
}

u64 cached_nmax(const CurveConfig& cfg, const std::filesystem::path& dir) {
    const auto cached = load_coefficient_cache(coefficient_cache_path(dir, cfg.label));
    return cached && cached->label == cfg.label ? cached->nmax : 0;
}

LValueCache::LValueCache(std::filesystem::path path, std::string label, double tol)
    : path_(std::move(path)), label_(std::move(label)), tol_(tol) {
    if (path_.has_parent_path()) ensure_dir(path_.parent_path());
    scan();
}

std::filesystem::path LValueCache::default_path(const std::filesystem::path& dir, const std::string& label,
                                                double tol) {
    std::ostringstream name;
    name << "lvalues-" << safe_label(label) << "-" << tol << ".bin";
    return dir / name.str();
}

void LValueCache::scan() {
    index_.clear();
    std::vector<unsigned char> expect = header(kLValueMagic, label_);
    put_raw(expect, tol_);
    const auto buf = read_file(path_);
    if (buf.empty()) {
        std::ofstream out(path_, std::ios::binary | std::ios::trunc);
        if (!out) throw ResourceError("cannot create " + path_.string());
        out.write(reinterpret_cast<const char*>(expect.data()), static_cast<std::streamsize>(expect.size()));
        return;
    }
    if (buf.size() < expect.size() || std::memcmp(buf.data(), expect.data(), expect.size()) != 0)
        throw ConfigError("L-value cache " + path_.string() + " belongs to a different curve or tolerance");
    std::size_t pos = expect.size();
    while (pos + kRecordSize <= buf.size()) {
        i64 d = 0;
        CachedValue v;
        get_raw(buf, pos, d);
        get_raw(buf, pos, v.value);
        get_raw(buf, pos, v.tail);
        get_raw(buf, pos, v.T);
        index_[d] = v;
    }
    if (pos != buf.size()) std::filesystem::resize_file(path_, pos);
}

std::optional<CachedValue> LValueCache::get(i64 d) const {
    const auto it = index_.find(d);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void LValueCache::put(const CentralValue& v) { put_all(std::span(&v, 1)); }

void LValueCache::put_all(std::span<const CentralValue> vs) {
    if (vs.empty()) return;
    std::vector<unsigned char> buf;
    buf.reserve(vs.size() * kRecordSize);
    for (const auto& v : vs) {
        put_raw(buf, v.d);
        put_raw(buf, v.value);
        put_raw(buf, v.tail_bound);
        put_raw(buf, static_cast<std::uint32_t>(v.truncation));
    }
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw ResourceError("cannot append to " + path_.string());
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    out.flush();
    if (!out) throw ResourceError("append failed: " + path_.string());
    for (const auto& v : vs) index_[v.d] = {v.value, v.tail_bound, static_cast<std::uint32_t>(v.truncation)};
}

std::vector<double> cached_central_values(const LValueEngine& engine, LValueCache& cache, std::span<const i64> ds,
                                          double tol) {
    std::vector<double> out(ds.size());
    std::vector<i64> missing;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (const auto v = cache.get(ds[i])) {
            out[i] = v->value;
        } else {
            missing.push_back(ds[i]);
            where.push_back(i);
        }
    }
    if (!missing.empty()) {
        const auto fresh = engine.central_values(missing, tol);
        cache.put_all(fresh);
        for (std::size_t k = 0; k < fresh.size(); ++k) out[where[k]] = fresh[k].value;
    }
    return out;
}

}  // namespace qtwist
