#include "qtwist/curve.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "qtwist/error.hpp"
#include "qtwist/pointcount.hpp"
#include "qtwist/reduce.hpp"

namespace qtwist {

__int128 WeierstrassModel::b8() const noexcept {
    const __int128 a1 = a[0], a2 = a[1], a3 = a[2], a4 = a[3], a6 = a[4];
    return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
}

__int128 WeierstrassModel::c4() const noexcept {
    const __int128 B2 = b2(), B4 = b4();
    return B2 * B2 - 24 * B4;
}

__int128 WeierstrassModel::c6() const noexcept {
    const __int128 B2 = b2(), B4 = b4(), B6 = b6();
    return -B2 * B2 * B2 + 36 * B2 * B4 - 216 * B6;
}

__int128 WeierstrassModel::discriminant() const noexcept {
    const __int128 B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
    return -B2 * B2 * B8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;
}

u64 CurveConfig::n0() const noexcept {
    if (conductor == 0) return 8;
    return conductor / gcd(conductor, 8) * 8;
}

std::vector<u64> CurveConfig::n0_primes() const {
    std::vector<u64> out;
    for (const auto& [p, e] : factorize_trial(n0()).factors) out.push_back(p);
    return out;
}

void CurveConfig::validate() const {
    if (label.empty()) throw ConfigError("curve config: label is empty");
    if (conductor == 0) throw ConfigError("curve config: conductor must be positive");
    if (root_number != 1 && root_number != -1) throw ConfigError("curve config: root_number must be +1 or -1");
    if (!(real_period > 0.0)) throw ConfigError("curve config: real_period must be positive");
    if (torsion_order < 1 || torsion_order > 12) throw ConfigError("curve config: torsion_order must lie in [1, 12]");
    if (twist_torsion_order && (*twist_torsion_order < 1 || *twist_torsion_order > 12))
        throw ConfigError("curve config: twist_torsion_order must lie in [1, 12]");
    const double twice = 2.0 * u_tilde;
    if (!(u_tilde > 0.0) || twice != std::round(twice))
        throw ConfigError("curve config: u_tilde must be a positive half-integer");
    if (model.discriminant() == 0) throw ConfigError("curve config: Weierstrass model is singular");
    const u64 N0 = n0();
    for (const auto& [p, c] : bad_tamagawa) {
        if (N0 % p != 0) throw ConfigError("curve config: bad_tamagawa key " + std::to_string(p) + " does not divide N0");
        if (c < 1) throw ConfigError("curve config: bad_tamagawa values must be positive");
    }
    for (const auto& [p, v] : sym2_override) {
        if (N0 % p != 0) throw ConfigError("curve config: sym2_override key " + std::to_string(p) + " does not divide N0");
        if (!(v > 0.0)) throw ConfigError("curve config: sym2_override values must be positive");
    }
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string strip_brackets(const std::string& v, char open, char close, const std::string& key) {
    const std::string t = trim(v);
    if (t.size() < 2 || t.front() != open || t.back() != close)
        throw ConfigError("curve config: " + key + " must be written as " + open + "..." + close);
    return t.substr(1, t.size() - 2);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& key) {
    std::istringstream is(trim(text));
    T v{};
    is >> v;
    if (is.fail() || !is.eof()) throw ConfigError("curve config: cannot parse value of " + key + ": '" + text + "'");
    return v;
}

template <typename V>
std::map<u64, V> parse_map(const std::string& value, const std::string& key) {
    std::map<u64, V> out;
    for (const auto& entry : split(strip_brackets(value, '{', '}', key), ',')) {
        const auto colon = entry.find(':');
        if (colon == std::string::npos) throw ConfigError("curve config: " + key + " entry lacks ':'");
        out[parse_number<u64>(entry.substr(0, colon), key)] = parse_number<V>(entry.substr(colon + 1), key);
    }
    return out;
}

}  // namespace

CurveConfig parse_curve_config(const std::string& text) {
    CurveConfig cfg;
    bool have_model = false, have_conductor = false, have_period = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("curve config: line " + std::to_string(lineno) + " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "label") {
            cfg.label = value;
        } else if (key == "weierstrass") {
            const auto items = split(strip_brackets(value, '[', ']', key), ',');
            if (items.size() != 5) throw ConfigError("curve config: weierstrass needs five coefficients");
            for (std::size_t i = 0; i < 5; ++i) cfg.model.a[i] = parse_number<i64>(items[i], key);
            have_model = true;
        } else if (key == "conductor") {
            cfg.conductor = parse_number<u64>(value, key);
            have_conductor = true;
        } else if (key == "root_number") {
            cfg.root_number = parse_number<int>(value, key);
        } else if (key == "real_period") {
            cfg.real_period = parse_number<double>(value, key);
            have_period = true;
        } else if (key == "torsion_order") {
            cfg.torsion_order = parse_number<int>(value, key);
        } else if (key == "u_tilde") {
            cfg.u_tilde = parse_number<double>(value, key);
        } else if (key == "bad_tamagawa") {
            cfg.bad_tamagawa = parse_map<int>(value, key);
        } else if (key == "sym2_override") {
            cfg.sym2_override = parse_map<double>(value, key);
        } else if (key == "twist_torsion_order") {
            cfg.twist_torsion_order = parse_number<int>(value, key);
        } else {
            throw ConfigError("curve config: unknown key '" + key + "'");
        }
    }
    if (!have_model) throw ConfigError("curve config: missing key weierstrass");
    if (!have_conductor) throw ConfigError("curve config: missing key conductor");
    if (!have_period) throw ConfigError("curve config: missing key real_period");
    cfg.validate();
    return cfg;
}

CurveConfig load_curve_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("curve config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_curve_config(ss.str());
}

double ap_point_count(const CurveConfig& cfg, u64 p) {
    if (cfg.bad_at(p)) throw DomainError("ap_point_count: p = " + std::to_string(p) + " divides the conductor");
    const i64 A = trace_bruteforce(cfg.model, p);
    return static_cast<double>(A) / std::sqrt(static_cast<double>(p));
}

std::pair<std::complex<double>, std::complex<double>> CoefficientTable::satake(u64 p) const {
    if (is_bad(p)) throw DomainError("satake: p = " + std::to_string(p) + " is a bad prime");
    const double ap = a(p);
    const double im = std::sqrt(std::max(0.0, 4.0 - ap * ap)) / 2.0;
    return {{ap / 2.0, im}, {ap / 2.0, -im}};
}

std::vector<std::int32_t> CoefficientTable::prime_coefficients() const {
    std::vector<std::int32_t> out;
    out.reserve(primes_.size());
    for (u32 p : primes_) out.push_back(an_[p]);
    return out;
}

CoefficientTable build_coefficients_from_primes(const CurveConfig& cfg, u64 nmax, const PrimeTable& primes,
                                                std::span<const std::int32_t> ap) {
    if (nmax < 1) throw DomainError("build_coefficients: nmax must be >= 1");
    if (nmax > kMaxCoefficients) throw ResourceError("build_coefficients: nmax exceeds the compute budget");
    if (primes.limit() < nmax) throw DomainError("build_coefficients: prime table shorter than nmax");

    CoefficientTable t;
    t.nmax_ = nmax;
    t.conductor_ = cfg.conductor;
    t.an_.assign(nmax + 1, 1);
    t.an_[0] = 0;

    std::vector<u32> kept;
    for (std::size_t i = 0; i < primes.size() && primes[i] <= nmax; ++i) {
        if (i >= ap.size()) throw DomainError("build_coefficients: missing A_p for p = " + std::to_string(primes[i]));
        const u64 p = primes[i];
        kept.push_back(primes[i]);
        const bool bad = cfg.bad_at(p);
        // A at p^{k-1} and p^{k-2}
        i64 prev = 1, prev2 = 0;
        const i64 Ap = ap[i];
        for (u64 q = p; q <= nmax; q *= p) {
            const i64 cur = bad ? Ap * prev : Ap * prev - static_cast<i64>(p) * prev2;
            prev2 = prev;
            prev = cur;
            // multiples of q not divisible by p q
            for (u64 m = q, j = 1; m <= nmax; m += q, ++j) {
                if (j % p == 0) continue;
                t.an_[m] = static_cast<std::int32_t>(t.an_[m] * cur);
            }
            if (q > nmax / p) break;
        }
    }
    t.primes_ = PrimeTable(nmax, std::move(kept));
    return t;
}

CoefficientTable build_coefficients(const CurveConfig& cfg, u64 nmax, std::span<const std::int32_t> known_ap) {
    if (nmax < 1) throw DomainError("build_coefficients: nmax must be >= 1");
    if (nmax > kMaxCoefficients) throw ResourceError("build_coefficients: nmax exceeds the compute budget");
    const PrimeTable primes = sieve_primes(std::max<u64>(nmax, 2));
    const std::size_t reuse = std::min(known_ap.size(), primes.size());
    std::vector<std::int32_t> ap(known_ap.begin(), known_ap.begin() + static_cast<std::ptrdiff_t>(reuse));
    const auto rest = traces_parallel(cfg.model, cfg.conductor,
                                      std::span<const u32>(primes.primes()).subspan(reuse));
    ap.insert(ap.end(), rest.begin(), rest.end());
    return build_coefficients_from_primes(cfg, nmax, primes, ap);
}

CoefficientTable build_coefficients(const CurveConfig& cfg, u64 nmax) {
    return build_coefficients(cfg, nmax, {});
}

double pnt_ratio(const CoefficientTable& table, u64 x) {
    if (x > table.nmax()) throw DomainError("pnt_ratio: x exceeds the coefficient table");
    if (x < 2) return 0.0;
    CompensatedSum acc;
    for (u32 p : table.primes()) {
        if (p > x) break;
        const double A = table.A(p);
        acc.add(A * A / static_cast<double>(p) * std::log(static_cast<double>(p)));
    }
    return acc.value() / static_cast<double>(x);
}

double sym2_local(const CurveConfig& cfg, const CoefficientTable& table, u64 p) {
    if (const auto it = cfg.sym2_override.find(p); it != cfg.sym2_override.end()) return it->second;
    const double pd = static_cast<double>(p);
    const double A = table.A(p);
    const double a2 = A * A / pd;
    if (cfg.bad_at(p)) return 1.0 / (1.0 - a2 / pd);
    // (1 - alpha^2/p)(1 - beta^2/p) in real form
    const double Y = 1.0 - (a2 - 2.0) / pd + 1.0 / (pd * pd);
    return 1.0 / (Y * (1.0 - 1.0 / pd));
}

Sym2Value sym2_value(const CoefficientTable& table, const CurveConfig& cfg, u64 pmax) {
    if (pmax > table.nmax()) throw DomainError("sym2_value: pmax exceeds the coefficient table");
    CompensatedSum full, half;
    for (u32 p : table.primes()) {
        if (p > pmax) break;
        const double lf = std::log(sym2_local(cfg, table, p));
        full.add(lf);
        if (2 * u64{p} <= pmax) half.add(lf);
    }
    return {std::exp(full.value()), std::exp(half.value()), pmax};
}

}  // namespace qtwist
