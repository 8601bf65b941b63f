// Command-line front end. Every subcommand writes CSV or JSON lines to
// --output (stdout by default); failures print one JSON error record on
// stderr and exit nonzero.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "qtwist/bump.hpp"
#include "qtwist/cache.hpp"
#include "qtwist/curve.hpp"
#include "qtwist/error.hpp"
#include "qtwist/eulerfactors.hpp"
#include "qtwist/lvalue.hpp"
#include "qtwist/moments.hpp"
#include "qtwist/resonator.hpp"
#include "qtwist/search.hpp"
#include "qtwist/sieve.hpp"
#include "qtwist/twists.hpp"

using namespace qtwist;
using nlohmann::json;

namespace {

struct Global {
    std::string curve = "data/11a1.conf";
    std::string output;
    std::string format = "jsonl";
    std::string cache_dir;
    int threads = 0;
};

struct FamilyFlags {
    double X = 1e4;
    int sign = 1;
    std::optional<i64> a;
    double tol = 1e-8;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
            if (!*file_) throw ResourceError("cannot open output " + path);
        }
    }
    std::ostream& out() { return file_ ? *file_ : std::cout; }
    void line(const std::string& s) { out() << s << '\n'; }
    void json_line(const json& j) { line(j.dump()); }

private:
    std::unique_ptr<std::ofstream> file_;
};

i64 pick_class(const CurveConfig& cfg, const FamilyFlags& f) {
    if (f.a) return static_cast<i64>(mod_floor(*f.a, cfg.n0()));
    const auto classes = discover_classes(cfg, f.sign);
    if (classes.empty()) throw DomainError("no residue class with root number +1 for this sign");
    return classes.front();
}

std::optional<std::pair<u64, u64>> parse_window(const std::string& w) {
    if (w.empty()) return std::nullopt;
    const auto colon = w.find(':');
    if (colon == std::string::npos) throw DomainError("--window must be lo:hi");
    try {
        return std::make_pair(std::stoull(w.substr(0, colon)), std::stoull(w.substr(colon + 1)));
    } catch (const std::exception&) {
        throw DomainError("--window must be lo:hi with integers");
    }
}

// Coefficients from the cache, long enough for central values at |d| <= hi.
CoefficientTable table_for(const CurveConfig& cfg, const Global& g, u64 hi, double tol, u64 floor_nmax = 0) {
    const double Q = std::sqrt(static_cast<double>(cfg.conductor)) * static_cast<double>(hi) / (2.0 * M_PI);
    const u64 need = std::max(LValueEngine::truncation(Q, tol), floor_nmax);
    return require_coefficients(cfg, need, cache_dir(g.cache_dir));
}

std::vector<double> lvalues_for(const CurveConfig& cfg, const Global& g, const LValueEngine& engine,
                                const std::vector<i64>& ds, double tol) {
    LValueCache cache(LValueCache::default_path(cache_dir(g.cache_dir), cfg.label, tol), cfg.label, tol);
    return cached_central_values(engine, cache, ds, tol);
}

void write_family(Sink& sink, const Global& g, const std::vector<TwistDiscriminant>& fam) {
    if (g.format == "csv") {
        sink.line("d,omega,factorization,root_number");
        for (const auto& t : fam)
            sink.line(std::to_string(t.d) + "," + std::to_string(t.omega) + "," + t.factorization.to_string() + "," +
                      std::to_string(t.root_number));
    } else {
        for (const auto& t : fam)
            sink.json_line({{"d", t.d},
                            {"omega", t.omega},
                            {"factorization", t.factorization.to_string()},
                            {"root_number", t.root_number}});
    }
}

void add_family_flags(CLI::App* sub, FamilyFlags& f) {
    sub->add_option("--X", f.X, "Window scale: X/2 <= |d| <= 5X/2")->check(CLI::PositiveNumber);
    sub->add_option("--sign", f.sign, "Sign of d")->check(CLI::IsMember({1, -1}));
    sub->add_option("--a", f.a, "Residue class a mod N0 (default: first admissible class)");
    sub->add_option("--tol", f.tol, "Central-value tolerance")->check(CLI::Range(1e-15, 1e-2));
}

// Resonator of the given sign; without a window override and with an empty
// default window it falls back to the empty window (R = 1).
Resonator make_resonator(const CurveConfig& cfg, const CoefficientTable& table, u64 M, int sign,
                         const std::optional<std::pair<u64, u64>>& window, bool* fell_back = nullptr) {
    ResonatorParams rp{M, sign, window};
    if (!window) {
        try {
            rp.validate();
        } catch (const DomainError&) {
            rp.window_override = std::make_pair(u64{1}, u64{0});
            if (fell_back) *fell_back = true;
        }
    }
    return Resonator(rp, cfg, table);
}

std::vector<double> resonator_values(const Resonator& r, const std::vector<i64>& ds) {
    const auto vals = r.resonate_all(ds);
    std::vector<double> out;
    out.reserve(vals.size());
    for (const auto& v : vals) out.push_back(v.value);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Central values of quadratic twists of an elliptic curve"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--curve", g.curve, "Curve configuration file");
    app.add_option("--output,-o", g.output, "Output file (default: stdout)");
    app.add_option("--format", g.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    app.add_option("--cache-dir", g.cache_dir, std::string("Cache directory (default: $") + kCacheDirEnv +
                                                   " or .qtwist-cache)");
    app.add_option("--threads", g.threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);

    u64 nmax = 100000;
    auto* coeffs = app.add_subcommand("coeffs", "Compute and cache the Hecke coefficients");
    coeffs->add_option("--nmax", nmax, "Largest n")->check(CLI::PositiveNumber);

    FamilyFlags ff;
    int fam_W = 0;
    double fam_z = 0.0;
    auto* family = app.add_subcommand("family", "List the twist family");
    add_family_flags(family, ff);
    family->add_option("--W", fam_W, "Keep omega(d) <= W (0: no cap)");
    family->add_option("--z", fam_z, "Keep z-rough d (0: no filter)");

    auto* lvalues = app.add_subcommand("lvalues", "Central values over the family");
    add_family_flags(lvalues, ff);

    std::string mkind = "char";
    u64 mn = 1, mu = 1, ml = 1, mM = 1, mpmax = 100000, mD = 0;
    std::string mwindow;
    int msign_res = 1;
    auto* moments = app.add_subcommand("moments", "Moment reports against predicted main terms");
    add_family_flags(moments, ff);
    moments->add_option("--kind", mkind, "char, first, C or D")->check(CLI::IsMember({"char", "first", "C", "D"}));
    moments->add_option("--n", mn, "Character argument n (char)");
    moments->add_option("--u", mu, "Twist u (first)");
    moments->add_option("--l", ml, "Divisibility l | d");
    moments->add_option("--M", mM, "Resonator length (C, D)");
    moments->add_option("--window", mwindow, "Resonator window override lo:hi");
    moments->add_option("--resonator-sign", msign_res, "Resonator sign")->check(CLI::IsMember({1, -1}));
    moments->add_option("--pmax", mpmax, "Euler product truncation");
    moments->add_option("--D", mD, "Also report the remainder ledger up to l <= D (C, D)");

    double smax = 8.0, step = 1e-3;
    std::string sweep;
    auto* sievefns = app.add_subcommand("sieve-fns", "Tabulate the linear sieve functions F and f");
    sievefns->add_option("--smax", smax, "Largest s");
    sievefns->add_option("--step", step, "Grid step");
    sievefns->add_option("--sweep", sweep, "Instead print F, f at n+1 points: lo,hi,n");

    int sW = 20;
    bool paper = false;
    u64 sM = 0;
    double sz = 0.0, sD = 0.0;
    std::string swindow;
    auto* search = app.add_subcommand("search", "Extreme central values over rough twists");
    add_family_flags(search, ff);
    search->add_option("--W", sW, "Cap on omega(d)");
    search->add_flag("--paper-regime", paper, "Lock s = 2.023 and the z, D, M relations (needs W >= 20)");
    search->add_option("--M", sM, "Resonator length (default: from X and W)");
    search->add_option("--z", sz, "Roughness cutoff (default: from X and W)");
    search->add_option("--D", sD, "Sieve level (default: from X and W)");
    search->add_option("--window", swindow, "Resonator window override lo:hi");

    int shW = 20;
    auto* sha = app.add_subcommand("sha", "BSD quantity S(E_d) over the family");
    add_family_flags(sha, ff);
    sha->add_option("--W", shW, "Cap on omega(d)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (g.threads > 0) omp_set_num_threads(g.threads);
        const CurveConfig cfg = load_curve_config(g.curve);
        cfg.validate();
        Sink sink(g.output);
        const BumpFunction bump;

        if (*coeffs) {
            CacheStatus status;
            const auto table = load_or_build_coefficients(cfg, nmax, cache_dir(g.cache_dir), &status);
            sink.json_line({{"kind", "coeffs"},
                            {"label", cfg.label},
                            {"nmax", table.nmax()},
                            {"primes", table.primes().size()},
                            {"status", to_string(status)},
                            {"path", coefficient_cache_path(cache_dir(g.cache_dir), cfg.label).string()}});
        } else if (*family) {
            const i64 a = pick_class(cfg, ff);
            const FamilyParams fp{a, ff.sign, ff.X};
            const PrimeTable primes = sieve_primes(isqrt(fp.hi()) + 2);
            auto fam = enum_family(cfg, fp, primes);
            if (fam_W > 0) fam = filter_almost_prime(fam, fam_W);
            if (fam_z > 0.0) fam = filter_rough(fam, cfg, fam_z);
            write_family(sink, g, fam);
        } else if (*lvalues) {
            const i64 a = pick_class(cfg, ff);
            const PrimeTable primes = sieve_primes(isqrt(static_cast<u64>(2.5 * ff.X)) + 2);
            const auto fam = weighted_family(cfg, a, ff.sign, ff.X, bump, primes);
            const auto table = table_for(cfg, g, static_cast<u64>(2.5 * ff.X), ff.tol);
            const LValueEngine engine(cfg, table);
            const auto ds = fam.discriminants();
            LValueCache cache(LValueCache::default_path(cache_dir(g.cache_dir), cfg.label, ff.tol), cfg.label, ff.tol);
            cached_central_values(engine, cache, ds, ff.tol);
            if (g.format == "csv") sink.line("d,value,tail,T");
            for (i64 d : ds) {
                const auto v = *cache.get(d);
                if (g.format == "csv")
                    sink.line(std::to_string(d) + "," + num(v.value) + "," + num(v.tail) + "," + std::to_string(v.T));
                else
                    sink.json_line({{"d", d}, {"value", v.value}, {"tail", v.tail}, {"T", v.T}});
            }
        } else if (*moments) {
            const i64 a = pick_class(cfg, ff);
            const PrimeTable primes = sieve_primes(isqrt(static_cast<u64>(2.5 * ff.X)) + 2);
            const auto fam = weighted_family(cfg, a, ff.sign, ff.X, bump, primes);
            const auto ds = fam.discriminants();
            const double phi0 = bump.mellin(0.0);
            std::vector<json> out;
            if (mkind == "char") {
                out.push_back(char_moment(cfg, fam, mn, ml, phi0).to_json());
            } else {
                const bool need_L = mkind != "D";
                const auto table = need_L ? table_for(cfg, g, static_cast<u64>(2.5 * ff.X), ff.tol, mpmax)
                                          : require_coefficients(cfg, std::max<u64>({mpmax, mM, 3}),
                                                                 cache_dir(g.cache_dir));
                const EulerFactors ef(cfg, table, mpmax);
                std::vector<double> L;
                MainTermInputs in;
                if (need_L) {
                    const LValueEngine engine(cfg, table);
                    L = lvalues_for(cfg, g, engine, ds, ff.tol);
                    in = main_term_inputs(cfg, table, ef, a, bump);
                }
                if (mkind == "first") {
                    out.push_back(first_moment(cfg, table, ef, fam, L, mu, ml, in).to_json());
                } else {
                    const Resonator res = make_resonator(cfg, table, mM, msign_res, parse_window(mwindow));
                    const auto R = resonator_values(res, ds);
                    const auto rep = mkind == "C" ? congruence_C(cfg, ef, fam, L, R, res, ml, in)
                                                  : congruence_D(cfg, ef, fam, R, res, ml, phi0);
                    out.push_back(rep.to_json());
                    if (mD > 0) {
                        std::vector<double> w(fam.size());
                        for (std::size_t i = 0; i < fam.size(); ++i)
                            w[i] = (mkind == "C" ? L[i] : 1.0) * (R[i] * R[i]) * fam.phi[i];
                        const DivisorBuckets buckets(fam, w, mD);
                        const double X_hat = mkind == "C" ? ef.X1(res, in.phi0, fam.X, in.La_half, in.sym2_C)
                                                          : ef.X2(res, phi0, fam.X);
                        const auto ledger = remainder_ledger(
                            cfg, buckets,
                            [&](u64 l) { return mkind == "C" ? ef.g1(res, l) : ef.g2(res, l); }, X_hat);
                        out.push_back({{"kind", "remainder_ledger"},
                                       {"sum", mkind},
                                       {"D", ledger.D},
                                       {"terms", ledger.terms},
                                       {"R", ledger.R},
                                       {"max_abs", ledger.max_abs},
                                       {"argmax", ledger.argmax},
                                       {"X_hat", X_hat}});
                    }
                }
            }
            if (g.format == "csv") {
                sink.line("kind,params,empirical,predicted,ratio,remainder_scale,family_size");
                for (const auto& j : out) {
                    if (!j.contains("empirical")) continue;
                    std::string params = j["params"].dump();
                    for (char& c : params)
                        if (c == ',') c = ';';
                    auto f = [](const json& v) { return v.is_null() ? std::string("nan") : num(v.get<double>()); };
                    sink.line(j["kind"].get<std::string>() + "," + params + "," + f(j["empirical"]) + "," +
                              f(j["predicted"]) + "," + f(j["ratio"]) + "," + f(j["remainder_scale"]) + "," +
                              std::to_string(j["family_size"].get<std::size_t>()));
                }
            } else {
                for (const auto& j : out) sink.json_line(j);
            }
        } else if (*sievefns) {
            const auto table = sieve_functions(smax, step);
            sink.line("s,F,f");
            if (!sweep.empty()) {
                double lo = 0, hi = 0;
                int n = 0;
                if (std::sscanf(sweep.c_str(), "%lf,%lf,%d", &lo, &hi, &n) != 3)
                    throw DomainError("--sweep must be lo,hi,n");
                for (const auto& r : sieve_sweep(table, lo, hi, n)) sink.line(num(r.s) + "," + num(r.F) + "," + num(r.f));
            } else {
                const auto& s = table.grid();
                for (std::size_t i = 0; i < s.size(); ++i) {
                    char buf[96];
                    std::snprintf(buf, sizeof buf, "%.3f,%.17g,%.17g", s[i], table.F_values()[i], table.f_values()[i]);
                    sink.line(buf);
                }
            }
        } else if (*search) {
            const i64 a = pick_class(cfg, ff);
            FamilyParams fp;
            if (paper) {
                if (sM || sz > 0 || sD > 0) throw DomainError("--paper-regime fixes z, D and M; drop --M/--z/--D");
                fp = FamilyParams::paper(cfg, a, ff.sign, ff.X, sW);
            } else {
                if (sW >= 20) {
                    fp = FamilyParams::paper(cfg, a, ff.sign, ff.X, sW);
                } else {
                    fp.a = a;
                    fp.sign = ff.sign;
                    fp.X = ff.X;
                    fp.W = sW;
                    fp.z = 2.0;
                    fp.D = 4.0;
                }
                if (sM) fp.M = sM;
                if (sz > 0) fp.z = sz;
                if (sD > 0) fp.D = sD;
                fp.s = std::log(fp.D) / std::log(fp.z);
                fp.validate(cfg);
            }
            const PrimeTable primes = sieve_primes(isqrt(fp.hi()) + 2);
            const auto fam = weighted_family(cfg, a, ff.sign, ff.X, bump, primes);
            const auto table = table_for(cfg, g, fp.hi(), ff.tol, std::max<u64>(fp.M, 3));
            const LValueEngine engine(cfg, table);
            const auto ds = fam.discriminants();
            const auto L = lvalues_for(cfg, g, engine, ds, ff.tol);
            bool fell_back = false;
            const auto window = parse_window(swindow);
            const Resonator rp = make_resonator(cfg, table, fp.M, 1, window, &fell_back);
            const Resonator rm = make_resonator(cfg, table, fp.M, -1, window);
            const auto rep = extreme_search(cfg, fp, fam, L, resonator_values(rp, ds), resonator_values(rm, ds));
            json j = rep.to_json();
            j["resonator_window"] = fell_back ? "empty" : rp.params().regime();
            j["paper_regime"] = paper;
            if (g.format == "csv") {
                sink.line("X,W,family_size,max_d,max_value,min_d,min_value,ratio_plus,ratio_minus,theorem_bound");
                auto o = [](const std::optional<double>& v) { return v ? num(*v) : std::string("nan"); };
                sink.line(num(fp.X) + "," + std::to_string(fp.W) + "," + std::to_string(rep.family_size) + "," +
                          std::to_string(rep.max_d) + "," + num(rep.max_value) + "," + std::to_string(rep.min_d) +
                          "," + num(rep.min_value) + "," + o(rep.ratio_plus) + "," + o(rep.ratio_minus) + "," +
                          num(rep.theorem_bound));
            } else {
                sink.json_line(j);
            }
        } else if (*sha) {
            const i64 a = pick_class(cfg, ff);
            const PrimeTable primes = sieve_primes(isqrt(static_cast<u64>(2.5 * ff.X)) + 2);
            auto fam = weighted_family(cfg, a, ff.sign, ff.X, bump, primes);
            const auto table = table_for(cfg, g, static_cast<u64>(2.5 * ff.X), ff.tol);
            const LValueEngine engine(cfg, table);
            const auto L = lvalues_for(cfg, g, engine, fam.discriminants(), ff.tol);
            std::vector<ShaReport> rows;
            for (std::size_t i = 0; i < fam.size(); ++i)
                if (shW == 0 || fam.members[i].omega <= shW) rows.push_back(sha_row(cfg, fam.members[i], L[i]));
            const auto summary = sha_summary(rows, ff.X, shW);
            if (g.format == "csv") {
                sink.line("d,L_value,torsion_sq,period_twist,tamagawa,S_value");
                for (const auto& r : rows)
                    sink.line(std::to_string(r.d) + "," + num(r.L_value) + "," + std::to_string(r.torsion_sq) + "," +
                              num(r.period_twist) + "," + std::to_string(r.tamagawa) + "," + num(r.S_value));
            } else {
                for (const auto& r : rows) sink.json_line(r.to_json());
                sink.json_line(summary.to_json());
            }
        }
    } catch (const Error& e) {
        std::cerr << json{{"error", e.kind()}, {"message", e.what()}}.dump() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
        return 3;
    }
    return 0;
}
