#include "qtwist/moments.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qtwist/error.hpp"
#include "qtwist/lvalue.hpp"
#include "qtwist/reduce.hpp"

namespace qtwist {

namespace {

u64 abs_d(i64 d) { return static_cast<u64>(d < 0 ? -d : d); }

void check_coprime_args(const CurveConfig& cfg, u64 n, u64 ell, const char* what) {
    const std::string w(what);
    if (n == 0 || ell == 0) throw DomainError(w + ": arguments must be positive");
    if (gcd(n, ell) != 1) throw DomainError(w + ": gcd(n, l) must be 1");
    if (gcd(n, cfg.n0()) != 1 || gcd(ell, cfg.n0()) != 1) throw DomainError(w + ": gcd(n l, N0) must be 1");
    if (!is_squarefree(ell)) throw DomainError(w + ": l must be squarefree");
}

bool is_square(u64 n) {
    const u64 r = isqrt(n);
    return r * r == n;
}

// sum over members with l | d of f(i), in family order.
template <class F>
std::pair<double, std::size_t> restricted_sum(const WeightedFamily& fam, u64 ell, F&& f) {
    std::vector<double> terms;
    for (std::size_t i = 0; i < fam.size(); ++i)
        if (abs_d(fam.members[i].d) % ell == 0) terms.push_back(f(i));
    return {pairwise_sum(terms), terms.size()};
}

MomentReport make_report(MomentKind kind, nlohmann::json params, double empirical, double predicted,
                         double scale, std::size_t size) {
    MomentReport r;
    r.kind = kind;
    r.params = std::move(params);
    r.empirical = empirical;
    r.predicted = predicted;
    r.ratio = predicted != 0.0 ? empirical / predicted : std::numeric_limits<double>::quiet_NaN();
    r.remainder_scale = scale;
    r.family_size = size;
    return r;
}

void check_aligned(const WeightedFamily& fam, std::size_t n, const char* what) {
    if (n != fam.size()) throw DomainError(std::string(what) + ": values must align with the family");
}

}  // namespace

std::vector<i64> WeightedFamily::discriminants() const {
    std::vector<i64> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back(m.d);
    return out;
}

WeightedFamily weighted_family(const CurveConfig& cfg, i64 a, int sign, double X, const BumpFunction& bump,
                               const PrimeTable& primes) {
    if (!(X >= 16.0)) throw DomainError("weighted_family: X must be >= 16");
    WeightedFamily fam;
    fam.a = mod_floor(a, cfg.n0());
    fam.sign = sign;
    fam.X = X;
    const u64 lo = static_cast<u64>(std::ceil(X / 2.0));
    const u64 hi = static_cast<u64>(std::floor(2.5 * X));
    fam.members = enum_family(cfg, fam.a, sign, lo, hi, primes);
    fam.phi.reserve(fam.members.size());
    for (const auto& m : fam.members) fam.phi.push_back(bump(static_cast<double>(abs_d(m.d)) / X));
    return fam;
}

MainTermInputs main_term_inputs(const CurveConfig& cfg, const CoefficientTable& table, const EulerFactors& ef,
                                i64 a, const BumpFunction& bump) {
    MainTermInputs in;
    in.phi0 = bump.mellin(0.0);
    in.La_half = local_factor_La(cfg, table, a, 0.5);
    in.sym2_C = ef.sym2_times_C().value;
    return in;
}

std::string to_string(MomentKind kind) {
    switch (kind) {
        case MomentKind::char_square: return "char_square";
        case MomentKind::char_nonsquare: return "char_nonsquare";
        case MomentKind::first_moment: return "first_moment";
        case MomentKind::C_sum: return "C_sum";
        case MomentKind::D_sum: return "D_sum";
    }
    return "unknown";
}

nlohmann::json MomentReport::to_json() const {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    nlohmann::json j;
    j["kind"] = to_string(kind);
    j["params"] = params;
    j["empirical"] = num(empirical);
    j["predicted"] = num(predicted);
    j["ratio"] = num(ratio);
    j["remainder_scale"] = num(remainder_scale);
    j["family_size"] = family_size;
    return j;
}

std::string MomentReport::to_jsonl() const { return to_json().dump(); }

MomentReport char_moment(const CurveConfig& cfg, const WeightedFamily& fam, u64 n, u64 ell, double phi0) {
    check_coprime_args(cfg, n, ell, "char_moment");
    const auto [emp, size] = restricted_sum(fam, ell, [&](std::size_t i) {
        return kronecker(fam.members[i].d, static_cast<i64>(n)) * fam.phi[i];
    });
    const bool square = is_square(n);
    double predicted = 0.0;
    if (square) {
        predicted = phi0 * fam.X / (static_cast<double>(ell) * static_cast<double>(cfg.n0()));
        for (const auto& [p, e] : factorize_trial(n * ell).factors) predicted /= 1.0 + 1.0 / static_cast<double>(p);
        predicted *= 6.0 / (std::numbers::pi * std::numbers::pi);
        for (u64 p : cfg.n0_primes()) predicted /= 1.0 - 1.0 / static_cast<double>(p * p);
    }
    nlohmann::json params{{"n", n}, {"l", ell}, {"X", fam.X}, {"sign", fam.sign}, {"a", fam.a}};
    return make_report(square ? MomentKind::char_square : MomentKind::char_nonsquare, params, emp, predicted,
                       std::sqrt(fam.X) * std::sqrt(static_cast<double>(n)), size);
}

MomentReport first_moment(const CurveConfig& cfg, const CoefficientTable& table, const EulerFactors& ef,
                          const WeightedFamily& fam, std::span<const double> lvalues, u64 u, u64 ell,
                          const MainTermInputs& in) {
    check_coprime_args(cfg, u, ell, "first_moment");
    check_aligned(fam, lvalues.size(), "first_moment");
    const auto [emp, size] = restricted_sum(fam, ell, [&](std::size_t i) {
        const double chi = kronecker(fam.members[i].d, static_cast<i64>(u));
        return lvalues[i] * chi * fam.phi[i];
    });
    u64 u1 = 1;
    for (const auto& [p, e] : factorize_trial(u).factors)
        if (e % 2) u1 *= p;
    if (u1 > table.nmax()) throw ResourceError("first_moment: coefficient table must cover u1");
    const double predicted = 2.0 * fam.X * table.a(u1) /
                             (static_cast<double>(ell) * std::sqrt(static_cast<double>(u1)) *
                              static_cast<double>(cfg.n0())) *
                             in.phi0 * in.La_half * in.sym2_C * ef.h_tilde_of(u) * ef.h_of(ell);
    const double scale = std::pow(fam.X, 7.0 / 8.0) * std::pow(static_cast<double>(u), 3.0 / 8.0) *
                         std::pow(static_cast<double>(ell), 0.25);
    nlohmann::json params{{"u", u}, {"l", ell}, {"X", fam.X}, {"sign", fam.sign}, {"a", fam.a}};
    return make_report(MomentKind::first_moment, params, emp, predicted, scale, size);
}

MomentReport congruence_C(const CurveConfig& cfg, const EulerFactors& ef, const WeightedFamily& fam,
                          std::span<const double> lvalues, std::span<const double> resonator_values,
                          const Resonator& res, u64 ell, const MainTermInputs& in) {
    check_coprime_args(cfg, 1, ell, "congruence_C");
    check_aligned(fam, lvalues.size(), "congruence_C");
    check_aligned(fam, resonator_values.size(), "congruence_C");
    const auto [emp, size] = restricted_sum(fam, ell, [&](std::size_t i) {
        const double r = resonator_values[i];
        return lvalues[i] * (r * r) * fam.phi[i];
    });
    const double predicted = ef.g1(res, ell) * ef.X1(res, in.phi0, fam.X, in.La_half, in.sym2_C);
    const double scale = std::pow(fam.X, 7.0 / 8.0) * std::pow(static_cast<double>(res.params().M), 11.0 / 4.0) *
                         std::pow(static_cast<double>(ell), 0.25);
    nlohmann::json params{{"l", ell},         {"X", fam.X}, {"sign", fam.sign},
                          {"a", fam.a},       {"M", res.params().M},
                          {"resonator_sign", res.params().sign}, {"window_primes", res.primes().size()}};
    return make_report(MomentKind::C_sum, params, emp, predicted, scale, size);
}

MomentReport congruence_D(const CurveConfig& cfg, const EulerFactors& ef, const WeightedFamily& fam,
                          std::span<const double> resonator_values, const Resonator& res, u64 ell, double phi0) {
    check_coprime_args(cfg, 1, ell, "congruence_D");
    check_aligned(fam, resonator_values.size(), "congruence_D");
    const auto [emp, size] = restricted_sum(fam, ell, [&](std::size_t i) {
        const double r = resonator_values[i];
        return (r * r) * fam.phi[i];
    });
    const double predicted = ef.g2(res, ell) * ef.X2(res, phi0, fam.X);
    const double M = static_cast<double>(res.params().M);
    nlohmann::json params{{"l", ell},         {"X", fam.X}, {"sign", fam.sign},
                          {"a", fam.a},       {"M", res.params().M},
                          {"resonator_sign", res.params().sign}, {"window_primes", res.primes().size()}};
    return make_report(MomentKind::D_sum, params, emp, predicted, M * M * M * std::sqrt(fam.X), size);
}

DivisorBuckets::DivisorBuckets(const WeightedFamily& fam, std::span<const double> weights, u64 D)
    : D_(D), sums_(D + 1, 0.0) {
    check_aligned(fam, weights.size(), "DivisorBuckets");
    if (D < 1) throw DomainError("DivisorBuckets: D must be >= 1");
    std::vector<CompensatedSum> acc(D + 1);
    std::vector<u64> divs;
    for (std::size_t i = 0; i < fam.size(); ++i) {
        divs.assign(1, 1);
        for (const auto& [p, e] : fam.members[i].factorization.factors) {
            const std::size_t k = divs.size();
            for (std::size_t j = 0; j < k; ++j)
                if (divs[j] * p <= D) divs.push_back(divs[j] * p);
        }
        for (u64 l : divs) acc[l].add(weights[i]);
    }
    for (u64 l = 1; l <= D; ++l) sums_[l] = acc[l].value();
}

double DivisorBuckets::operator()(u64 ell) const {
    if (ell == 0 || ell > D_) throw DomainError("DivisorBuckets: l outside [1, D]");
    return sums_[ell];
}

RemainderLedger remainder_ledger(const CurveConfig& cfg, const DivisorBuckets& buckets,
                                 const std::function<double(u64)>& g, double X_hat) {
    RemainderLedger out;
    out.D = buckets.level();
    std::vector<double> terms;
    for (u64 l = 1; l <= out.D; ++l) {
        if (!is_squarefree(l) || gcd(l, cfg.n0()) != 1) continue;
        const double r = std::fabs(buckets(l) - g(l) * X_hat);
        terms.push_back(r);
        if (r > out.max_abs) {
            out.max_abs = r;
            out.argmax = l;
        }
    }
    out.terms = terms.size();
    out.R = pairwise_sum(terms);
    return out;
}

}  // namespace qtwist
