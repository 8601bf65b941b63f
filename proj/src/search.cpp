#include "qtwist/search.hpp"

#include <cmath>

#include "qtwist/error.hpp"
#include "qtwist/reduce.hpp"

namespace qtwist {

namespace {

u64 abs_d(i64 d) { return static_cast<u64>(d < 0 ? -d : d); }

nlohmann::json opt(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

double theorem_bound_coefficient(int W) {
    if (W < 20) throw DomainError("theorem bound requires W >= 20 (got W = " + std::to_string(W) + ")");
    return 2.0 * std::sqrt((W - 19.73) / (22.0 * W + 12.0));
}

double theorem_bound(double X, int W) {
    if (!(X >= 16.0)) throw DomainError("theorem bound requires X >= 16");
    const double lx = std::log(X);
    return std::exp(theorem_bound_coefficient(W) * std::sqrt(lx / std::log(lx)));
}

nlohmann::json ExtremeReport::to_json() const {
    return {{"kind", "extreme"},
            {"params",
             {{"a", params.a}, {"sign", params.sign}, {"X", params.X}, {"W", params.W}, {"z", params.z},
              {"D", params.D}, {"s", params.s}, {"M", params.M}}},
            {"family_size", family_size},
            {"superset_size", superset_size},
            {"max_d", max_d},
            {"max_value", max_value},
            {"min_d", min_d},
            {"min_value", min_value},
            {"superset_max_d", superset_max_d},
            {"superset_max_value", superset_max_value},
            {"ratio_plus", opt(ratio_plus)},
            {"ratio_minus", opt(ratio_minus)},
            {"theorem_bound", theorem_bound},
            {"theorem_bound_o1", 0.0},
            {"sandwich_ok", sandwich_ok},
            {"superset_ok", superset_ok},
            {"rough_implies_omega", rough_implies_omega}};
}

ExtremeReport extreme_search(const CurveConfig& cfg, const FamilyParams& params, const WeightedFamily& fam,
                             std::span<const double> lvalues, std::span<const double> r_plus,
                             std::span<const double> r_minus) {
    if (lvalues.size() != fam.size() || r_plus.size() != fam.size() || r_minus.size() != fam.size())
        throw DomainError("extreme_search: values must align with the family");
    ExtremeReport rep;
    rep.params = params;
    rep.theorem_bound = params.W >= 20 && params.X >= 16.0 ? theorem_bound(params.X, params.W) : 0.0;

    std::vector<double> num_p, den_p, num_m, den_m;
    bool any = false, any_super = false;
    for (std::size_t i = 0; i < fam.size(); ++i) {
        const auto& t = fam.members[i];
        const double v = std::max(0.0, lvalues[i]);
        const bool in_super = params.W == 0 || t.omega <= params.W;
        if (in_super) {
            ++rep.superset_size;
            if (!any_super || v > rep.superset_max_value) {
                rep.superset_max_value = v;
                rep.superset_max_d = t.d;
            }
            any_super = true;
        }
        if (!is_rough(t, cfg, params.z)) continue;
        if (!in_super) rep.rough_implies_omega = false;
        ++rep.family_size;
        if (!any || v > rep.max_value) {
            rep.max_value = v;
            rep.max_d = t.d;
        }
        if (!any || v < rep.min_value) {
            rep.min_value = v;
            rep.min_d = t.d;
        }
        any = true;
        const double wp = r_plus[i] * r_plus[i] * fam.phi[i];
        const double wm = r_minus[i] * r_minus[i] * fam.phi[i];
        num_p.push_back(v * wp);
        den_p.push_back(wp);
        num_m.push_back(v * wm);
        den_m.push_back(wm);
    }
    if (!any) throw DomainError("extreme_search: no rough member in the family");
    const double dp = pairwise_sum(den_p), dm = pairwise_sum(den_m);
    if (dp > 0.0) rep.ratio_plus = pairwise_sum(num_p) / dp;
    if (dm > 0.0) rep.ratio_minus = pairwise_sum(num_m) / dm;

    // weighted averages carry rounding of a few ulps
    const double slack = 1e-12 * std::max(1.0, rep.max_value);
    if (rep.ratio_plus && *rep.ratio_plus > rep.max_value + slack) rep.sandwich_ok = false;
    if (rep.ratio_minus && *rep.ratio_minus < rep.min_value - slack) rep.sandwich_ok = false;
    if (rep.max_value < rep.min_value) rep.sandwich_ok = false;
    rep.superset_ok = rep.superset_max_value >= rep.max_value;
    return rep;
}

int tamagawa_twist(const CurveConfig& cfg, u64 p, i64 d) {
    if (p < 3 || p % 2 == 0) throw DomainError("tamagawa_twist: p must be an odd prime");
    if (abs_d(d) % p != 0) throw DomainError("tamagawa_twist: p must divide d");
    if (cfg.divides_n0(p)) throw DomainError("tamagawa_twist: p | N0 uses the configured Tamagawa number");
    const auto& m = cfg.model;
    const i64 P = static_cast<i64>(p);
    const i64 c3 = 4 % P, c2 = static_cast<i64>(mod_floor(m.b2(), p)), c1 = static_cast<i64>(mod_floor(2 * m.b4(), p)),
              c0 = static_cast<i64>(mod_floor(m.b6(), p));
    int roots = 0;
    for (i64 x = 0; x < P; ++x) {
        const i64 v = (((c3 * x + c2) % P * x + c1) % P * x + c0) % P;
        if (v == 0) ++roots;
    }
    return 1 + roots;
}

u64 tamagawa_product(const CurveConfig& cfg, const TwistDiscriminant& t) {
    u64 tam = 1;
    for (const auto& [p, e] : t.factorization.factors) tam *= static_cast<u64>(tamagawa_twist(cfg, p, t.d));
    for (const auto& [p, c] : cfg.bad_tamagawa) tam *= static_cast<u64>(c);
    return tam;
}

nlohmann::json ShaReport::to_json() const {
    return {{"kind", "sha"},
            {"d", d},
            {"L_value", L_value},
            {"torsion_sq", torsion_sq},
            {"period_twist", period_twist},
            {"tamagawa", tamagawa},
            {"S_value", S_value},
            {"root_number_minus", root_number_minus}};
}

ShaReport sha_row(const CurveConfig& cfg, const TwistDiscriminant& t, double L_value) {
    if (!(cfg.real_period > 0.0)) throw ConfigError("sha: real_period is missing");
    if (!(cfg.u_tilde > 0.0)) throw ConfigError("sha: u_tilde is missing");
    ShaReport r;
    r.d = t.d;
    const int tors = t.d == 1 ? cfg.torsion_order : cfg.twist_torsion_order.value_or(1);
    r.torsion_sq = tors * tors;
    r.period_twist = cfg.u_tilde * cfg.real_period / std::sqrt(static_cast<double>(abs_d(t.d)));
    r.tamagawa = tamagawa_product(cfg, t);
    r.root_number_minus = t.root_number == -1;
    r.L_value = r.root_number_minus ? 0.0 : std::max(0.0, L_value);
    r.S_value = r.L_value * r.torsion_sq / (r.period_twist * static_cast<double>(r.tamagawa));
    return r;
}

nlohmann::json ShaSummary::to_json() const {
    return {{"kind", "sha_summary"}, {"rows", rows}, {"max_d", max_d}, {"max_S", max_S}, {"comparison", comparison}};
}

ShaSummary sha_summary(std::span<const ShaReport> rows, double X, int W) {
    ShaSummary s;
    s.rows = rows.size();
    for (const auto& r : rows)
        if (r.S_value > s.max_S || s.max_d == 0) {
            s.max_S = r.S_value;
            s.max_d = r.d;
        }
    s.comparison = W >= 20 ? std::sqrt(X) * theorem_bound(X, W) : 0.0;
    return s;
}

}  // namespace qtwist
