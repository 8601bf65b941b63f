#include "qtwist/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <omp.h>

#include "qtwist/error.hpp"
#include "qtwist/reduce.hpp"

namespace qtwist {

namespace {

const double kTwoEGamma = 2.0 * std::exp(std::numbers::egamma);

// 2e^gamma log(v - 1)/v, also used slightly below v = 2 as the analytic
// continuation the integration stencil needs at its left edge.
double f_formula(double v) { return kTwoEGamma * std::log(v - 1.0) / v; }

}  // namespace

double sieve_F_closed(double s) {
    if (s < 1.0 || s > 3.0) throw DomainError("sieve_F_closed: s must lie in [1, 3]");
    return kTwoEGamma / s;
}

double sieve_f_closed(double s) {
    if (s < 1.0 || s > 4.0) throw DomainError("sieve_f_closed: s must lie in [1, 4]");
    return s <= 2.0 ? 0.0 : f_formula(s);
}

double sieve_F_second_closed(double s) {
    if (s < 3.0 || s > 5.0) throw DomainError("sieve_F_second_closed: s must lie in [3, 5]");
    using boost::math::quadrature::gauss_kronrod;
    auto integrand = [](double t) { return std::log(t - 1.0) / t; };
    const double I = s > 3.0 ? gauss_kronrod<double, 61>::integrate(integrand, 2.0, s - 1.0, 15, 1e-14) : 0.0;
    return kTwoEGamma * (1.0 + I) / s;
}

SieveFunctionTable sieve_functions(double smax, double step) {
    if (!(smax >= 4.0) || smax > 10.0) throw DomainError("sieve_functions: smax must lie in [4, 10]");
    if (!(step > 0.0)) throw DomainError("sieve_functions: step must be positive");
    if (step > 1e-3 * (1.0 + 1e-12)) throw NumericalError("sieve_functions: step above 1e-3 is too coarse");
    const double per = std::round(1.0 / step);
    if (std::fabs(per * step - 1.0) > 1e-9) throw DomainError("sieve_functions: 1/step must be an integer");
    const std::size_t n_per = static_cast<std::size_t>(per);
    const std::size_t npts = static_cast<std::size_t>(std::floor((smax - 1.0) * per + 1e-9)) + 1;
    const double h = 1.0 / per;

    SieveFunctionTable t;
    t.h_ = h;
    t.s_.resize(npts);
    t.F_.resize(npts);
    t.f_.resize(npts);
    for (std::size_t i = 0; i < npts; ++i) t.s_[i] = 1.0 + static_cast<double>(i) / per;

    const std::size_t i3 = 2 * n_per;  // s = 3
    const std::size_t i4 = 3 * n_per;  // s = 4
    auto s_at = [&](std::ptrdiff_t i) { return 1.0 + static_cast<double>(i) / per; };

    // Integrands at grid index i (s = s_at(i)): f(s - 1) and F(s - 1).
    auto gF = [&](std::ptrdiff_t i) {
        const double v = s_at(i) - 1.0;
        return v <= 4.0 ? f_formula(v) : t.f_[static_cast<std::size_t>(i) - n_per];
    };
    auto gf = [&](std::ptrdiff_t i) {
        const double v = s_at(i) - 1.0;
        return v <= 3.0 ? kTwoEGamma / v : t.F_[static_cast<std::size_t>(i) - n_per];
    };
    // int over [s_j, s_{j+1}] from the points j-1 .. j+2
    auto panel = [&](auto&& g, std::ptrdiff_t j) {
        return h / 24.0 * (-g(j - 1) + 13.0 * g(j) + 13.0 * g(j + 1) - g(j + 2));
    };

    CompensatedSum IF, If;
    for (std::size_t i = 0; i < npts; ++i) {
        const double s = t.s_[i];
        if (i <= i3) {
            t.F_[i] = kTwoEGamma / s;
        } else {
            IF.add(panel(gF, static_cast<std::ptrdiff_t>(i) - 1));
            t.F_[i] = (kTwoEGamma + IF.value()) / s;
        }
        if (i <= i4) {
            t.f_[i] = i <= n_per ? 0.0 : f_formula(s);
        } else {
            If.add(panel(gf, static_cast<std::ptrdiff_t>(i) - 1));
            t.f_[i] = (kTwoEGamma * std::log(3.0) + If.value()) / s;
        }
    }
    return t;
}

double SieveFunctionTable::interpolate(const std::vector<double>& v, double s) const {
    if (s_.empty()) throw DomainError("sieve table is empty");
    if (s < s_.front() || s > s_.back() + 1e-12) throw DomainError("sieve table: s outside [1, smax]");
    const double x = (s - 1.0) / h_;
    std::ptrdiff_t k = static_cast<std::ptrdiff_t>(std::floor(x)) - 1;
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(s_.size()) - 4);
    double out = 0.0;
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a) w *= (x - static_cast<double>(k + b)) / static_cast<double>(a - b);
        out += w * v[static_cast<std::size_t>(k + a)];
    }
    return out;
}

double SieveFunctionTable::F(double s) const {
    if (s >= 1.0 && s <= 3.0) return sieve_F_closed(s);
    return interpolate(F_, s);
}

double SieveFunctionTable::f(double s) const {
    if (s >= 1.0 && s <= 4.0) return sieve_f_closed(s);
    return interpolate(f_, s);
}

CongruenceOracle weights_oracle(const std::vector<SieveWeight>& weights) {
    return [&weights](u64 ell) {
        CompensatedSum acc;
        for (const auto& w : weights)
            if (w.n % ell == 0) acc.add(w.a);
        return acc.value();
    };
}

SieveRun run_sieve(SieveRun run, const SieveFunctionTable& table, const CongruenceOracle& oracle) {
    if (!(run.z > 1.0) || !(run.D > 1.0)) throw DomainError("run_sieve: z and D must exceed 1");
    if (!run.g || !run.in_prime_set) throw DomainError("run_sieve: g and the prime set are required");
    run.s = std::log(run.D) / std::log(run.z);
    if (run.s < 1.0) throw DomainError("run_sieve: s = log D / log z must be >= 1");

    const PrimeTable primes = sieve_primes(std::max<u64>(2, static_cast<u64>(std::floor(run.z))));
    std::vector<u64> sifting;
    CompensatedSum logV;
    for (u32 p : primes) {
        if (static_cast<double>(p) > run.z || !run.in_prime_set(p)) continue;
        const double gp = run.g(p);
        if (!(gp >= 0.0 && gp < 1.0)) throw DomainError("run_sieve: g(p) must lie in [0, 1)");
        logV.add(std::log1p(-gp));
        if (static_cast<double>(p) < run.z) sifting.push_back(p);
    }
    run.V = std::exp(logV.value());

    // l | P(z) with l <= D, and g(l)
    std::vector<std::pair<u64, double>> ells;
    auto dfs = [&](auto&& self, std::size_t start, u64 l, double gl) -> void {
        ells.emplace_back(l, gl);
        for (std::size_t i = start; i < sifting.size(); ++i) {
            if (static_cast<double>(l) * static_cast<double>(sifting[i]) > run.D) break;
            self(self, i + 1, l * sifting[i], gl * run.g(sifting[i]));
        }
    };
    dfs(dfs, 0, 1, 1.0);
    std::sort(ells.begin(), ells.end());

    std::vector<double> rem(ells.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (i64 i = 0; i < static_cast<i64>(ells.size()); ++i) {
        const auto& [l, gl] = ells[static_cast<std::size_t>(i)];
        rem[static_cast<std::size_t>(i)] = std::fabs(oracle(l) - gl * run.X_hat);
    }
    run.R = pairwise_sum(rem);
    run.remainder_terms = ells.size();

    CompensatedSum S;
    for (const auto& w : run.weights) {
        const bool coprime = std::none_of(sifting.begin(), sifting.end(), [&](u64 p) { return w.n % p == 0; });
        if (coprime) S.add(w.a);
    }
    run.S_empirical = S.value();

    const double main = run.X_hat * run.V;
    const double kappa = run.correction_constant * std::pow(std::log(run.D), -1.0 / 6.0);
    const double Fs = table.F(run.s);
    run.upper = main * Fs + run.R;
    run.upper_corrected = main * (Fs + kappa) + run.R;
    if (run.s >= 2.0) {
        const double fs = table.f(run.s);
        run.lower = main * fs - run.R;
        run.lower_corrected = main * (fs - kappa) - run.R;
    } else {
        run.lower.reset();
        run.lower_corrected.reset();
    }
    return run;
}

DensityCheck density_condition_check(const std::function<double(u64)>& g,
                                     const std::function<bool(u64)>& in_prime_set, double z, double L_const) {
    if (!(z > 2.0)) throw DomainError("density_condition_check: z must exceed 2");
    const PrimeTable primes = sieve_primes(static_cast<u64>(std::ceil(z)));
    std::vector<double> q;
    std::vector<double> prefix{0.0};  // sum of -log(1 - g(p)) over the first k primes
    for (u32 p : primes) {
        if (static_cast<double>(p) >= z || !in_prime_set(p)) continue;
        q.push_back(static_cast<double>(p));
        prefix.push_back(prefix.back() - std::log1p(-g(p)));
    }
    DensityCheck out;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double lw = std::log(q[i]);
        for (std::size_t j = i; j < q.size(); ++j) {
            ++out.pairs;
            const double lhs = std::exp(prefix[j + 1] - prefix[i]);
            const double rhs = std::log(q[j]) / lw * (1.0 + L_const / lw);
            if (lhs > rhs * (1.0 + 1e-12)) {
                out.ok = false;
                out.w = q[i];
                out.z = q[j];
                out.lhs = lhs;
                out.rhs = rhs;
                return out;
            }
        }
    }
    return out;
}

std::vector<SweepRow> sieve_sweep(const SieveFunctionTable& table, double s_lo, double s_hi, int n) {
    if (n < 1 || !(s_hi >= s_lo)) throw DomainError("sieve_sweep: need n >= 1 and s_lo <= s_hi");
    std::vector<SweepRow> out;
    for (int i = 0; i <= n; ++i) {
        const double s = s_lo + (s_hi - s_lo) * i / n;
        out.push_back({s, table.F(s), table.f(s)});
    }
    return out;
}

}  // namespace qtwist
