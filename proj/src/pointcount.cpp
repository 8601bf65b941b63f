#include "qtwist/pointcount.hpp"

#include <algorithm>
#include <numeric>

#include <omp.h>

#include "qtwist/error.hpp"

namespace qtwist {

namespace {

u64 reduce(__int128 v, u64 p) {
    __int128 r = v % static_cast<__int128>(p);
    if (r < 0) r += p;
    return static_cast<u64>(r);
}

// Quadratic-residue bitmap for an odd prime; squares accumulated by the
// difference (i+1)^2 - i^2 = 2i + 1.
std::vector<unsigned char> residue_table(u64 p) {
    std::vector<unsigned char> qr(p, 0);
    u64 sq = 0;
    for (u64 i = 1; i <= p / 2; ++i) {
        sq += 2 * i - 1;
        if (sq >= p) sq -= p;
        qr[sq] = 1;
    }
    return qr;
}

// Extended Euclid in 32-bit words (p < 2^32), where division is cheapest.
u64 inv_mod(u64 a, u64 p) {
    std::int64_t t = 0, nt = 1;
    std::uint32_t r = static_cast<std::uint32_t>(p), nr = static_cast<std::uint32_t>(a);
    while (nr != 0) {
        const std::uint32_t q = r / nr;
        const std::int64_t tmp_t = t - static_cast<std::int64_t>(q) * nt;
        t = nt;
        nt = tmp_t;
        const std::uint32_t tmp_r = r - q * nr;
        r = nr;
        nr = tmp_r;
    }
    return static_cast<u64>(t < 0 ? t + static_cast<std::int64_t>(p) : t);
}

u64 sqrt_mod(u64 a, u64 p) {
    if (a == 0) return 0;
    if ((p & 3) == 3) return powmod(a, (p + 1) / 4, p);
    // Tonelli-Shanks
    u64 q = p - 1;
    int s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    u64 z = 2;
    while (jacobi(static_cast<i64>(z), p) != -1) ++z;
    u64 m = static_cast<u64>(s);
    u64 c = powmod(z, q, p);
    u64 t = powmod(a, q, p);
    u64 r = powmod(a, (q + 1) / 2, p);
    while (t != 1) {
        u64 i = 0;
        u64 tt = t;
        while (tt != 1) {
            tt = mulmod(tt, tt, p);
            ++i;
        }
        u64 b = c;
        for (u64 j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    return r;
}

struct Point {
    u64 x = 0;
    u64 y = 0;
    bool inf = true;
};

// Arithmetic in F_p, p < 2^32, with Barrett reduction of 64-bit products.
class Field {
public:
    explicit Field(u64 p) : p_(p), m_(~u64{0} / p) {}

    u64 p() const noexcept { return p_; }
    u64 reduce(u64 x) const noexcept {
        const u64 q = static_cast<u64>((static_cast<unsigned __int128>(x) * m_) >> 64);
        u64 r = x - q * p_;
        return r >= p_ ? r - p_ : r;
    }
    u64 mul(u64 a, u64 b) const noexcept { return reduce(a * b); }
    u64 add(u64 a, u64 b) const noexcept {
        const u64 r = a + b;
        return r >= p_ ? r - p_ : r;
    }
    u64 sub(u64 a, u64 b) const noexcept { return a >= b ? a - b : a + p_ - b; }

private:
    u64 p_, m_;
};

// Affine arithmetic on y^2 = x^3 + a x + b over F_p with p < 2^32.
class ShortCurve {
public:
    ShortCurve(u64 a, u64 b, u64 p) : F_(p), a_(a), b_(b) {}

    const Field& field() const noexcept { return F_; }
    u64 p() const noexcept { return F_.p(); }

    u64 rhs(u64 x) const noexcept { return F_.add(F_.mul(F_.add(F_.mul(x, x), a_), x), b_); }

    Point add(const Point& P, const Point& Q) const {
        if (P.inf) return Q;
        if (Q.inf) return P;
        u64 lambda;
        if (P.x == Q.x) {
            if (F_.add(P.y, Q.y) == 0) return Point{};
            const u64 num = F_.add(F_.mul(3, F_.mul(P.x, P.x)), a_);
            lambda = F_.mul(num, inv_mod(F_.add(P.y, P.y), F_.p()));
        } else {
            lambda = F_.mul(F_.sub(Q.y, P.y), inv_mod(F_.sub(Q.x, P.x), F_.p()));
        }
        return chord(P, Q, lambda);
    }

    // Third point of the line through P and Q with slope lambda, negated.
    Point chord(const Point& P, const Point& Q, u64 lambda) const noexcept {
        const u64 x3 = F_.sub(F_.sub(F_.mul(lambda, lambda), P.x), Q.x);
        const u64 y3 = F_.sub(F_.mul(lambda, F_.sub(P.x, x3)), P.y);
        return Point{x3, y3, false};
    }

    // k P by double-and-add in Jacobian coordinates (x = X/Z^2, y = Y/Z^3),
    // one inversion at the end.
    Point mul(u64 k, const Point& P) const {
        if (P.inf || k == 0) return Point{};
        u64 X = 0, Y = 1, Z = 0;  // Z = 0 is the point at infinity
        for (int bit = 63 - __builtin_clzll(k); bit >= 0; --bit) {
            if (Z != 0) jacobian_double(X, Y, Z);
            if ((k >> bit) & 1) jacobian_add_affine(X, Y, Z, P);
        }
        if (Z == 0) return Point{};
        const u64 zi = inv_mod(Z, F_.p());
        const u64 zi2 = F_.mul(zi, zi);
        return Point{F_.mul(X, zi2), F_.mul(Y, F_.mul(zi2, zi)), false};
    }

private:
    void jacobian_double(u64& X, u64& Y, u64& Z) const noexcept {
        if (Y == 0) {
            Z = 0;
            return;
        }
        const u64 YY = F_.mul(Y, Y);
        const u64 ZZ = F_.mul(Z, Z);
        const u64 S = F_.mul(4, F_.mul(X, YY));
        const u64 M = F_.add(F_.mul(3, F_.mul(X, X)), F_.mul(a_, F_.mul(ZZ, ZZ)));
        const u64 X3 = F_.sub(F_.mul(M, M), F_.add(S, S));
        const u64 Y3 = F_.sub(F_.mul(M, F_.sub(S, X3)), F_.mul(8, F_.mul(YY, YY)));
        Z = F_.mul(F_.add(Y, Y), Z);
        X = X3;
        Y = Y3;
    }

    void jacobian_add_affine(u64& X, u64& Y, u64& Z, const Point& Q) const noexcept {
        if (Z == 0) {
            X = Q.x;
            Y = Q.y;
            Z = 1;
            return;
        }
        const u64 ZZ = F_.mul(Z, Z);
        const u64 H = F_.sub(F_.mul(Q.x, ZZ), X);
        const u64 r = F_.sub(F_.mul(Q.y, F_.mul(ZZ, Z)), Y);
        if (H == 0) {
            if (r == 0)
                jacobian_double(X, Y, Z);
            else
                Z = 0;
            return;
        }
        const u64 HH = F_.mul(H, H);
        const u64 HHH = F_.mul(HH, H);
        const u64 V = F_.mul(X, HH);
        const u64 X3 = F_.sub(F_.sub(F_.mul(r, r), HHH), F_.add(V, V));
        Y = F_.sub(F_.mul(r, F_.sub(V, X3)), F_.mul(Y, HHH));
        Z = F_.mul(Z, H);
        X = X3;
    }

    Field F_;
    u64 a_, b_;
};

u64 splitmix(u64& state) {
    u64 z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Point random_point(const ShortCurve& E, u64& state) {
    const u64 p = E.p();
    for (;;) {
        const u64 x = splitmix(state) % p;
        const u64 r = E.rhs(x);
        if (r == 0) continue;  // 2-torsion carries almost no information
        if (jacobi(static_cast<i64>(r), p) != 1) continue;
        return Point{x, sqrt_mod(r, p), false};
    }
}

// xs[i] += ys[i] for i < n with one shared inversion (Montgomery's trick).
// Pairs with a point at infinity or equal x fall back to E.add.
void batch_add(const ShortCurve& E, std::vector<Point>& xs, std::size_t offset, const std::vector<Point>& ys,
               std::size_t n, std::vector<u64>& scratch) {
    const Field& F = E.field();
    scratch.assign(n, 0);
    u64 acc = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& P = xs[offset + i];
        const Point& Q = ys[i];
        if (P.inf || Q.inf || P.x == Q.x) continue;
        scratch[i] = acc;
        acc = F.mul(acc, F.sub(Q.x, P.x));
    }
    u64 inv = inv_mod(acc, F.p());
    for (std::size_t i = n; i-- > 0;) {
        Point& P = xs[offset + i];
        const Point& Q = ys[i];
        if (P.inf || Q.inf || P.x == Q.x) {
            P = E.add(P, Q);
            continue;
        }
        const u64 den = F.sub(Q.x, P.x);
        const u64 den_inv = F.mul(inv, scratch[i]);
        inv = F.mul(inv, den);
        P = E.chord(P, Q, F.mul(F.sub(Q.y, P.y), den_inv));
    }
}

// start + i step for 0 <= i < n, built in doubling layers so each layer
// costs one inversion.
std::vector<Point> progression(const ShortCurve& E, const Point& start, const Point& step, std::size_t n) {
    std::vector<Point> out;
    out.reserve(n);
    out.push_back(start);
    std::vector<Point> stride;
    std::vector<u64> scratch;
    Point kstep = step;  // k step with k = out.size()
    while (out.size() < n) {
        const std::size_t k = out.size();
        const std::size_t add = std::min(k, n - k);
        out.insert(out.end(), out.begin(), out.begin() + static_cast<std::ptrdiff_t>(add));
        stride.assign(add, kstep);
        batch_add(E, out, k, stride, add, scratch);
        kstep = E.add(kstep, kstep);
    }
    return out;
}

struct IntervalMultiples {
    u64 first = 0;        // smallest N in the interval with N P = O, 0 if none
    bool unique = false;  // no other such N exists in the interval
};

// Multiples of ord(P) in [lo, lo + width] by baby-step giant-step with baby
// steps +-jP (1 <= j <= m) around giant centers lo + m + i (2m + 1). The scan
// is exhaustive when ord(P) > 2m, which shows up as distinct baby x values
// with no 2-torsion among them; otherwise only first is reported.
IntervalMultiples multiples_in_interval(const ShortCurve& E, const Point& P, u64 lo, u64 width) {
    const u64 m = isqrt(width / 2) + 1;
    const u64 top = lo + width;
    const std::vector<Point> multiples = progression(E, P, P, m);
    for (u64 j = 1; j <= m; ++j) {
        if (multiples[j - 1].inf) {
            // ord(P) = j <= m: any multiple of j in the interval works.
            const u64 N = (lo + j - 1) / j * j;
            return {N <= top ? N : 0, false};
        }
    }
    struct Baby {
        u64 x, y, j;
    };
    std::vector<Baby> baby;
    baby.reserve(m);
    bool exhaustive = true;
    for (u64 j = 1; j <= m; ++j) {
        baby.push_back({multiples[j - 1].x, multiples[j - 1].y, j});
        if (multiples[j - 1].y == 0) exhaustive = false;
    }
    std::sort(baby.begin(), baby.end(), [](const Baby& l, const Baby& r) { return l.x < r.x; });
    for (std::size_t i = 1; i < baby.size(); ++i)
        if (baby[i].x == baby[i - 1].x) exhaustive = false;

    const u64 first = lo + m;
    const u64 stride = 2 * m + 1;
    const std::size_t giants = static_cast<std::size_t>((top + m - first) / stride + 1);
    const std::vector<Point> centers = progression(E, E.mul(first, P), E.mul(stride, P), giants);
    IntervalMultiples out;
    int found = 0;
    for (std::size_t i = 0; i < giants && found < 2; ++i) {
        const u64 c = first + i * stride;
        const Point& R = centers[i];
        u64 N = 0;
        if (R.inf) {
            N = c;
        } else {
            auto it =
                std::lower_bound(baby.begin(), baby.end(), R.x, [](const Baby& b, u64 x) { return b.x < x; });
            if (it == baby.end() || it->x != R.x) continue;
            // c P = jP gives N = c - j, c P = -jP gives N = c + j.
            N = it->y == R.y ? c - it->j : c + it->j;
        }
        if (N < lo || N > top) continue;
        if (found == 0 || N < out.first) out.first = N;
        ++found;
    }
    out.unique = exhaustive && found == 1;
    return out;
}

// Factorization of a group order N < 2^33 by the primes below 2^17.
Factorization factor_order(u64 N) {
    static const PrimeTable small = sieve_primes_serial(u64{1} << 17);
    Factorization f;
    f.n = N;
    for (u32 q : small) {
        if (u64{q} * q > N) break;
        if (N % q) continue;
        int e = 0;
        while (N % q == 0) {
            N /= q;
            ++e;
        }
        f.factors.emplace_back(q, e);
    }
    if (N > 1) f.factors.emplace_back(N, 1);
    return f;
}

u64 exact_order(const ShortCurve& E, const Point& P, u64 N) {
    const Factorization f = factor_order(N);
    u64 order = N;
    for (const auto& [q, e] : f.factors) {
        for (int i = 0; i < e; ++i) {
            if (order % q != 0) break;
            if (!E.mul(order / q, P).inf) break;
            order /= q;
        }
    }
    return order;
}

u64 lcm_capped(u64 a, u64 b) {
    const u64 g = gcd(a, b);
    const unsigned __int128 l = static_cast<unsigned __int128>(a / g) * b;
    return l > (u64{1} << 62) ? (u64{1} << 62) : static_cast<u64>(l);
}

}  // namespace

i64 trace_bruteforce(const WeierstrassModel& model, u64 p) {
    if (p < 2) throw DomainError("trace_bruteforce: p must be prime");
    const auto& a = model.a;
    if (p == 2) {
        u64 count = 1;
        for (i64 x = 0; x < 2; ++x)
            for (i64 y = 0; y < 2; ++y) {
                const __int128 lhs = y * y + a[0] * x * y + a[2] * y;
                const __int128 rhs = x * x * x + a[1] * x * x + a[3] * x + a[4];
                if (reduce(lhs - rhs, 2) == 0) ++count;
            }
        return static_cast<i64>(p + 1) - static_cast<i64>(count);
    }
    // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    const u64 c2 = reduce(model.b2(), p);
    const u64 c1 = reduce(2 * static_cast<__int128>(model.b4()), p);
    const u64 c0 = reduce(model.b6(), p);
    const auto qr = residue_table(p);
    u64 count = 1;
    for (u64 x = 0; x < p; ++x) {
        const u64 v = (((4 * x % p + c2) % p * x % p + c1) % p * x % p + c0) % p;
        count += v == 0 ? 1 : (qr[v] ? 2 : 0);
    }
    return static_cast<i64>(p + 1) - static_cast<i64>(count);
}

i64 trace_bsgs(const WeierstrassModel& model, u64 p) {
    if (p < 5) throw DomainError("trace_bsgs: p must be >= 5");
    if (p >= (u64{1} << 32)) throw ResourceError("trace_bsgs: p must be below 2^32");
    const u64 A = reduce(-27 * model.c4(), p);
    const u64 B = reduce(-54 * model.c6(), p);
    if ((4 * static_cast<__int128>(A) * A % p * A + 27 * static_cast<__int128>(B) * B) % p == 0)
        throw DomainError("trace_bsgs: bad reduction at p = " + std::to_string(p));

    u64 g = 2;
    while (jacobi(static_cast<i64>(g), p) != -1) ++g;
    const ShortCurve E(A, B, p);
    const ShortCurve T(A * (g * g % p) % p, B * (g * g % p * g % p) % p, p);

    // Hasse interval [p + 1 - floor(2 sqrt p), p + 1 + floor(2 sqrt p)]
    const u64 lo = p + 1 - isqrt(4 * p);
    const u64 hi = p + 1 + isqrt(4 * p);
    const u64 width = hi - lo;

    u64 state = p * 0x2545f4914f6cdd1dULL;
    u64 lE = 1, lT = 1;
    for (int attempt = 0; attempt < 24; ++attempt) {
        const bool twist = attempt & 1;
        const ShortCurve& C = twist ? T : E;
        const Point P = random_point(C, state);
        const IntervalMultiples hits = multiples_in_interval(C, P, lo, width);
        if (hits.first == 0) continue;
        if (hits.unique) {
            // hits.first is #C(F_p); the twist has #E = 2p + 2 - #T.
            return twist ? static_cast<i64>(hits.first) - static_cast<i64>(p + 1)
                         : static_cast<i64>(p + 1) - static_cast<i64>(hits.first);
        }
        const u64 ord = exact_order(C, P, hits.first);
        if (twist)
            lT = lcm_capped(lT, ord);
        else
            lE = lcm_capped(lE, ord);

        u64 found = 0;
        int candidates = 0;
        for (u64 n = (lo + lE - 1) / lE * lE; n <= hi; n += lE) {
            if ((2 * p + 2 - n) % lT != 0) continue;
            found = n;
            if (++candidates > 1) break;
        }
        if (candidates == 1) return static_cast<i64>(p + 1) - static_cast<i64>(found);
    }
    return trace_bruteforce(model, p);
}

i64 trace_of_frobenius(const WeierstrassModel& model, u64 conductor, u64 p) {
    if (p < 1000 || conductor % p == 0) return trace_bruteforce(model, p);
    return trace_bsgs(model, p);
}

std::vector<std::int32_t> traces_parallel(const WeierstrassModel& model, u64 conductor, std::span<const u32> primes) {
    std::vector<std::int32_t> out(primes.size());
#pragma omp parallel for schedule(dynamic, 256)
    for (i64 i = 0; i < static_cast<i64>(primes.size()); ++i)
        out[static_cast<std::size_t>(i)] =
            static_cast<std::int32_t>(trace_of_frobenius(model, conductor, primes[static_cast<std::size_t>(i)]));
    return out;
}

std::vector<std::int32_t> traces_serial(const WeierstrassModel& model, std::span<const u32> primes) {
    std::vector<std::int32_t> out;
    out.reserve(primes.size());
    for (u32 p : primes) out.push_back(static_cast<std::int32_t>(trace_bruteforce(model, p)));
    return out;
}

}  // namespace qtwist
