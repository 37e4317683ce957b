#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>

#include "bqf/arith.hpp"

namespace bqf {

struct QuadForm {
    long long a = 0, b = 0, c = 0; /* a x^2 + b xy + c y^2 */

    long long disc() const { return b * b - 4 * a * c; }
    long long eval(long long x, long long y) const {
        return a * x * x + b * x * y + c * y * y;
    }
    bool positive_definite() const { return a > 0 && disc() < 0; }
    bool is_reduced() const {
        if (!positive_definite()) return false;
        long long ab = b < 0 ? -b : b;
        if (!(ab <= a && a <= c)) return false;
        if ((ab == a || a == c) && b < 0) return false;
        return true;
    }
    bool operator==(const QuadForm& o) const { return a == o.a && b == o.b && c == o.c; }
    bool operator<(const QuadForm& o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        return c < o.c;
    }
};

/* Gauss reduction. */
inline QuadForm reduce(QuadForm f) {
    if (!f.positive_definite())
        throw std::domain_error("reduce: form is not positive definite");
    long long D = f.disc();
    long long a = f.a, b = f.b;
    for (;;) {
        /* normalize b into (-a, a] and recompute c from the discriminant */
        long long twoa = 2 * a;
        long long r = b % twoa;
        if (r <= -a) r += twoa;
        else if (r > a) r -= twoa;
        b = r;
        long long c = (b * b - D) / (4 * a);
        if (a > c) {
            long long na = c;
            b = -b;
            a = na;
            continue;
        }
        if (a == c && b < 0) b = -b;
        return QuadForm{a, b, c};
    }
}

inline bool is_fundamental(long long D) {
    if (D == 1) return true; /* unit discriminant, used for genus factorizations */
    long long r = ((D % 4) + 4) % 4;
    if (r == 1) return is_squarefree_small(D);
    if (r == 0) {
        long long m = D / 4;
        long long rm = ((m % 4) + 4) % 4;
        return (rm == 2 || rm == 3) && is_squarefree_small(m);
    }
    return false;
}

namespace detail {

inline long long mod_inverse(long long a, long long m) {
    long long g = m, x = 0, x1 = 1, a1 = ((a % m) + m) % m;
    while (a1 != 0) {
        long long q = g / a1;
        long long t = g - q * a1; g = a1; a1 = t;
        t = x - q * x1; x = x1; x1 = t;
    }
    if (g != 1) throw std::logic_error("mod_inverse: arguments not coprime");
    return ((x % m) + m) % m;
}

/* Dirichlet composition of two forms of equal discriminant: replace f2 by an
   equivalent form whose leading coefficient is coprime to f1's, then solve the
   congruences for a concordant middle coefficient. */
inline QuadForm compose_forms(const QuadForm& f1, const QuadForm& f2) {
    long long D = f1.disc();
    long long a1 = f1.a, b1 = f1.b;
    /* find primitively represented a2 = f2(x,y) with gcd(a1, a2) = 1 */
    long long a2 = 0, b2 = 0;
    for (long long s = 0; s <= 30 && a2 == 0; ++s) {
        for (long long y = -s; y <= s && a2 == 0; ++y) {
            for (long long x = -s; x <= s; ++x) {
                if (std::max(std::abs(x), std::abs(y)) != s) continue;
                if (std::gcd(x, y) != 1) continue;
                long long v = f2.eval(x, y);
                if (v <= 0 || std::gcd(v, a1) != 1) continue;
                /* complete (x,y) to a unimodular matrix to get the middle
                   coefficient of the transported form */
                long long g = std::gcd(std::abs(x), std::abs(y));
                (void)g;
                long long u, w; /* x*w - y*u = 1 */
                {
                    long long old_r = x, r = y, old_s = 1, ss = 0, old_t = 0, tt = 1;
                    while (r != 0) {
                        long long q = old_r / r;
                        long long t1 = old_r - q * r; old_r = r; r = t1;
                        t1 = old_s - q * ss; old_s = ss; ss = t1;
                        t1 = old_t - q * tt; old_t = tt; tt = t1;
                    }
                    /* old_r = gcd = x*old_s + y*old_t (= +-1) */
                    if (old_r < 0) { old_r = -old_r; old_s = -old_s; old_t = -old_t; }
                    /* want det [x u; y w] = x*w - y*u = 1 */
                    w = old_s;
                    u = -old_t;
                }
                long long bb = 2 * (f2.a * x * u + f2.c * y * w) + f2.b * (x * w + y * u);
                a2 = v;
                b2 = bb;
                break;
            }
        }
    }
    if (a2 == 0) throw std::logic_error("compose_forms: no concordant representative found");
    /* B == b1 mod 2a1, B == b2 mod 2a2 */
    long long t = ((b2 - b1) / 2) % a2;
    long long inv = mod_inverse(a1 % a2, a2);
    long long k = ((t * inv) % a2 + a2) % a2;
    long long B = b1 + 2 * a1 * k;
    long long A = a1 * a2;
    long long C = (B * B - D) / (4 * A);
    return reduce(QuadForm{A, B, C});
}

} // namespace detail

struct ClassGroup {
    long long D = 0;
    std::vector<QuadForm> reps;        /* reduced, reps[0] = principal */
    std::vector<std::vector<int>> compose_table;
    std::vector<int> orders;
    std::vector<int> inverse;          /* index of the inverse class */
    int generator = -1;                /* index of a generator when cyclic */
    bool cyclic = false;
    int h = 0;

    int class_index(const QuadForm& f) const {
        QuadForm r = reduce(f);
        for (size_t i = 0; i < reps.size(); ++i)
            if (reps[i] == r) return int(i);
        throw std::domain_error("class_index: form has a different discriminant");
    }
    int compose(int i, int j) const { return compose_table[i][j]; }
    int power(int i, long long e) const {
        int acc = 0; /* principal */
        long long n = e % h;
        if (n < 0) n += h;
        for (long long k = 0; k < n; ++k) acc = compose_table[acc][i];
        return acc;
    }
};

inline ClassGroup class_group(long long D) {
    if (D >= 0 || !is_fundamental(D))
        throw std::domain_error("class_group: D must be a negative fundamental discriminant");
    ClassGroup cg;
    cg.D = D;
    /* enumerate reduced forms: |b| <= a <= c, b == D mod 2 */
    long long amax = (long long)std::sqrt((double)(-D) / 3.0) + 1;
    for (long long a = 1; a <= amax; ++a) {
        for (long long b = -a; b <= a; ++b) {
            if (((b - D) & 1) != 0) continue;
            long long num = b * b - D;
            if (num % (4 * a) != 0) continue;
            long long c = num / (4 * a);
            QuadForm f{a, b, c};
            if (f.is_reduced()) cg.reps.push_back(f);
        }
    }
    std::sort(cg.reps.begin(), cg.reps.end());
    /* principal form first */
    QuadForm principal = (((D % 2) + 2) % 2 == 0) ? QuadForm{1, 0, -D / 4}
                                                  : QuadForm{1, 1, (1 - D) / 4};
    auto it = std::find(cg.reps.begin(), cg.reps.end(), principal);
    if (it == cg.reps.end()) throw std::logic_error("class_group: principal form missing");
    std::rotate(cg.reps.begin(), it, it + 1);

    cg.h = int(cg.reps.size());
    cg.compose_table.assign(cg.h, std::vector<int>(cg.h, 0));
    for (int i = 0; i < cg.h; ++i)
        for (int j = i; j < cg.h; ++j) {
            QuadForm r = detail::compose_forms(cg.reps[i], cg.reps[j]);
            int k = cg.class_index(r);
            cg.compose_table[i][j] = k;
            cg.compose_table[j][i] = k;
        }
    cg.orders.assign(cg.h, 0);
    cg.inverse.assign(cg.h, 0);
    for (int i = 0; i < cg.h; ++i) {
        int acc = i, ord = 1;
        while (acc != 0) { acc = cg.compose_table[acc][i]; ++ord; }
        cg.orders[i] = ord;
        cg.inverse[i] = cg.class_index(QuadForm{cg.reps[i].a, -cg.reps[i].b, cg.reps[i].c});
    }
    for (int i = 0; i < cg.h; ++i)
        if (cg.orders[i] == cg.h) { cg.generator = i; break; }
    cg.cyclic = (cg.h == 1) || (cg.generator >= 0);
    if (cg.h == 1) cg.generator = 0;
    return cg;
}

struct GenusStructure {
    std::vector<std::pair<long long, long long>> factorizations; /* (u, v), u > 0 */
    int mu = 0;
    std::vector<int> genus_of_class;
    std::vector<std::vector<int>> character_table; /* per class, +-1 per factorization */
    int genus_count = 0;
};

namespace detail {

/* smallest integer coprime to 2D represented by f, scanning |x|,|y| <= 20 */
inline long long smallest_coprime_value(const QuadForm& f, long long D) {
    long long twoD = 2 * std::abs(D);
    long long best = 0;
    for (long long x = -20; x <= 20; ++x)
        for (long long y = -20; y <= 20; ++y) {
            if (x == 0 && y == 0) continue;
            long long v = f.eval(x, y);
            if (v >= 1 && std::gcd(v, twoD) == 1 && (best == 0 || v < best)) best = v;
        }
    if (best == 0) throw std::logic_error("no represented value coprime to 2D in scan range");
    return best;
}

} // namespace detail

inline GenusStructure genus_structure(const ClassGroup& cg) {
    GenusStructure gs;
    long long D = cg.D;
    long long absD = -D;
    /* mu from the discriminant shape */
    int s = 0;
    {
        long long m = absD;
        while (m % 2 == 0) m /= 2;
        for (long long p = 3; p * p <= m; p += 2)
            if (m % p == 0) { ++s; while (m % p == 0) m /= p; }
        if (m > 1) ++s;
    }
    long long rmod4 = ((D % 4) + 4) % 4;
    if (rmod4 == 1) {
        gs.mu = s;
    } else {
        long long n = D / 4;
        long long nm4 = ((n % 4) + 4) % 4;
        long long nm8 = ((n % 8) + 8) % 8;
        if (nm4 == 1) gs.mu = s;
        else if (nm4 == 2 || nm4 == 3) gs.mu = s + 1;
        else if (nm8 == 4) gs.mu = s + 1;
        else gs.mu = s + 2;
    }
    /* factorizations D = u*v into fundamental discriminants, u > 0 */
    for (long long u = 1; u <= absD; ++u) {
        if (absD % u != 0) continue;
        long long v = D / u;
        if (!is_fundamental(u)) continue;
        long long vr = ((v % 4) + 4) % 4;
        if (vr != 0 && vr != 1) continue;
        if (v != 1 && !is_fundamental(v)) continue;
        gs.factorizations.emplace_back(u, v);
    }
    if (gs.factorizations.size() != (size_t(1) << (gs.mu - 1)))
        throw std::logic_error("genus_structure: factorization count disagrees with mu");

    gs.character_table.resize(cg.h);
    std::map<std::vector<int>, int> genus_id;
    gs.genus_of_class.resize(cg.h);
    for (int i = 0; i < cg.h; ++i) {
        long long m = detail::smallest_coprime_value(cg.reps[i], D);
        std::vector<int> chars;
        chars.reserve(gs.factorizations.size());
        for (auto& [u, v] : gs.factorizations) chars.push_back(kronecker(u, m));
        gs.character_table[i] = chars;
        auto [it, inserted] = genus_id.emplace(chars, int(genus_id.size()));
        gs.genus_of_class[i] = it->second;
    }
    gs.genus_count = int(genus_id.size());
    return gs;
}

struct TupleFamily {
    long long D = 0;
    int p0 = 0;
    int r = 0;
    std::vector<int> H;                 /* class indices of the subgroup, sorted */
    std::vector<int> coset_of_class;    /* exponent mod p0 in C(D)/H */
    std::vector<std::vector<int>> tuples; /* canonical diagonal residues, length r */
    bool f_in_H = false;
};

inline TupleFamily exceptional_tuples(const ClassGroup& cg, const QuadForm& f) {
    if (cg.h == 1 || cg.h % 2 == 0)
        throw std::domain_error("exceptional_tuples: requires odd class number h > 1");
    if (!cg.cyclic)
        throw std::domain_error("exceptional_tuples: requires a cyclic class group");
    TupleFamily tf;
    tf.D = cg.D;
    int p0 = 0;
    for (int p = 2; p <= cg.h; ++p)
        if (cg.h % p == 0) { bool pr = true; for (int d = 2; d * d <= p; ++d) if (p % d == 0) pr = false; if (pr) { p0 = p; break; } }
    tf.p0 = p0;
    /* H = <g^p0>; discrete logs by enumeration */
    std::vector<int> dlog(cg.h, -1);
    {
        int acc = 0;
        for (int e = 0; e < cg.h; ++e) {
            dlog[acc] = e;
            acc = cg.compose_table[acc][cg.generator];
        }
    }
    tf.coset_of_class.resize(cg.h);
    for (int i = 0; i < cg.h; ++i) {
        tf.coset_of_class[i] = dlog[i] % p0;
        if (dlog[i] % p0 == 0) tf.H.push_back(i);
    }
    int fi = cg.class_index(f);
    int estar = tf.coset_of_class[fi];
    tf.f_in_H = (estar == 0);
    tf.r = tf.f_in_H ? p0 - 2 : p0 - 3;
    /* diagonal tuples (a,...,a), a in (Z/p0)^*, excluding a = e* when [f] is
       outside H; a and p0-a describe inverse tuples and are identified */
    std::vector<int> seen(p0, 0);
    for (int a = 1; a < p0; ++a) {
        if (!tf.f_in_H && a == estar) continue;
        int canon = std::min(a, p0 - a);
        if (seen[canon]) continue;
        seen[canon] = 1;
        tf.tuples.push_back(std::vector<int>(size_t(tf.r), canon));
    }
    if (tf.r == 0) tf.tuples.assign(1, {});
    return tf;
}

} // namespace bqf
