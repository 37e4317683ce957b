#pragma once

#include <cmath>
#include <string>
#include <thread>

#include "bqf/forms.hpp"

namespace bqf {

struct RepBitmap {
    uint64_t limit = 0;
    Bitset bits;           /* bit n set iff n represented, 1 <= n <= limit */
    std::string source;    /* "form a,b,c" | "genus ..." | "derived ..." */

    uint64_t count() const { return bits.count(); }
};

namespace detail {

/* Marks all f(u,v) <= x for one stripe of v values. The u interval for fixed
   v comes from the root formula for a u^2 + (bv) u + (c v^2 - x) <= 0, then
   the endpoints are corrected by direct evaluation so no value is lost to
   floating-point rounding. Values along a row are updated incrementally:
   f(u+1,v) - f(u,v) = 2au + a + bv. */
inline void sieve_rows(const QuadForm& f, uint64_t x, long long v_lo, long long v_hi,
                       Bitset& bits) {
    long long a = f.a, b = f.b, c = f.c;
    for (long long v = v_lo; v <= v_hi; ++v) {
        long long u_lo, u_hi;
        if (v == 0) {
            /* f(u,0) = a u^2; only u >= 1 by the (u,v) <-> (-u,-v) symmetry */
            u_lo = 1;
            u_hi = (long long)std::sqrt((double)x / (double)a) + 1;
            while (u_hi >= 1 && a * u_hi * u_hi > (long long)x) --u_hi;
            if (u_hi < 1) continue;
        } else {
            double disc = (double)(b * b - 4 * a * c) * (double)v * (double)v +
                          4.0 * (double)a * (double)x;
            if (disc < 0) continue;
            double s = std::sqrt(disc);
            u_lo = (long long)std::floor((-(double)b * v - s) / (2.0 * a)) - 2;
            u_hi = (long long)std::ceil((-(double)b * v + s) / (2.0 * a)) + 2;
            while (u_lo <= u_hi && f.eval(u_lo, v) > (long long)x) ++u_lo;
            while (u_hi >= u_lo && f.eval(u_hi, v) > (long long)x) --u_hi;
            if (u_lo > u_hi) continue;
        }
        long long n = f.eval(u_lo, v);
        long long d = 2 * a * u_lo + a + b * v;
        for (long long u = u_lo; u <= u_hi; ++u) {
            bits.set((uint64_t)n);
            n += d;
            d += 2 * a;
        }
    }
}

} // namespace detail

inline RepBitmap rep_bitmap(const QuadForm& f, uint64_t x, int threads = 1,
                            long long stripe = 2048) {
    if (!f.positive_definite())
        throw std::domain_error("rep_bitmap: form is not positive definite");
    if (x < 1) throw std::invalid_argument("rep_bitmap: limit must be >= 1");
    if (x > kMaxBitLimit)
        throw resource_error("rep_bitmap: limit " + std::to_string(x) +
                             " exceeds memory budget");
    if (threads < 1) threads = 1;
    if (stripe < 1) stripe = 1;

    long long absD = -f.disc();
    long long vmax = (long long)std::sqrt(4.0 * (double)f.a * (double)x / (double)absD) + 1;
    while (vmax >= 1 && absD * vmax * vmax > 4 * f.a * (long long)x) --vmax;

    RepBitmap out;
    out.limit = x;
    out.source = "form " + std::to_string(f.a) + "," + std::to_string(f.b) + "," +
                 std::to_string(f.c);
    long long n_stripes = vmax / stripe + 1;
    if (threads == 1 || n_stripes == 1) {
        out.bits = Bitset(x + 1);
        detail::sieve_rows(f, x, 0, vmax, out.bits);
        return out;
    }
    std::vector<Bitset> partial((size_t)threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            partial[(size_t)t] = Bitset(x + 1);
            for (long long k = t; k < n_stripes; k += threads) {
                long long lo = k * stripe;
                long long hi = std::min(vmax, lo + stripe - 1);
                detail::sieve_rows(f, x, lo, hi, partial[(size_t)t]);
            }
        });
    }
    for (auto& th : pool) th.join();
    out.bits = std::move(partial[0]);
    for (int t = 1; t < threads; ++t) out.bits.or_with(partial[(size_t)t]);
    return out;
}

inline RepBitmap genus_bitmap(const std::vector<QuadForm>& forms, uint64_t x,
                              int threads = 1) {
    if (forms.empty()) throw std::domain_error("genus_bitmap: no forms given");
    long long D = forms[0].disc();
    for (auto& f : forms)
        if (f.disc() != D) throw std::domain_error("genus_bitmap: mixed discriminants");
    ClassGroup cg = class_group(D);
    GenusStructure gs = genus_structure(cg);
    int g0 = gs.genus_of_class[(size_t)cg.class_index(forms[0])];
    for (auto& f : forms)
        if (gs.genus_of_class[(size_t)cg.class_index(f)] != g0)
            throw std::domain_error("genus_bitmap: forms span more than one genus");
    RepBitmap out = rep_bitmap(forms[0], x, threads);
    for (size_t i = 1; i < forms.size(); ++i)
        out.bits.or_with(rep_bitmap(forms[i], x, threads).bits);
    out.source = "genus of " + out.source.substr(5);
    return out;
}

inline RepBitmap apply_masks(const RepBitmap& bm, bool squarefree, long long coprime_to,
                             const ArithTables& tables) {
    RepBitmap out = bm;
    if (squarefree) {
        if (tables.limit < bm.limit)
            throw std::invalid_argument("apply_masks: squarefree table smaller than bitmap");
        out.bits.and_with(tables.squarefree_mask);
    }
    if (coprime_to != 0) {
        long long m = std::abs(coprime_to);
        for (long long d = 2; m > 1; ++d) {
            if (d * d > m) d = m; /* remaining cofactor is prime */
            if (m % d != 0) continue;
            while (m % d == 0) m /= d;
            for (uint64_t n = (uint64_t)d; n <= bm.limit; n += (uint64_t)d)
                out.bits.reset(n);
        }
    }
    out.source = "derived " + bm.source;
    return out;
}

inline RepBitmap exceptional_bitmap(const RepBitmap& genus_bm, const RepBitmap& form_bm) {
    if (genus_bm.limit != form_bm.limit)
        throw std::domain_error("exceptional_bitmap: limit mismatch");
    RepBitmap out;
    out.limit = genus_bm.limit;
    out.bits = genus_bm.bits;
    out.bits.and_not(form_bm.bits);
    out.source = "derived exceptional";
    return out;
}

struct ResidueCounts {
    uint64_t q = 0;
    uint64_t limit = 0;
    std::vector<uint64_t> counts; /* index a -> #{n <= limit set, n == a mod q} */

    uint64_t total() const {
        uint64_t s = 0;
        for (uint64_t c : counts) s += c;
        return s;
    }
};

inline ResidueCounts count_residues(const RepBitmap& bm, uint64_t q) {
    if (q < 1) throw std::invalid_argument("count_residues: modulus must be >= 1");
    ResidueCounts rc;
    rc.q = q;
    rc.limit = bm.limit;
    rc.counts.assign(q, 0);
    bm.bits.for_each([&](uint64_t n) { ++rc.counts[n % q]; });
    return rc;
}

} // namespace bqf
