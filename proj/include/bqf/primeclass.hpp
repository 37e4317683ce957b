#pragma once

#include <fstream>
#include <sstream>

#include "bqf/repsieve.hpp"

namespace bqf {

struct PrimeClassTable {
    long long D = 0;
    uint64_t limit = 0;
    int h = 0;
    /* parallel arrays over the split and ramified primes <= limit, ascending;
       inert primes are absent (empty class set) */
    std::vector<uint64_t> primes;
    std::vector<uint16_t> masks; /* bit i set iff class i represents the prime */

    /* class-index set of p as a bitmask; 0 when p is inert or p > limit */
    uint16_t mask_of(uint64_t p) const {
        auto it = std::lower_bound(primes.begin(), primes.end(), p);
        if (it == primes.end() || *it != p) return 0;
        return masks[size_t(it - primes.begin())];
    }
};

inline PrimeClassTable classify_primes(const ClassGroup& cg, uint64_t P, int threads = 1) {
    if (P < 2) throw std::invalid_argument("classify_primes: limit must be >= 2");
    PrimeClassTable t;
    t.D = cg.D;
    t.limit = P;
    t.h = cg.h;
    if (cg.h > 16) throw std::domain_error("classify_primes: class number above mask width");
    std::vector<Bitset> class_bits((size_t)cg.h);
    for (int i = 0; i < cg.h; ++i)
        class_bits[(size_t)i] = rep_bitmap(cg.reps[(size_t)i], P, threads).bits;
    for_each_prime(P, [&](uint64_t p) {
        uint16_t m = 0;
        for (int i = 0; i < cg.h; ++i)
            if (class_bits[(size_t)i].test(p)) m |= uint16_t(1u << i);
        if (m) {
            t.primes.push_back(p);
            t.masks.push_back(m);
        }
    });
    return t;
}

inline void save_prime_class_table(const PrimeClassTable& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open cache file for writing: " + path);
    out << t.D << ' ' << t.limit << ' ' << t.h << '\n';
    for (size_t i = 0; i < t.primes.size(); ++i) {
        out << t.primes[i] << ' ';
        bool first = true;
        for (int b = 0; b < t.h; ++b)
            if (t.masks[i] & (1u << b)) {
                if (!first) out << ',';
                out << b;
                first = false;
            }
        out << '\n';
    }
}

inline PrimeClassTable load_prime_class_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open cache file: " + path);
    PrimeClassTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("cache file truncated: " + path);
    {
        std::istringstream hdr(line);
        if (!(hdr >> t.D >> t.limit >> t.h))
            throw std::runtime_error("malformed cache header: " + path);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        uint64_t p;
        std::string idxs;
        if (!(ls >> p >> idxs)) throw std::runtime_error("malformed cache line: " + line);
        uint16_t m = 0;
        std::istringstream is(idxs);
        std::string tok;
        while (std::getline(is, tok, ',')) m |= uint16_t(1u << std::stoi(tok));
        t.primes.push_back(p);
        t.masks.push_back(m);
    }
    return t;
}

/* nu_H(n) = 1 iff n is squarefree, coprime to 2D, and every prime divisor is
   represented by some class in H. */
inline int nu_H(uint64_t n, const std::vector<int>& H, const PrimeClassTable& pct,
                const ArithTables& tables) {
    if (n < 1) throw std::invalid_argument("nu_H: n must be >= 1");
    uint16_t hmask = 0;
    for (int i : H) hmask |= uint16_t(1u << i);
    uint64_t twoD = 2 * (uint64_t)(-pct.D);
    if (std::gcd(n, twoD) != 1) return 0;
    auto fac = factorize(n, tables);
    for (auto& [p, e] : fac) {
        if (e > 1) return 0;
        if (p > pct.limit)
            throw std::invalid_argument("nu_H: prime factor beyond class-table limit");
        if ((pct.mask_of(p) & hmask) == 0) return 0;
    }
    return 1;
}

inline double li(double x) {
    /* Li(x) = integral from 2 to x of dt/log t, via t = e^s and composite
       Gauss-Legendre on s */
    static const double gx[8] = {0.0950125098376374, 0.2816035507792589,
                                 0.4580167776572274, 0.6178762444026438,
                                 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
    static const double gw[8] = {0.1894506104550685, 0.1826034150449236,
                                 0.1691565193950025, 0.1495959888165767,
                                 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};
    if (x <= 2) return 0.0;
    double s0 = std::log(2.0), s1 = std::log(x);
    int segments = 128;
    double hseg = (s1 - s0) / segments, sum = 0.0;
    for (int k = 0; k < segments; ++k) {
        double mid = s0 + (k + 0.5) * hseg, half = 0.5 * hseg;
        for (int j = 0; j < 8; ++j) {
            double sp = mid + half * gx[j], sm = mid - half * gx[j];
            sum += gw[j] * half * (std::exp(sp) / sp + std::exp(sm) / sm);
        }
    }
    return sum;
}

struct EquidistRow {
    uint64_t a = 0;
    uint64_t count = 0;
    double predicted = 0.0;
};

/* Counts of primes <= x represented by the given class, split by residue
   mod q, with the Chebotarev prediction (1/phi(q)) (delta/h) Li(x). */
inline std::vector<EquidistRow> prime_equidistribution_report(const ClassGroup& cg,
                                                              int class_idx, uint64_t q,
                                                              uint64_t x,
                                                              const PrimeClassTable& pct) {
    if (q < 1) throw std::invalid_argument("modulus must be >= 1");
    uint64_t twoD = 2 * (uint64_t)(-cg.D);
    if (std::gcd(q, twoD) != 1)
        throw std::domain_error("prime_equidistribution_report: q must be coprime to 2D");
    if (x > pct.limit)
        throw std::invalid_argument("prime_equidistribution_report: x beyond table limit");
    std::vector<EquidistRow> rows(q);
    for (uint64_t a = 0; a < q; ++a) rows[a].a = a;
    uint16_t bit = uint16_t(1u << class_idx);
    for (size_t i = 0; i < pct.primes.size(); ++i) {
        uint64_t p = pct.primes[i];
        if (p > x) break;
        if (pct.masks[i] & bit) ++rows[p % q].count;
    }
    uint64_t phi = 0;
    for (uint64_t a = 0; a < q; ++a)
        if (std::gcd(a, q) == 1) ++phi;
    double delta = (cg.orders[(size_t)class_idx] <= 2) ? 0.5 : 1.0;
    double pred = (1.0 / double(phi)) * (delta / double(cg.h)) * li(double(x));
    for (uint64_t a = 0; a < q; ++a)
        rows[a].predicted = (std::gcd(a, q) == 1) ? pred : 0.0;
    return rows;
}

enum class ExcClass { conforms, violates, out_of_scope };

/* Checks the factorization shape n = m p_1 ... p_r of Props 3.4/3.5: every
   prime of m lies in H and the non-H primes form one of the stored diagonal
   tuples, order-insensitively and up to inversion. */
inline ExcClass classify_exceptional(uint64_t n, const TupleFamily& tf,
                                     const PrimeClassTable& pct,
                                     const ArithTables& tables) {
    uint64_t twoD = 2 * (uint64_t)(-tf.D);
    if (n < 1) throw std::invalid_argument("classify_exceptional: n must be >= 1");
    if (std::gcd(n, twoD) != 1) return ExcClass::out_of_scope;
    auto fac = factorize(n, tables);
    std::vector<int> labels; /* canonical coset labels of the non-H primes */
    for (auto& [p, e] : fac) {
        if (e > 1) return ExcClass::out_of_scope;
        if (p > pct.limit)
            throw std::invalid_argument("classify_exceptional: prime beyond table limit");
        uint16_t m = pct.mask_of(p);
        if (m == 0) return ExcClass::violates; /* inert prime: not representable at all */
        int label = -1;
        for (int i = 0; i < pct.h; ++i)
            if (m & (1u << i)) {
                int c = tf.coset_of_class[(size_t)i];
                int canon = std::min(c, tf.p0 - c) % tf.p0;
                if (label < 0) label = canon;
            }
        if (label != 0) labels.push_back(label);
    }
    if ((int)labels.size() != tf.r) return ExcClass::violates;
    if (tf.r == 0) return ExcClass::conforms;
    std::sort(labels.begin(), labels.end());
    for (auto& t : tf.tuples) {
        std::vector<int> s = t;
        std::sort(s.begin(), s.end());
        if (s == labels) return ExcClass::conforms;
    }
    return ExcClass::violates;
}

} // namespace bqf
