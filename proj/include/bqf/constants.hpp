#pragma once

#include "bqf/primeclass.hpp"

namespace bqf {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

struct Rational {
    long long num = 0, den = 1;

    Rational() = default;
    Rational(long long n, long long d) : num(n), den(d) {
        if (den < 0) { num = -num; den = -den; }
        long long g = std::gcd(std::abs(num), den);
        if (g > 1) { num /= g; den /= g; }
    }
    double value() const { return double(num) / double(den); }
    Rational operator+(const Rational& o) const {
        return Rational(num * o.den + o.num * den, den * o.den);
    }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

namespace detail {

inline double digamma(double x) {
    double acc = 0.0;
    while (x < 8.0) { acc -= 1.0 / x; x += 1.0; }
    double inv = 1.0 / x, inv2 = inv * inv;
    /* asymptotic series */
    double series = std::log(x) - 0.5 * inv -
                    inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 -
                            inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    return acc + series;
}

/* Euler-Maclaurin evaluation; accurate near s = 1 for a in (0, 1]. */
inline double hurwitz_zeta(double s, double a) {
    if (s == 1.0) throw std::domain_error("hurwitz_zeta: pole at s = 1");
    static const double bern[7] = {
        1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0,
        1.0 / 47900160.0, -5.2842901356513216e-10, 1.3382536530684679e-11};
    const int N = 30;
    double sum = 0.0;
    for (int k = 0; k < N; ++k) sum += std::pow(a + k, -s);
    double aN = a + N;
    sum += std::pow(aN, 1.0 - s) / (s - 1.0);
    sum += 0.5 * std::pow(aN, -s);
    double poch = s; /* s (s+1) ... (s+2j-2) */
    double pw = std::pow(aN, -s - 1.0);
    for (int j = 1; j <= 7; ++j) {
        sum += bern[j - 1] * poch * pw;
        poch *= (s + 2 * j - 1) * (s + 2 * j);
        pw /= aN * aN;
    }
    return sum;
}

} // namespace detail

/* L_D(s) for s near (but not equal to) 1, through Hurwitz zetas. */
inline double dirichlet_l(long long D, double s) {
    long long m = std::abs(D);
    double sum = 0.0;
    for (long long j = 1; j < m; ++j) {
        int chi = kronecker(D, j);
        if (chi) sum += chi * detail::hurwitz_zeta(s, double(j) / double(m));
    }
    return std::pow(double(m), -s) * sum;
}

/* L_D(1) by the digamma formula; independent of the class number. */
inline double dirichlet_l1(long long D) {
    long long m = std::abs(D);
    double sum = 0.0;
    for (long long j = 1; j < m; ++j) {
        int chi = kronecker(D, j);
        if (chi) sum += chi * detail::digamma(double(j) / double(m));
    }
    return -sum / double(m);
}

inline double l_prime_at_1(long long D) {
    const double h1 = 1e-5, h2 = 5e-6;
    double d1 = (dirichlet_l(D, 1.0 + h1) - dirichlet_l(D, 1.0 - h1)) / (2.0 * h1);
    double d2 = (dirichlet_l(D, 1.0 + h2) - dirichlet_l(D, 1.0 - h2)) / (2.0 * h2);
    return (4.0 * d2 - d1) / 3.0;
}

inline int unit_count(long long D) { return D == -3 ? 6 : (D == -4 ? 4 : 2); }

inline int analytic_class_number(long long D) {
    if (D >= 0 || !is_fundamental(D))
        throw std::domain_error("analytic_class_number: D must be negative fundamental");
    double h = unit_count(D) * std::sqrt(double(-D)) * dirichlet_l1(D) /
               (2.0 * std::acos(-1.0));
    return int(std::llround(h));
}

/* L_D(1) via the class number formula, with h from form enumeration. */
inline double l_value(long long D) {
    ClassGroup cg = class_group(D);
    return 2.0 * std::acos(-1.0) * cg.h / (unit_count(D) * std::sqrt(double(-D)));
}

struct LsdCoefficients {
    long long D = 0;
    double a0 = 0.0, a1 = 0.0;
    double l1 = 0.0;       /* L_D(1) */
    double a_at_1 = 0.0;   /* truncated Euler factor A(1) */
    double tail_bound = 0.0; /* relative bound on the A(1) truncation */
    uint64_t prime_bound = 0;
    int genus_count = 0;
    int h = 0;
};

inline LsdCoefficients lsd_coefficients(long long D, uint64_t prime_bound = 1000000) {
    if (prime_bound < 1000)
        throw std::invalid_argument("lsd_coefficients: prime_bound must be >= 1000");
    ClassGroup cg = class_group(D);
    GenusStructure gs = genus_structure(cg);
    const double pi = std::acos(-1.0);
    LsdCoefficients r;
    r.D = D;
    r.prime_bound = prime_bound;
    r.genus_count = gs.genus_count;
    r.h = cg.h;
    r.l1 = 2.0 * pi * cg.h / (unit_count(D) * std::sqrt(double(-D)));

    /* A(s) = prod_{p|D} (1-p^-s)^-1 prod_{(D|p)=-1} (1-p^-2s)^-1 */
    long double logA = 0.0L, dlogA = 0.0L;
    for_each_prime(prime_bound, [&](uint64_t p) {
        int chi = kronecker(D, (long long)p);
        long double pd = (long double)p;
        if (chi == 0) {
            logA += -std::log(1.0L - 1.0L / pd);
            dlogA += -std::log((long double)p) / (pd - 1.0L);
        } else if (chi == -1) {
            logA += -std::log(1.0L - 1.0L / (pd * pd));
            dlogA += -2.0L * std::log((long double)p) / (pd * pd - 1.0L);
        }
    });
    r.a_at_1 = double(std::exp(logA));
    double pb = double(prime_bound);
    r.tail_bound = std::exp(2.0 / (pb * std::log(pb))) - 1.0;

    double lp = l_prime_at_1(D);
    double a0t = std::sqrt(r.a_at_1 * r.l1);
    double a1t = a0t * ((kEulerGamma + double(dlogA) + lp / r.l1) / 2.0 - 1.0);
    r.a0 = a0t / (std::sqrt(pi) * gs.genus_count);
    r.a1 = a1t / (-2.0 * std::sqrt(pi) * gs.genus_count); /* Gamma(-1/2) = -2 sqrt(pi) */
    return r;
}

struct ProgressionCoefficients {
    long long D = 0;
    uint64_t q = 0;
    std::vector<Rational> c;     /* a -> c(q,a); {0,0} when unsupported */
    std::vector<double> delta;   /* a -> delta(q,a); NaN when unsupported */
    double b0 = 0.0, b1 = 0.0;   /* coprime residue classes */
    LsdCoefficients lsd;
};

namespace detail {

inline bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

} // namespace detail

inline ProgressionCoefficients progression_coefficients(long long D, uint64_t q,
                                                        uint64_t prime_bound = 1000000) {
    uint64_t twoD = 2 * (uint64_t)(-D);
    if (q < 1 || std::gcd(q, twoD) != 1)
        throw std::domain_error("progression_coefficients: q must be coprime to 2D");
    ProgressionCoefficients pc;
    pc.D = D;
    pc.q = q;
    pc.lsd = lsd_coefficients(D, prime_bound);
    const double nan = std::nan("");
    pc.c.assign(q, Rational{0, 1});
    pc.delta.assign(q, nan);
    bool prime_q = detail::is_prime_u64(q);
    long long qll = (long long)q;
    if (prime_q) {
        int chi = kronecker(D, qll);
        double lq = std::log(double(q));
        for (uint64_t a = 0; a < q; ++a) {
            if (chi == 1) {
                pc.c[a] = Rational(1, qll);
                pc.delta[a] = (a == 0) ? -lq / 2.0 : lq / (2.0 * double(q - 1));
            } else {
                pc.c[a] = (a == 0) ? Rational(1, qll * qll)
                                   : Rational(qll + 1, qll * qll);
                pc.delta[a] = (a == 0) ? -lq : lq / double(q - 1);
            }
        }
    } else {
        /* composite q: only (a,q) = 1 is supported; c from the b0 product */
        Rational cq(1, qll);
        long long m = qll;
        for (long long p = 2; m > 1; ++p) {
            if (p * p > m) p = m;
            if (m % p != 0) continue;
            while (m % p == 0) m /= p;
            if (kronecker(D, p) == -1)
                cq = Rational(cq.num * (p + 1), cq.den * p);
        }
        for (uint64_t a = 0; a < q; ++a)
            if (std::gcd(a, q) == 1) pc.c[a] = cq;
            else pc.c[a] = Rational{0, 0}; /* unsupported: paper gives no formula */
    }
    /* b0, b1 over p | q (valid for any q, coprime residues) */
    double prod = 1.0, sum = 0.0;
    {
        long long m = qll;
        for (long long p = 2; m > 1; ++p) {
            if (p * p > m) p = m;
            if (m % p != 0) continue;
            while (m % p == 0) m /= p;
            sum += std::log(double(p)) / double(p - 1);
            if (kronecker(D, p) == -1) {
                prod *= 1.0 + 1.0 / double(p);
                sum -= std::log(double(p)) / double(p + 1);
            }
        }
    }
    pc.b0 = pc.lsd.a0 * prod / double(q);
    pc.b1 = pc.lsd.a1 * (prod / double(q)) *
            (1.0 - (pc.lsd.a0 / (2.0 * pc.lsd.a1)) * sum);
    return pc;
}

struct TwoTermEstimate {
    double main = 0.0;
    double two_term = 0.0;
    bool genus_level = false; /* set when C(D) has several classes per genus */
};

inline TwoTermEstimate two_term_estimate(long long D, uint64_t q, uint64_t a, double x,
                                         uint64_t prime_bound = 1000000) {
    ProgressionCoefficients pc = progression_coefficients(D, q, prime_bound);
    TwoTermEstimate e;
    e.genus_level = (pc.lsd.h != pc.lsd.genus_count);
    double lx = std::log(x);
    a %= q;
    if (detail::is_prime_u64(q) || q == 1) {
        if (q == 1) {
            e.main = pc.lsd.a0 * x / std::sqrt(lx);
            e.two_term = e.main + pc.lsd.a1 * x / std::pow(lx, 1.5);
            return e;
        }
        double c = pc.c[a].value();
        double d = pc.delta[a];
        e.main = c * pc.lsd.a0 * x / std::sqrt(lx);
        e.two_term = e.main + c * pc.lsd.a1 * (1.0 - (pc.lsd.a0 / pc.lsd.a1) * d) * x /
                                  std::pow(lx, 1.5);
    } else {
        if (std::gcd(a, q) != 1)
            throw std::domain_error("two_term_estimate: composite q needs (a,q) = 1");
        e.main = pc.b0 * x / std::sqrt(lx);
        e.two_term = e.main + pc.b1 * x / std::pow(lx, 1.5);
    }
    return e;
}

struct WirsingConstants {
    double kappa = 0.0;
    double a3 = 0.0, a4 = 0.0;
    double a3_tail = 0.0;      /* bound on the dropped k-sum tail past prime_bound */
    double drift[3] = {0, 0, 0}; /* sum 1/p - kappa loglog N at N = P/100, P/10, P */
    uint64_t prime_bound = 0;
    int k_max = 15;
};

inline WirsingConstants wirsing_constants(const ClassGroup& cg, const std::vector<int>& H,
                                          const PrimeClassTable& pct,
                                          uint64_t prime_bound = 100000000,
                                          int k_max = 15) {
    if (pct.limit < prime_bound)
        throw std::invalid_argument("wirsing_constants: class table smaller than prime_bound");
    if (prime_bound < 10000)
        throw std::invalid_argument("wirsing_constants: prime_bound must be >= 10000");
    WirsingConstants w;
    w.prime_bound = prime_bound;
    w.k_max = k_max;
    w.kappa = double(H.size()) / (2.0 * cg.h);
    uint16_t hmask = 0;
    for (int i : H) hmask |= uint16_t(1u << i);
    uint64_t twoD = 2 * (uint64_t)(-cg.D);
    long double ksum = 0.0L, s1 = 0.0L;
    uint64_t cp1 = prime_bound / 100, cp2 = prime_bound / 10;
    long double s1_cp1 = 0.0L, s1_cp2 = 0.0L;
    for (size_t i = 0; i < pct.primes.size(); ++i) {
        uint64_t p = pct.primes[i];
        if (p > prime_bound) break;
        if (std::gcd(p, twoD) != 1) continue; /* nu_H vanishes on p | 2D */
        if ((pct.masks[i] & hmask) == 0) continue;
        long double pd = (long double)p;
        long double pk = pd * pd;
        for (int k = 2; k <= k_max; ++k) {
            long double term = 1.0L / (k * pk);
            ksum += (k % 2 == 0) ? term : -term;
            pk *= pd;
            if (pk > 1e30L) break;
        }
        if (p <= cp1) s1_cp1 += 1.0L / pd;
        if (p <= cp2) s1_cp2 += 1.0L / pd;
        s1 += 1.0L / pd;
    }
    w.a3 = std::exp(kEulerGamma * w.kappa) / std::tgamma(w.kappa) *
           std::exp(-double(ksum));
    double pb = double(prime_bound);
    w.a3_tail = 1.0 / (pb * std::log(pb));
    w.drift[0] = double(s1_cp1) - w.kappa * std::log(std::log(double(cp1)));
    w.drift[1] = double(s1_cp2) - w.kappa * std::log(std::log(double(cp2)));
    w.drift[2] = double(s1) - w.kappa * std::log(std::log(pb));
    w.a4 = w.a3 * std::exp(w.drift[2]);
    return w;
}

struct ExceptionalEstimate {
    double value = 0.0;
    double c_prime = 0.0;
    double a2 = 0.0;
    bool negligible = false; /* the nu_H(q)=0, a=0 case: only o(x/(log x)^{1-1/(2 p0)}) */
};

inline ExceptionalEstimate exceptional_estimate(const ClassGroup& cg, const QuadForm& f,
                                                uint64_t q, uint64_t a, double x,
                                                const PrimeClassTable& pct,
                                                const WirsingConstants& wc) {
    uint64_t twoD = 2 * (uint64_t)(-cg.D);
    if (q < 1 || std::gcd(q, twoD) != 1)
        throw std::domain_error("exceptional_estimate: q must be coprime to 2D");
    TupleFamily tf = exceptional_tuples(cg, f);
    uint16_t hmask = 0;
    for (int i : tf.H) hmask |= uint16_t(1u << i);
    auto nu_prime = [&](uint64_t p) -> int {
        if (p > pct.limit)
            throw std::invalid_argument("exceptional_estimate: q factor beyond table limit");
        return (pct.mask_of(p) & hmask) ? 1 : 0;
    };
    ExceptionalEstimate e;
    a %= q;
    if (q == 1) {
        e.c_prime = 1.0;
    } else if (a == 0) {
        if (!detail::is_prime_u64(q))
            throw std::domain_error("exceptional_estimate: a = 0 supported for prime q only");
        if (nu_prime(q))
            e.c_prime = 1.0 / double(q + 1);
        else {
            e.c_prime = 0.0;
            e.negligible = true;
        }
    } else {
        if (std::gcd(a, q) != 1)
            throw std::domain_error("exceptional_estimate: (a,q) > 1 unsupported");
        /* c'(q,a) = (1/phi(q)) prod_{p|q} (1 + nu_H(p)/p)^{-1} */
        double phi = 1.0, prod = 1.0;
        uint64_t m = q;
        for (uint64_t p = 2; m > 1; ++p) {
            if (p * p > m) p = m;
            if (m % p != 0) continue;
            uint64_t pe = 1;
            while (m % p == 0) { m /= p; pe *= p; }
            phi *= double(pe - pe / p);
            if (nu_prime(p)) prod *= double(p) / double(p + 1);
        }
        e.c_prime = prod / phi;
    }
    e.a2 = double(tf.tuples.size()) * wc.a4 / std::pow(double(cg.h), double(tf.r));
    double lx = std::log(x);
    e.value = e.c_prime * e.a2 * x * std::pow(std::log(lx), double(tf.r)) /
              std::pow(lx, 1.0 - 1.0 / (2.0 * tf.p0));
    return e;
}

} // namespace bqf
