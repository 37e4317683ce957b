#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bqf {

/* Raised when a requested table or bitmap would exceed the memory budget.
   Mapped to exit code 3 by the CLI. */
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

/* Hard cap on sieve/table sizes: 2e9 bits is ~250 MB per bitmap, past which
   a 5 GB machine starts to struggle once a few bitmaps are alive at once. */
inline constexpr uint64_t kMaxBitLimit = 2'000'000'000ULL;

class Bitset {
public:
    Bitset() = default;
    explicit Bitset(uint64_t nbits) : nbits_(nbits), words_((nbits >> 6) + 1, 0) {}

    uint64_t size() const { return nbits_; }
    bool test(uint64_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    void set(uint64_t i) { words_[i >> 6] |= uint64_t(1) << (i & 63); }
    void reset(uint64_t i) { words_[i >> 6] &= ~(uint64_t(1) << (i & 63)); }

    std::vector<uint64_t>& words() { return words_; }
    const std::vector<uint64_t>& words() const { return words_; }

    void or_with(const Bitset& o) {
        for (size_t w = 0; w < words_.size() && w < o.words_.size(); ++w)
            words_[w] |= o.words_[w];
    }
    void and_with(const Bitset& o) {
        for (size_t w = 0; w < words_.size(); ++w)
            words_[w] &= (w < o.words_.size()) ? o.words_[w] : 0;
    }
    void and_not(const Bitset& o) {
        for (size_t w = 0; w < words_.size(); ++w)
            words_[w] &= ~((w < o.words_.size()) ? o.words_[w] : 0);
    }
    bool operator==(const Bitset& o) const {
        return nbits_ == o.nbits_ && words_ == o.words_;
    }

    uint64_t count() const {
        uint64_t c = 0;
        for (uint64_t w : words_) c += uint64_t(__builtin_popcountll(w));
        return c;
    }

    /* Calls f(n) for every set bit, ascending. */
    template <class F>
    void for_each(F f) const {
        for (size_t w = 0; w < words_.size(); ++w) {
            uint64_t bits = words_[w];
            while (bits) {
                unsigned tz = unsigned(__builtin_ctzll(bits));
                f((uint64_t(w) << 6) | tz);
                bits &= bits - 1;
            }
        }
    }

private:
    uint64_t nbits_ = 0;
    std::vector<uint64_t> words_;
};

/* Kronecker symbol (a|n), full extension with the usual conventions at 2,
   -1 and 0. */
inline int kronecker(long long a, long long n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    if ((a & 1) == 0 && (n & 1) == 0) return 0;
    int result = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) result = -result;
    }
    /* strip factors of 2 from n using (a|2) = (2|a) = (-1)^((a^2-1)/8) */
    int v = 0;
    while ((n & 1) == 0) { n >>= 1; ++v; }
    if (v & 1) {
        long long am8 = ((a % 8) + 8) % 8;
        if (am8 == 3 || am8 == 5) result = -result;
    }
    a %= n;
    if (a < 0) a += n;
    while (a != 0) {
        v = 0;
        while ((a & 1) == 0) { a >>= 1; ++v; }
        if (v & 1) {
            long long nm8 = n % 8;
            if (nm8 == 3 || nm8 == 5) result = -result;
        }
        /* quadratic reciprocity for odd positive a, n */
        if ((a % 4) == 3 && (n % 4) == 3) result = -result;
        long long t = n % a;
        n = a;
        a = t;
    }
    return (n == 1) ? result : 0;
}

struct ArithTables {
    uint64_t limit = 0;
    std::vector<uint32_t> primes;
    Bitset squarefree_mask; /* bit n set iff n squarefree, 1 <= n <= limit */
};

/* Simple odd-wheel Eratosthenes; calls f(p) for each prime p <= limit in
   ascending order. */
template <class F>
inline void for_each_prime(uint64_t limit, F f) {
    if (limit < 2) return;
    f(uint64_t(2));
    if (limit < 3) return;
    uint64_t n_odd = (limit - 1) / 2; /* odds 3,5,...,<=limit are 2i+3, i<n_odd */
    std::vector<uint64_t> comp((n_odd >> 6) + 1, 0);
    for (uint64_t i = 0;; ++i) {
        uint64_t p = 2 * i + 3;
        if (p * p > limit) break;
        if ((comp[i >> 6] >> (i & 63)) & 1) continue;
        for (uint64_t j = (p * p - 3) / 2; j < n_odd; j += p)
            comp[j >> 6] |= uint64_t(1) << (j & 63);
    }
    for (uint64_t i = 0; i < n_odd; ++i)
        if (!((comp[i >> 6] >> (i & 63)) & 1)) f(2 * i + 3);
}

inline ArithTables build_tables(uint64_t limit) {
    if (limit < 2) throw std::invalid_argument("build_tables: limit must be >= 2");
    if (limit > kMaxBitLimit)
        throw resource_error("build_tables: limit " + std::to_string(limit) +
                             " exceeds memory budget");
    ArithTables t;
    t.limit = limit;
    for_each_prime(limit, [&](uint64_t p) { t.primes.push_back(uint32_t(p)); });
    t.squarefree_mask = Bitset(limit + 1);
    for (auto& w : t.squarefree_mask.words()) w = ~uint64_t(0);
    t.squarefree_mask.reset(0);
    for (uint32_t p : t.primes) {
        uint64_t p2 = uint64_t(p) * p;
        if (p2 > limit) break;
        for (uint64_t m = p2; m <= limit; m += p2) t.squarefree_mask.reset(m);
    }
    return t;
}

/* Trial division by the listed primes. Requires tables.limit^2 >= n so the
   prime list covers sqrt(n). */
inline std::vector<std::pair<uint64_t, int>> factorize(uint64_t n, const ArithTables& tables) {
    if (n < 1) throw std::invalid_argument("factorize: n must be >= 1");
    if (double(tables.limit) * double(tables.limit) < double(n))
        throw std::invalid_argument("factorize: table limit too small for n");
    std::vector<std::pair<uint64_t, int>> out;
    uint64_t m = n;
    for (uint32_t p : tables.primes) {
        if (uint64_t(p) * p > m) break;
        if (m % p == 0) {
            int e = 0;
            while (m % p == 0) { m /= p; ++e; }
            out.emplace_back(p, e);
        }
    }
    if (m > 1) out.emplace_back(m, 1);
    return out;
}

inline bool is_squarefree_small(long long n) {
    if (n < 0) n = -n;
    if (n == 0) return false;
    for (long long d = 2; d * d <= n; ++d)
        if (n % (d * d) == 0) return false;
    return true;
}

} // namespace bqf
