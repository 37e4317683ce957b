#include <catch2/catch_amalgamated.hpp>

#include "bqf/arith.hpp"

using namespace bqf;

namespace {

uint64_t pow_mod(uint64_t b, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = (__uint128_t(r) * b) % m;
        b = (__uint128_t(b) * b) % m;
        e >>= 1;
    }
    return r;
}

} // namespace

TEST_CASE("kronecker pinned values", "[arith]") {
    CHECK(kronecker(-3, 7) == 1);
    CHECK(kronecker(-20, 11) == -1);
    CHECK(kronecker(-4, 2) == 0);
    for (long long D : {-3LL, -4LL, -20LL, -23LL, -59LL, -87LL, -95LL})
        CHECK(kronecker(D, 1) == 1);
}

TEST_CASE("kronecker edge conventions", "[arith]") {
    CHECK(kronecker(1, 0) == 1);
    CHECK(kronecker(-1, 0) == 1);
    CHECK(kronecker(5, 0) == 0);
    CHECK(kronecker(2, 2) == 0);
    CHECK(kronecker(2, 7) == 1);
    CHECK(kronecker(2, 3) == -1);
    CHECK(kronecker(-1, 3) == -1);
    CHECK(kronecker(-1, 5) == 1);
}

TEST_CASE("kronecker complete multiplicativity", "[arith]") {
    for (long long D : {-23LL, -20LL}) {
        for (long long m = -1000; m <= 1000; ++m) {
            int km = kronecker(D, m);
            for (long long n = -1000; n <= 1000; ++n) {
                if (kronecker(D, m * n) != km * kronecker(D, n)) {
                    FAIL("multiplicativity broken at D=" << D << " m=" << m
                                                         << " n=" << n);
                }
            }
        }
        SUCCEED();
    }
}

TEST_CASE("kronecker agrees with Euler's criterion", "[arith]") {
    ArithTables t = build_tables(10000);
    for (long long D : {-3LL, -4LL, -20LL, -23LL, -59LL}) {
        for (uint32_t p : t.primes) {
            if (p == 2 || (-D) % p == 0) continue;
            uint64_t a = uint64_t(((D % (long long)p) + p) % (long long)p);
            uint64_t e = pow_mod(a, (p - 1) / 2, p);
            int euler = (e == 1) ? 1 : -1;
            if (kronecker(D, p) != euler)
                FAIL("Euler mismatch at D=" << D << " p=" << p);
        }
    }
    SUCCEED();
}

TEST_CASE("build_tables small examples", "[arith]") {
    ArithTables t = build_tables(10);
    CHECK(t.primes == std::vector<uint32_t>{2, 3, 5, 7});
    for (uint64_t n : {1, 2, 3, 5, 6, 7, 10}) CHECK(t.squarefree_mask.test(n));
    for (uint64_t n : {4, 8, 9}) CHECK_FALSE(t.squarefree_mask.test(n));

    ArithTables t2 = build_tables(2);
    CHECK(t2.primes == std::vector<uint32_t>{2});

    ArithTables t30 = build_tables(30);
    uint64_t sf = 0;
    for (uint64_t n = 1; n <= 30; ++n)
        if (t30.squarefree_mask.test(n)) ++sf;
    CHECK(sf == 19);
}

TEST_CASE("build_tables primality and mask invariants", "[arith]") {
    ArithTables t = build_tables(1000000);
    CHECK(t.primes.size() == 78498);
    CHECK(std::is_sorted(t.primes.begin(), t.primes.end()));
    for (uint32_t p : t.primes) {
        bool prime = p >= 2;
        for (uint32_t d = 2; uint64_t(d) * d <= p; ++d)
            if (p % d == 0) { prime = false; break; }
        if (!prime) FAIL("composite listed as prime: " << p);
    }
    for (uint64_t n = 1; n <= 100000; ++n) {
        bool sf = true;
        for (uint64_t d = 2; d * d <= n; ++d)
            if (n % (d * d) == 0) { sf = false; break; }
        if (t.squarefree_mask.test(n) != sf)
            FAIL("squarefree mask wrong at n=" << n);
    }
    SUCCEED();
}

TEST_CASE("build_tables error paths", "[arith]") {
    CHECK_THROWS_AS(build_tables(1), std::invalid_argument);
    CHECK_THROWS_AS(build_tables(kMaxBitLimit + 1), resource_error);
}

TEST_CASE("factorize examples", "[arith]") {
    ArithTables t = build_tables(10000);
    using V = std::vector<std::pair<uint64_t, int>>;
    CHECK(factorize(45, t) == V{{3, 2}, {5, 1}});
    CHECK(factorize(1, t) == V{});
    CHECK(factorize(99460729, t) == V{{9973, 2}});
    CHECK_THROWS_AS(factorize(0, t), std::invalid_argument);
    ArithTables tiny = build_tables(10);
    CHECK_THROWS_AS(factorize(1000, tiny), std::invalid_argument);
}

TEST_CASE("factorize reassembles every n up to a million", "[arith]") {
    ArithTables t = build_tables(1000);
    for (uint64_t n = 1; n <= 1000000; ++n) {
        uint64_t prod = 1, prev = 0;
        for (auto& [p, e] : factorize(n, t)) {
            if (p <= prev) FAIL("primes not ascending for n=" << n);
            prev = p;
            for (int k = 0; k < e; ++k) prod *= p;
        }
        if (prod != n) FAIL("reassembly failed for n=" << n);
    }
    SUCCEED();
}

TEST_CASE("bitset primitives", "[arith]") {
    Bitset b(100);
    b.set(3);
    b.set(64);
    b.set(97);
    CHECK(b.count() == 3);
    CHECK(b.test(64));
    b.reset(64);
    CHECK_FALSE(b.test(64));
    std::vector<uint64_t> seen;
    b.for_each([&](uint64_t n) { seen.push_back(n); });
    CHECK(seen == std::vector<uint64_t>{3, 97});

    Bitset c(100);
    c.set(3);
    c.set(5);
    Bitset u = b;
    u.or_with(c);
    CHECK(u.count() == 3);
    Bitset i = b;
    i.and_with(c);
    CHECK(i.count() == 1);
    CHECK(i.test(3));
    Bitset d = b;
    d.and_not(c);
    CHECK(d.count() == 1);
    CHECK(d.test(97));
}
