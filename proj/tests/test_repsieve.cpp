#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "bqf/repsieve.hpp"

using namespace bqf;

namespace {

std::set<uint64_t> bits_of(const RepBitmap& bm) {
    std::set<uint64_t> s;
    bm.bits.for_each([&](uint64_t n) { s.insert(n); });
    return s;
}

std::set<uint64_t> brute_force(const QuadForm& f, long long x) {
    std::set<uint64_t> s;
    long long range = (long long)std::sqrt((double)x) * 4 + 8;
    for (long long u = -range; u <= range; ++u)
        for (long long v = -range; v <= range; ++v) {
            long long n = f.eval(u, v);
            if (n >= 1 && n <= x) s.insert((uint64_t)n);
        }
    return s;
}

} // namespace

TEST_CASE("rep_bitmap pinned examples", "[repsieve]") {
    CHECK(bits_of(rep_bitmap({1, 0, 1}, 20)) ==
          std::set<uint64_t>{1, 2, 4, 5, 8, 9, 10, 13, 16, 17, 18, 20});
    CHECK(bits_of(rep_bitmap({1, 1, 1}, 10)) == std::set<uint64_t>{1, 3, 4, 7, 9});
    CHECK(bits_of(rep_bitmap({2, 1, 3}, 10)) == std::set<uint64_t>{2, 3, 4, 6, 8, 9});
}

TEST_CASE("rep_bitmap matches brute force", "[repsieve]") {
    for (QuadForm f : {QuadForm{1, 1, 6}, QuadForm{2, 1, 3}, QuadForm{3, 1, 8},
                       QuadForm{1, 0, 5}, QuadForm{2, 2, 3}, QuadForm{1, 1, 22}}) {
        RepBitmap bm = rep_bitmap(f, 5000);
        if (bits_of(bm) != brute_force(f, 5000))
            FAIL("sieve disagrees with brute force for " << f.a << "," << f.b << ","
                                                         << f.c);
    }
    SUCCEED();
}

TEST_CASE("rep_bitmap error paths", "[repsieve]") {
    CHECK_THROWS_AS(rep_bitmap({1, 0, -1}, 100), std::domain_error);
    CHECK_THROWS_AS(rep_bitmap({1, 0, 1}, 0), std::invalid_argument);
    CHECK_THROWS_AS(rep_bitmap({1, 0, 1}, kMaxBitLimit + 1), resource_error);
}

TEST_CASE("genus_bitmap pinned examples", "[repsieve]") {
    {
        std::vector<QuadForm> g23 = {{1, 1, 6}, {2, 1, 3}, {2, -1, 3}};
        RepBitmap bm = genus_bitmap(g23, 10);
        CHECK(bits_of(bm) == std::set<uint64_t>{1, 2, 3, 4, 6, 8, 9});
    }
    {
        RepBitmap single = genus_bitmap({{1, 0, 5}}, 1000);
        RepBitmap direct = rep_bitmap({1, 0, 5}, 1000);
        CHECK(single.bits == direct.bits);
    }
    {
        RepBitmap bm = genus_bitmap({{1, 0, 5}}, 30);
        CHECK(bits_of(bm) ==
              std::set<uint64_t>{1, 4, 5, 6, 9, 14, 16, 20, 21, 24, 25, 29, 30});
    }
    CHECK_THROWS_AS(genus_bitmap({}, 10), std::domain_error);
    CHECK_THROWS_AS(genus_bitmap({{1, 1, 6}, {1, 0, 5}}, 10), std::domain_error);
    CHECK_THROWS_AS(genus_bitmap({{1, 0, 5}, {2, 2, 3}}, 10), std::domain_error);
}

TEST_CASE("apply_masks pinned examples", "[repsieve]") {
    ArithTables t = build_tables(1000);
    {
        RepBitmap bm = rep_bitmap({1, 1, 1}, 10);
        RepBitmap masked = apply_masks(bm, true, 6, t);
        CHECK(bits_of(masked) == std::set<uint64_t>{1, 7});
    }
    {
        RepBitmap bm = rep_bitmap({1, 1, 1}, 10);
        RepBitmap same = apply_masks(bm, false, 0, t);
        CHECK(same.bits == bm.bits);
    }
    {
        RepBitmap bm = rep_bitmap({1, 1, 6}, 50);
        RepBitmap masked = apply_masks(bm, true, 46, t);
        auto s = bits_of(masked);
        CHECK(s.count(1) == 1);
        CHECK(s.count(59) == 0);
        CHECK(s.count(4) == 0);
        CHECK(s.count(8) == 0);
        CHECK(s.count(9) == 0);
    }
    ArithTables tiny = build_tables(10);
    RepBitmap big = rep_bitmap({1, 0, 1}, 100);
    CHECK_THROWS_AS(apply_masks(big, true, 0, tiny), std::invalid_argument);
}

TEST_CASE("exceptional_bitmap pinned examples", "[repsieve]") {
    std::vector<QuadForm> g23 = {{1, 1, 6}, {2, 1, 3}, {2, -1, 3}};
    RepBitmap genus = genus_bitmap(g23, 100);
    RepBitmap form = rep_bitmap({2, 1, 3}, 100);
    RepBitmap exc = exceptional_bitmap(genus, form);
    CHECK(exc.bits.test(1));
    CHECK_FALSE(exc.bits.test(13)); /* 13 = f(2,1) */

    RepBitmap g20 = genus_bitmap({{1, 0, 5}}, 100);
    RepBitmap f20 = rep_bitmap({1, 0, 5}, 100);
    CHECK(exceptional_bitmap(g20, f20).bits.count() == 0);

    RepBitmap small = rep_bitmap({2, 1, 3}, 50);
    CHECK_THROWS_AS(exceptional_bitmap(genus, small), std::domain_error);
}

TEST_CASE("count_residues examples and sum rule", "[repsieve]") {
    RepBitmap bm = rep_bitmap({1, 1, 1}, 10);
    ResidueCounts rc = count_residues(bm, 3);
    CHECK(rc.counts == std::vector<uint64_t>{2, 3, 0});
    ResidueCounts one = count_residues(bm, 1);
    CHECK(one.counts == std::vector<uint64_t>{bm.count()});
    CHECK(rc.total() == bm.count());
    CHECK_THROWS_AS(count_residues(bm, 0), std::invalid_argument);

    for (uint64_t q : {2, 5, 7, 12}) {
        RepBitmap big = rep_bitmap({2, 1, 3}, 100000);
        CHECK(count_residues(big, q).total() == big.count());
    }
}

TEST_CASE("form bitmap is a subset of its genus bitmap", "[repsieve]") {
    for (long long D : {-23LL, -20LL, -87LL}) {
        ClassGroup cg = class_group(D);
        GenusStructure gs = genus_structure(cg);
        for (int i = 0; i < cg.h; ++i) {
            std::vector<QuadForm> genus_forms;
            for (int j = 0; j < cg.h; ++j)
                if (gs.genus_of_class[j] == gs.genus_of_class[i])
                    genus_forms.push_back(cg.reps[j]);
            RepBitmap g = genus_bitmap(genus_forms, 1000000);
            RepBitmap f = rep_bitmap(cg.reps[i], 1000000);
            Bitset outside = f.bits;
            outside.and_not(g.bits);
            if (outside.count() != 0) FAIL("form not within genus at D=" << D);
            /* N = B_R - B_f >= 0 entrywise */
            ResidueCounts gr = count_residues(g, 7);
            ResidueCounts fr = count_residues(f, 7);
            for (uint64_t a = 0; a < 7; ++a)
                if (gr.counts[a] < fr.counts[a]) FAIL("N negative at D=" << D);
        }
    }
    SUCCEED();
}

TEST_CASE("exceptional set closed under removing square factors", "[repsieve]") {
    /* over squarefree m <= 1e4 in the genus bitmap and s <= 31 with m s^2 <= 1e6:
       exceptional(m s^2) implies exceptional(m) */
    ArithTables t = build_tables(1000000);
    std::vector<QuadForm> g23 = {{1, 1, 6}, {2, 1, 3}, {2, -1, 3}};
    RepBitmap genus = genus_bitmap(g23, 1000000);
    RepBitmap form = rep_bitmap({2, 1, 3}, 1000000);
    RepBitmap exc = exceptional_bitmap(genus, form);
    int checked = 0;
    for (uint64_t m = 1; m <= 10000; ++m) {
        if (!genus.bits.test(m) || !t.squarefree_mask.test(m)) continue;
        for (uint64_t s = 2; s <= 31; ++s) {
            uint64_t n = m * s * s;
            if (n > 1000000) break;
            if (exc.bits.test(n)) {
                ++checked;
                if (!exc.bits.test(m))
                    FAIL("E(m s^2)=1 without E(m)=1 at m=" << m << " s=" << s);
            }
        }
    }
    INFO("implications checked: " << checked);
    CHECK(checked > 0);
}

TEST_CASE("sieve output independent of threads and stripes", "[repsieve]") {
    for (QuadForm f : {QuadForm{2, 1, 3}, QuadForm{3, 1, 8}}) {
        RepBitmap ref = rep_bitmap(f, 100000, 1);
        for (int threads : {2, 4, 8})
            for (long long stripe : {1LL, 7LL, 2048LL}) {
                RepBitmap got = rep_bitmap(f, 100000, threads, stripe);
                if (!(got.bits == ref.bits))
                    FAIL("nondeterminism at threads=" << threads
                                                      << " stripe=" << stripe);
            }
    }
    SUCCEED();
}

TEST_CASE("bitmap at a smaller limit is a prefix", "[repsieve]") {
    RepBitmap small = rep_bitmap({2, 1, 3}, 10000);
    RepBitmap big = rep_bitmap({2, 1, 3}, 20000);
    for (uint64_t n = 1; n <= 10000; ++n)
        if (small.bits.test(n) != big.bits.test(n))
            FAIL("prefix property broken at n=" << n);
    SUCCEED();
}
