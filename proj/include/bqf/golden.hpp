#pragma once

#include <optional>

#include "bqf/constants.hpp"

namespace bqf {

struct GoldenEstimate {
    uint64_t a = 0;
    double main = 0.0;
    double two = 0.0;
};

struct GoldenTable {
    std::string id;
    long long D = 0;
    QuadForm form;
    uint64_t q = 0;
    uint64_t x = 0;
    enum Kind { counts_B, counts_Bprime, counts_Nprime } kind = counts_B;
    std::vector<uint64_t> counts;             /* index a */
    std::vector<GoldenEstimate> estimates;    /* main/two-term columns */
    double exc_estimate = 0.0;                /* N' estimate for a coprime to q */
    /* additional-information rows, checked structurally */
    int kron_Dq = 0;
    int h = 0;
    int genus_count = 0;
    int nu_H_q = -1;                          /* -1: not stated */
    int r = -1;                               /* -1: not stated */
};

inline const std::vector<GoldenTable>& golden_tables() {
    static const std::vector<GoldenTable> tables = [] {
        std::vector<GoldenTable> v;
        v.push_back({"golubeva-example", -23, {2, 1, 3}, 3, 100000000,
                     GoldenTable::counts_Nprime,
                     {0, 568737, 568775},
                     {},
                     588499.0,
                     1, 3, 1, 0, 0});
        v.push_back({"cn1ed", -3, {1, 1, 1}, 7, 100000000,
                     GoldenTable::counts_B,
                     {2342596, 2181168, 2181169, 2181008, 2181101, 2181032, 2181096},
                     {{0, 2126610, 2305520}, {1, 2126610, 2174480}},
                     0.0,
                     1, 1, 1, -1, -1});
        v.push_back({"cn1nd", -3, {1, 1, 1}, 5, 100000000,
                     GoldenTable::counts_B,
                     {685734, 3685946, 3685770, 3685731, 3685990},
                     {{0, 595452, 666121}, {1, 3572710, 3696540}},
                     0.0,
                     -1, 1, 1, -1, -1});
        v.push_back({"cn2ed", -20, {1, 0, 5}, 3, 100000000,
                     GoldenTable::counts_B,
                     {4502885, 4276237, 4275772},
                     {{0, 4156480, 4448270}, {1, 4156480, 4262350}},
                     0.0,
                     1, 2, 2, -1, -1});
        v.push_back({"cn2nd", -20, {1, 0, 5}, 11, 100000000,
                     GoldenTable::counts_B,
                     {128016, 1292745, 1292628, 1292788, 1292739, 1292791, 1292573,
                      1292545, 1292595, 1292875, 1292599},
                     {{0, 103053, 120629}, {1, 1236640, 1270480}},
                     0.0,
                     -1, 2, 2, -1, -1});
        v.push_back({"thm3sf", -59, {1, 1, 15}, 17, 100000000,
                     GoldenTable::counts_Bprime,
                     {376649, 354287, 354196, 354373, 354313, 354509, 354363, 354453,
                      354278, 354228, 354259, 354418, 354329, 354263, 354347, 354402,
                      354192},
                     {},
                     0.0,
                     1, 3, 1, 1, 1});
        v.push_back({"thm3", -59, {1, 1, 15}, 17, 100000000,
                     GoldenTable::counts_B,
                     {782426, 683226, 683405, 683040, 683379, 683240, 683199, 683179,
                      683380, 683427, 683042, 683073, 683018, 683403, 683214, 683499,
                      683323},
                     {},
                     0.0,
                     1, 3, 1, 1, 1});
        v.push_back({"cn3sf", -23, {1, 1, 6}, 3, 100000000,
                     GoldenTable::counts_Bprime,
                     {2418331, 2325663, 2326169},
                     {},
                     0.0,
                     1, 3, 1, 0, 1});
        v.push_back({"cn3", -23, {1, 1, 6}, 3, 100000000,
                     GoldenTable::counts_B,
                     {6223402, 4240799, 4239968},
                     {},
                     0.0,
                     1, 3, 1, 0, 1});
        v.push_back({"conj-sup1", -87, {1, 1, 22}, 7, 100000000,
                     GoldenTable::counts_B,
                     {1745576, 1254963, 1254939, 1254519, 1255006, 1254481, 1254492},
                     {},
                     0.0,
                     1, 6, 2, 0, -1});
        v.push_back({"conj-sup2", -95, {3, 1, 8}, 3, 100000000,
                     GoldenTable::counts_B,
                     {4246393, 3387811, 3387781},
                     {},
                     0.0,
                     1, 8, 2, 1, -1});
        return v;
    }();
    return tables;
}

inline const GoldenTable& golden_table(const std::string& id) {
    for (auto& t : golden_tables())
        if (t.id == id) return t;
    throw std::invalid_argument("unknown table id: " + id);
}

struct VerifyResult {
    std::string id;
    int cells_checked = 0;
    int failures = 0;
    std::vector<std::string> diffs;
};

namespace detail {

inline const ArithTables& shared_tables(uint64_t limit) {
    static ArithTables t;
    if (t.limit < limit) t = build_tables(limit);
    return t;
}

/* H = <g^p0>, p0 the smallest prime divisor of h; needs a cyclic group */
inline std::vector<int> subgroup_H(const ClassGroup& cg) {
    if (cg.h == 1) return {0};
    if (!cg.cyclic) throw std::domain_error("subgroup_H: class group not cyclic");
    int p0 = 2;
    while (cg.h % p0 != 0) ++p0;
    std::vector<int> H;
    int acc = 0, step = cg.power(cg.generator, p0);
    do {
        H.push_back(acc);
        acc = cg.compose(acc, step);
    } while (acc != 0);
    std::sort(H.begin(), H.end());
    return H;
}

} // namespace detail

/* Recomputes one paper table from scratch and compares cell by cell.
   Counts must match exactly; estimate cells within 0.05% relative; the
   exceptional estimate within +-1. */
inline VerifyResult verify_table(const GoldenTable& t, int threads = 1,
                                 uint64_t wirsing_prime_bound = 100000000) {
    VerifyResult res;
    res.id = t.id;
    auto fail = [&](const std::string& msg) {
        ++res.failures;
        res.diffs.push_back(t.id + ": " + msg);
    };

    ClassGroup cg = class_group(t.D);
    GenusStructure gs = genus_structure(cg);

    /* additional-information assertions (not counted as cells) */
    if (kronecker(t.D, (long long)t.q) != t.kron_Dq)
        fail("kronecker(D,q) mismatch");
    if (cg.h != t.h) fail("class number mismatch");
    if (gs.genus_count != t.genus_count) fail("genus count mismatch");
    if (t.r >= 0) {
        TupleFamily tf = exceptional_tuples(cg, t.form);
        if (tf.r != t.r) fail("tuple length r mismatch");
    }
    if (t.nu_H_q >= 0) {
        std::vector<int> H = detail::subgroup_H(cg);
        PrimeClassTable small = classify_primes(cg, std::max<uint64_t>(t.q, 50));
        uint16_t hmask = 0;
        for (int i : H) hmask |= uint16_t(1u << i);
        int nu = (small.mask_of(t.q) & hmask) ? 1 : 0;
        if (nu != t.nu_H_q) fail("nu_H(q) mismatch");
    }

    /* counts */
    RepBitmap bm;
    if (t.kind == GoldenTable::counts_Nprime) {
        int g0 = gs.genus_of_class[(size_t)cg.class_index(t.form)];
        std::vector<QuadForm> genus_forms;
        for (int i = 0; i < cg.h; ++i)
            if (gs.genus_of_class[(size_t)i] == g0) genus_forms.push_back(cg.reps[(size_t)i]);
        RepBitmap genus_bm = genus_bitmap(genus_forms, t.x, threads);
        RepBitmap form_bm = rep_bitmap(t.form, t.x, threads);
        bm = exceptional_bitmap(genus_bm, form_bm);
        bm = apply_masks(bm, true, 2 * t.D, detail::shared_tables(t.x));
    } else {
        bm = rep_bitmap(t.form, t.x, threads);
        if (t.kind == GoldenTable::counts_Bprime)
            bm = apply_masks(bm, true, 2 * t.D, detail::shared_tables(t.x));
    }
    ResidueCounts rc = count_residues(bm, t.q);
    for (uint64_t a = 0; a < t.q; ++a) {
        ++res.cells_checked;
        if (rc.counts[a] != t.counts[a])
            fail("count a=" + std::to_string(a) + ": got " +
                 std::to_string(rc.counts[a]) + ", expected " +
                 std::to_string(t.counts[a]));
    }

    /* estimate cells */
    for (auto& ge : t.estimates) {
        ++res.cells_checked;
        TwoTermEstimate e = two_term_estimate(t.D, t.q, ge.a, double(t.x));
        if (std::abs(e.main - ge.main) > 5e-4 * ge.main)
            fail("main term a=" + std::to_string(ge.a) + ": got " +
                 std::to_string(e.main) + ", expected " + std::to_string(ge.main));
        if (std::abs(e.two_term - ge.two) > 5e-4 * ge.two)
            fail("two-term a=" + std::to_string(ge.a) + ": got " +
                 std::to_string(e.two_term) + ", expected " + std::to_string(ge.two));
    }
    if (t.exc_estimate > 0.0) {
        ++res.cells_checked;
        PrimeClassTable pct = classify_primes(cg, wirsing_prime_bound, threads);
        std::vector<int> H = detail::subgroup_H(cg);
        WirsingConstants wc = wirsing_constants(cg, H, pct, wirsing_prime_bound);
        ExceptionalEstimate e =
            exceptional_estimate(cg, t.form, t.q, 1, double(t.x), pct, wc);
        if (std::abs(e.value - t.exc_estimate) > 1.0)
            fail("exceptional estimate: got " + std::to_string(e.value) +
                 ", expected " + std::to_string(t.exc_estimate));
    }
    return res;
}

/* report rendering shared by the CLI and the acceptance runner */
inline std::string render_counts(const ResidueCounts& rc,
                                 const std::vector<std::optional<TwoTermEstimate>>& est,
                                 bool markdown) {
    std::string out;
    bool has_est = !est.empty();
    if (markdown) {
        out += has_est ? "| a | count | main_term | two_term |\n|---|---|---|---|\n"
                       : "| a | count |\n|---|---|\n";
    } else {
        out += has_est ? "a,count,main_term,two_term\n" : "a,count\n";
    }
    for (uint64_t a = 0; a < rc.q; ++a) {
        std::string row;
        if (markdown) row += "| ";
        row += std::to_string(a);
        row += markdown ? " | " : ",";
        row += std::to_string(rc.counts[a]);
        if (has_est) {
            row += markdown ? " | " : ",";
            if (est[a]) {
                row += std::to_string((long long)std::llround(est[a]->main));
                row += markdown ? " | " : ",";
                row += std::to_string((long long)std::llround(est[a]->two_term));
            } else {
                row += markdown ? "- | -" : ",";
            }
        }
        if (markdown) row += " |";
        out += row + "\n";
    }
    return out;
}

} // namespace bqf
