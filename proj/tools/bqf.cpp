#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bqf/golden.hpp"

namespace {

struct Options {
    long long D = 0;
    std::string form_str;
    uint64_t limit = 0;
    uint64_t q = 1;
    bool estimates = false;
    bool squarefree = false;
    bool coprime_2d = false;
    int threads = 1;
    uint64_t prime_bound = 100000000;
    int k_max = 15;
    int class_idx = 0;
    std::string out_path;
    std::string format = "csv";
    std::string cache_path;
    std::string table_id = "all";
};

bqf::QuadForm parse_form(const Options& opt) {
    if (opt.form_str.empty()) {
        /* principal form of D */
        long long D = opt.D;
        return (((D % 2) + 2) % 2 == 0) ? bqf::QuadForm{1, 0, -D / 4}
                                        : bqf::QuadForm{1, 1, (1 - D) / 4};
    }
    long long a, b, c;
    if (std::sscanf(opt.form_str.c_str(), "%lld,%lld,%lld", &a, &b, &c) != 3)
        throw std::invalid_argument("--form expects a,b,c");
    bqf::QuadForm f{a, b, c};
    if (f.disc() != opt.D)
        throw std::invalid_argument("--form discriminant does not match --disc");
    return f;
}

void emit(const Options& opt, const std::string& text) {
    if (opt.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(opt.out_path);
        if (!out) throw std::runtime_error("cannot open output file: " + opt.out_path);
        out << text;
    }
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

bqf::PrimeClassTable obtain_pct(const bqf::ClassGroup& cg, uint64_t limit,
                                const Options& opt) {
    if (!opt.cache_path.empty() && std::filesystem::exists(opt.cache_path)) {
        bqf::PrimeClassTable t = bqf::load_prime_class_table(opt.cache_path);
        if (t.D == cg.D && t.limit >= limit) return t;
    }
    bqf::PrimeClassTable t = bqf::classify_primes(cg, limit, opt.threads);
    if (!opt.cache_path.empty()) bqf::save_prime_class_table(t, opt.cache_path);
    return t;
}

int cmd_sieve(const Options& opt) {
    bqf::QuadForm f = parse_form(opt);
    bqf::RepBitmap bm = bqf::rep_bitmap(f, opt.limit, opt.threads);
    if (opt.squarefree || opt.coprime_2d) {
        const bqf::ArithTables& tables = bqf::detail::shared_tables(opt.limit);
        bm = bqf::apply_masks(bm, opt.squarefree, opt.coprime_2d ? 2 * opt.D : 0, tables);
    }
    bqf::ResidueCounts rc = bqf::count_residues(bm, opt.q);
    std::vector<std::optional<bqf::TwoTermEstimate>> est;
    if (opt.estimates) {
        est.resize(opt.q);
        uint64_t pb = std::min<uint64_t>(opt.prime_bound, 10000000);
        for (uint64_t a = 0; a < opt.q; ++a) {
            try {
                est[a] = bqf::two_term_estimate(opt.D, opt.q, a, double(opt.limit), pb);
            } catch (const std::domain_error&) {
                est[a] = std::nullopt; /* non-coprime residue of composite q */
            }
        }
    }
    emit(opt, bqf::render_counts(rc, est, opt.format == "md"));
    return 0;
}

int cmd_constants(const Options& opt) {
    bqf::ClassGroup cg = bqf::class_group(opt.D);
    bqf::GenusStructure gs = bqf::genus_structure(cg);
    uint64_t lsd_pb = std::min<uint64_t>(opt.prime_bound, 10000000);
    bqf::LsdCoefficients lsd = bqf::lsd_coefficients(opt.D, lsd_pb);
    std::string out;
    char sep = (opt.format == "csv") ? ',' : '=';
    auto kv = [&](const std::string& k, const std::string& v) {
        out += k + sep + v + "\n";
    };
    kv("D", std::to_string(opt.D));
    kv("h", std::to_string(cg.h));
    kv("genera", std::to_string(gs.genus_count));
    kv("L1", fmt(lsd.l1));
    kv("A1", fmt(lsd.a_at_1));
    kv("a0", fmt(lsd.a0));
    kv("a1", fmt(lsd.a1));
    kv("a0_prime_bound", std::to_string(lsd.prime_bound));
    kv("a0_tail_bound", fmt(lsd.tail_bound));
    if (opt.q > 1) {
        bqf::ProgressionCoefficients pc =
            bqf::progression_coefficients(opt.D, opt.q, lsd_pb);
        kv("q", std::to_string(opt.q));
        kv("b0", fmt(pc.b0));
        kv("b1", fmt(pc.b1));
        for (uint64_t a = 0; a < opt.q; ++a) {
            if (pc.c[a].den == 0) continue;
            kv("c(" + std::to_string(opt.q) + "," + std::to_string(a) + ")",
               std::to_string(pc.c[a].num) + "/" + std::to_string(pc.c[a].den));
            if (!std::isnan(pc.delta[a]))
                kv("delta(" + std::to_string(opt.q) + "," + std::to_string(a) + ")",
                   fmt(pc.delta[a]));
        }
    }
    if (cg.h > 1 && cg.h % 2 == 1 && cg.cyclic) {
        bqf::QuadForm f = parse_form(opt);
        bqf::PrimeClassTable pct = obtain_pct(cg, opt.prime_bound, opt);
        std::vector<int> H = bqf::detail::subgroup_H(cg);
        bqf::WirsingConstants wc =
            bqf::wirsing_constants(cg, H, pct, opt.prime_bound, opt.k_max);
        kv("kappa", fmt(wc.kappa));
        kv("A3", fmt(wc.a3));
        kv("A3_tail_bound", fmt(wc.a3_tail));
        kv("A4", fmt(wc.a4));
        kv("A4_drift_span", fmt(std::abs(wc.drift[2] - wc.drift[0])));
        kv("wirsing_prime_bound", std::to_string(wc.prime_bound));
        kv("k_max", std::to_string(wc.k_max));
        if (opt.q > 1) {
            for (uint64_t a = 0; a < opt.q; ++a) {
                if (a != 0 && std::gcd(a, opt.q) != 1) continue;
                bqf::ExceptionalEstimate e = bqf::exceptional_estimate(
                    cg, f, opt.q, a, 1e8, pct, wc);
                kv("cprime(" + std::to_string(opt.q) + "," + std::to_string(a) + ")",
                   fmt(e.c_prime) + (e.negligible ? " (negligible)" : ""));
            }
            bqf::ExceptionalEstimate e =
                bqf::exceptional_estimate(cg, f, opt.q, 1, 1e8, pct, wc);
            kv("A2", fmt(e.a2));
        }
    }
    emit(opt, out);
    return 0;
}

int cmd_classgroup(const Options& opt) {
    bqf::ClassGroup cg = bqf::class_group(opt.D);
    bqf::GenusStructure gs = bqf::genus_structure(cg);
    std::string out;
    out += "D=" + std::to_string(opt.D) + " h=" + std::to_string(cg.h) +
           " cyclic=" + (cg.cyclic ? "yes" : "no") +
           " genera=" + std::to_string(gs.genus_count) +
           " mu=" + std::to_string(gs.mu) + "\n";
    for (int i = 0; i < cg.h; ++i) {
        auto& f = cg.reps[(size_t)i];
        out += std::to_string(i) + ": (" + std::to_string(f.a) + "," +
               std::to_string(f.b) + "," + std::to_string(f.c) + ")" +
               " order=" + std::to_string(cg.orders[(size_t)i]) +
               " genus=" + std::to_string(gs.genus_of_class[(size_t)i]) +
               (i == cg.generator ? " generator" : "") + "\n";
    }
    emit(opt, out);
    return 0;
}

int cmd_exceptional(const Options& opt) {
    bqf::ClassGroup cg = bqf::class_group(opt.D);
    bqf::GenusStructure gs = bqf::genus_structure(cg);
    bqf::QuadForm f = parse_form(opt);
    int g0 = gs.genus_of_class[(size_t)cg.class_index(f)];
    std::vector<bqf::QuadForm> genus_forms;
    for (int i = 0; i < cg.h; ++i)
        if (gs.genus_of_class[(size_t)i] == g0) genus_forms.push_back(cg.reps[(size_t)i]);
    bqf::RepBitmap genus_bm = bqf::genus_bitmap(genus_forms, opt.limit, opt.threads);
    bqf::RepBitmap form_bm = bqf::rep_bitmap(f, opt.limit, opt.threads);
    bqf::RepBitmap exc = bqf::exceptional_bitmap(genus_bm, form_bm);
    const bqf::ArithTables& tables = bqf::detail::shared_tables(opt.limit);
    exc = bqf::apply_masks(exc, true, 2 * opt.D, tables);
    bqf::ResidueCounts rc = bqf::count_residues(exc, opt.q);

    uint64_t pct_limit = std::max<uint64_t>(opt.prime_bound, opt.limit);
    bqf::PrimeClassTable pct = obtain_pct(cg, pct_limit, opt);
    std::vector<int> H = bqf::detail::subgroup_H(cg);
    bqf::WirsingConstants wc =
        bqf::wirsing_constants(cg, H, pct, opt.prime_bound, opt.k_max);
    bqf::TupleFamily tf = bqf::exceptional_tuples(cg, f);

    std::vector<uint64_t> conf(opt.q, 0), total(opt.q, 0);
    exc.bits.for_each([&](uint64_t n) {
        uint64_t a = n % opt.q;
        ++total[a];
        if (bqf::classify_exceptional(n, tf, pct, tables) == bqf::ExcClass::conforms)
            ++conf[a];
    });

    bool md = opt.format == "md";
    std::string out = md ? "| a | count | estimate | conformity_rate |\n|---|---|---|---|\n"
                         : "a,count,estimate,conformity_rate\n";
    for (uint64_t a = 0; a < opt.q; ++a) {
        bqf::ExceptionalEstimate e =
            bqf::exceptional_estimate(cg, f, opt.q, a, double(opt.limit), pct, wc);
        double rate = total[a] ? double(conf[a]) / double(total[a]) : 1.0;
        std::string sep = md ? " | " : ",";
        std::string row = md ? "| " : "";
        row += std::to_string(a) + sep + std::to_string(rc.counts[a]) + sep +
               std::to_string((long long)std::llround(e.value)) + sep + fmt(rate);
        if (md) row += " |";
        out += row + "\n";
    }
    emit(opt, out);
    return 0;
}

int cmd_classify(const Options& opt) {
    bqf::ClassGroup cg = bqf::class_group(opt.D);
    bqf::GenusStructure gs = bqf::genus_structure(cg);
    bqf::QuadForm f = parse_form(opt);
    int g0 = gs.genus_of_class[(size_t)cg.class_index(f)];
    std::vector<bqf::QuadForm> genus_forms;
    for (int i = 0; i < cg.h; ++i)
        if (gs.genus_of_class[(size_t)i] == g0) genus_forms.push_back(cg.reps[(size_t)i]);
    bqf::RepBitmap genus_bm = bqf::genus_bitmap(genus_forms, opt.limit, opt.threads);
    bqf::RepBitmap form_bm = bqf::rep_bitmap(f, opt.limit, opt.threads);
    bqf::RepBitmap exc = bqf::exceptional_bitmap(genus_bm, form_bm);
    const bqf::ArithTables& tables = bqf::detail::shared_tables(opt.limit);
    bqf::RepBitmap masked = bqf::apply_masks(exc, true, 2 * opt.D, tables);

    uint64_t pct_limit = std::max<uint64_t>(opt.prime_bound, opt.limit);
    bqf::PrimeClassTable pct = obtain_pct(cg, pct_limit, opt);
    bqf::TupleFamily tf = bqf::exceptional_tuples(cg, f);
    uint64_t conforms = 0, violates = 0;
    masked.bits.for_each([&](uint64_t n) {
        if (bqf::classify_exceptional(n, tf, pct, tables) == bqf::ExcClass::conforms)
            ++conforms;
        else
            ++violates;
    });
    uint64_t out_of_scope = exc.count() - masked.count();
    std::string out;
    out += "exceptional," + std::to_string(exc.count()) + "\n";
    out += "conforms," + std::to_string(conforms) + "\n";
    out += "violates," + std::to_string(violates) + "\n";
    out += "out_of_scope," + std::to_string(out_of_scope) + "\n";
    uint64_t in_scope = conforms + violates;
    out += "conformity_rate," + fmt(in_scope ? double(conforms) / double(in_scope) : 1.0) +
           "\n";
    emit(opt, out);
    return 0;
}

int cmd_primes(const Options& opt) {
    bqf::ClassGroup cg = bqf::class_group(opt.D);
    bqf::PrimeClassTable pct = obtain_pct(cg, opt.limit, opt);
    if (opt.class_idx < 0 || opt.class_idx >= cg.h)
        throw std::invalid_argument("--class out of range");
    auto rows = bqf::prime_equidistribution_report(cg, opt.class_idx, opt.q, opt.limit, pct);
    bool md = opt.format == "md";
    std::string out = md ? "| a | count | predicted |\n|---|---|---|\n"
                         : "a,count,predicted\n";
    for (auto& r : rows) {
        std::string sep = md ? " | " : ",";
        std::string row = md ? "| " : "";
        row += std::to_string(r.a) + sep + std::to_string(r.count) + sep +
               fmt(r.predicted);
        if (md) row += " |";
        out += row + "\n";
    }
    emit(opt, out);
    return 0;
}

int cmd_verify(const Options& opt) {
    std::vector<const bqf::GoldenTable*> targets;
    if (opt.table_id == "all") {
        for (auto& t : bqf::golden_tables()) targets.push_back(&t);
    } else {
        targets.push_back(&bqf::golden_table(opt.table_id));
    }
    int total_fail = 0;
    std::string out;
    for (auto* t : targets) {
        bqf::VerifyResult r = bqf::verify_table(*t, opt.threads, opt.prime_bound);
        out += r.id + ": " + std::to_string(r.cells_checked) + " cells checked, " +
               (r.failures ? std::to_string(r.failures) + " failures" : "pass") + "\n";
        for (auto& d : r.diffs) out += "  " + d + "\n";
        total_fail += r.failures;
    }
    emit(opt, out);
    return total_fail ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"distribution of integers represented by binary quadratic forms"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub, bool need_disc) {
        auto* d = sub->add_option("--disc", opt.D, "fundamental discriminant (negative)");
        if (need_disc) d->required();
        sub->add_option("--threads", opt.threads, "worker threads");
        sub->add_option("--out", opt.out_path, "write report to file");
        sub->add_option("--format", opt.format, "csv or md")
            ->check(CLI::IsMember({"csv", "md"}));
        sub->add_option("--prime-bound", opt.prime_bound, "prime bound for constants");
        sub->add_option("--cache", opt.cache_path, "prime class table cache file");
    };

    CLI::App* sieve = app.add_subcommand("sieve", "count represented integers by residue");
    add_common(sieve, true);
    sieve->add_option("--form", opt.form_str, "form a,b,c");
    sieve->add_option("--limit", opt.limit, "sieve limit x")->required();
    sieve->add_option("--mod", opt.q, "modulus q");
    sieve->add_flag("--estimates", opt.estimates, "append main/two-term columns");
    sieve->add_flag("--squarefree", opt.squarefree, "restrict to squarefree n");
    sieve->add_flag("--coprime-2d", opt.coprime_2d, "restrict to n coprime to 2D");

    CLI::App* constants = app.add_subcommand("constants", "numeric constants report");
    add_common(constants, true);
    constants->add_option("--form", opt.form_str, "form a,b,c");
    constants->add_option("--mod", opt.q, "modulus q");
    constants->add_option("--kmax", opt.k_max, "k-sum truncation for A3");

    CLI::App* classgroup = app.add_subcommand("classgroup", "class group structure");
    add_common(classgroup, true);

    CLI::App* exceptional = app.add_subcommand("exceptional",
                                               "exceptional integers by residue");
    add_common(exceptional, true);
    exceptional->add_option("--form", opt.form_str, "form a,b,c");
    exceptional->add_option("--limit", opt.limit, "sieve limit x")->required();
    exceptional->add_option("--mod", opt.q, "modulus q");
    exceptional->add_option("--kmax", opt.k_max, "k-sum truncation for A3");

    CLI::App* classify = app.add_subcommand("classify",
                                            "conformity of exceptional integers");
    add_common(classify, true);
    classify->add_option("--form", opt.form_str, "form a,b,c");
    classify->add_option("--limit", opt.limit, "sieve limit x")->required();

    CLI::App* primes = app.add_subcommand("primes", "prime classification report");
    add_common(primes, true);
    primes->add_option("--limit", opt.limit, "classification limit")->required();
    primes->add_option("--mod", opt.q, "modulus q");
    primes->add_option("--class", opt.class_idx, "class index");

    CLI::App* verify = app.add_subcommand("verify", "check the embedded paper tables");
    add_common(verify, false);
    verify->add_option("--table", opt.table_id, "table id or 'all'");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sieve->parsed()) return cmd_sieve(opt);
        if (constants->parsed()) return cmd_constants(opt);
        if (classgroup->parsed()) return cmd_classgroup(opt);
        if (exceptional->parsed()) return cmd_exceptional(opt);
        if (classify->parsed()) return cmd_classify(opt);
        if (primes->parsed()) return cmd_primes(opt);
        if (verify->parsed()) return cmd_verify(opt);
    } catch (const bqf::resource_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
