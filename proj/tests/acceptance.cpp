// Acceptance run: one PASS/FAIL line per criterion. Exits 0 unless --strict
// is given and some criterion fails, so the measurements stay visible in ctest.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "support.hpp"

using namespace qtbf;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::uint64_t trials = 100000;
    std::uint64_t bb_trials = 1000000;
    std::size_t workers = 0;
};

struct Result {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void note(const std::string& what) { notes.push_back("     " + what); }
};

template <class... T>
std::string cat(const T&... parts) {
    std::ostringstream s;
    (s << ... << parts);
    return s.str();
}

const std::vector<PatternSupport>& b1_structures() {
    static const std::vector<PatternSupport> s{{b1_s63(), true}, {b1_s49(), true}};
    return s;
}

const Census& b1_census() {
    static const Census c = census(b1_graph(), b1());
    return c;
}

/// Union of all census structures labelled (a, b), whatever their seed cycle.
std::vector<TrappingSet> structures(const Census& c, std::size_t a, std::size_t b) {
    std::set<TrappingSet> out;
    for (const auto& e : c.terminals) {
        if (e.a == a && e.b == b) out.insert(e.structures.begin(), e.structures.end());
    }
    return {out.begin(), out.end()};
}

/// True iff the sets are disjoint and cover [lo, hi) exactly.
bool partitions(const std::vector<TrappingSet>& sets, std::size_t lo, std::size_t hi) {
    std::vector<int> hits(hi - lo, 0);
    for (const auto& s : sets) {
        for (auto v : s.vars) {
            if (v < lo || v >= hi) return false;
            ++hits[v - lo];
        }
    }
    return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

bool repeats_a_state(const Trajectory& t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (std::size_t j = i + 1; j < t.size(); ++j) {
            if (t[i] == t[j]) return true;
        }
    }
    return false;
}

/// Patterns of weight j on the B1 structures that no decoder of the set corrects.
std::size_t count_failures(const std::vector<FVector>& set, std::size_t j, std::size_t workers) {
    const PatternJudge judge(b1(), 50);
    std::vector<TwoBitDecoder> decoders;
    for (auto f : set) decoders.emplace_back(judge.graph(), DecoderSpec::two_bit(f.to_string(), f));
    const auto patterns = collect_patterns(b1_structures(), j);
    std::vector<char> failed(patterns.size(), 0);
    parallel_for(patterns.size(), workers, [&](std::size_t i) {
        failed[i] = std::none_of(decoders.begin(), decoders.end(),
                                 [&](const TwoBitDecoder& d) { return judge.corrects(d, patterns[i]); });
    });
    return static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Result construction(const Options&) {
    Result r;
    const auto start = std::chrono::steady_clock::now();
    const auto code = load_code_spec(std::string(QTBF_CONFIG_DIR) + "/b1.code");
    const auto report = validate_css(code);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.require(code.n() == 882, cat("n = ", code.n()));
    r.require(code.hz.rows() == 441, cat("Z-checks = ", code.hz.rows()));
    r.require(report.hz.columns == std::map<std::size_t, std::size_t>{{3, 882}}, "every column of H_Z has degree 3");
    r.require(report.hz.rows == std::map<std::size_t, std::size_t>{{6, 441}}, "every row of H_Z has degree 6");
    r.require(report.commutes, "H_X H_Z^T = 0");
    r.require(secs < 1.0, cat("construction and validation took ", secs, " s"));
    return r;
}

Result graph_structure(const Options&) {
    Result r;
    const auto& g = b1_graph();
    const std::size_t half = b1().circulant_boundary;
    r.require(girth(g) == 6, cat("girth = ", girth(g)));

    const auto six = enumerate_cycles(g, 6);
    const bool six_in_block = std::all_of(six.begin(), six.end(), [&](const Cycle& c) {
        const auto v = c.variables();
        return v.back() < half || v.front() >= half;
    });
    r.require(six_in_block, cat("all ", six.size(), " 6-cycles stay inside one block"));

    const auto eight = enumerate_cycles(g, 8);
    const bool eight_span = std::all_of(eight.begin(), eight.end(), [&](const Cycle& c) {
        const auto v = c.variables();
        return v.front() < half && v.back() >= half;
    });
    r.require(eight_span, cat("all ", eight.size(), " 8-cycles span both blocks"));

    std::vector<std::size_t> on_eight(g.num_vars(), 0);
    for (const auto& c : eight) {
        for (auto v : c.variables()) ++on_eight[v];
    }
    const auto [lo8, hi8] = std::minmax_element(on_eight.begin(), on_eight.end());
    r.require(*lo8 == 18 && *hi8 == 18, cat("8-cycles per variable in [", *lo8, ", ", *hi8, "]"));

    const auto& m = b1_census().stabilizer_membership;
    const auto [lo6, hi6] = std::minmax_element(m.begin(), m.end());
    r.require(*lo6 == 3 && *hi6 == 3, cat("(6,0) supports per variable in [", *lo6, ", ", *hi6, "]"));
    return r;
}

Result census_check(const Options&) {
    Result r;
    const auto& c = b1_census();
    const std::size_t half = b1().circulant_boundary;
    const auto big = structures(c, 63, 63);
    const auto small = structures(c, 49, 49);
    r.require(big.size() == 7, cat(big.size(), " (63,63) structures"));
    r.require(partitions(big, 0, half), "(63,63) structures partition the first variable block");
    r.require(small.size() == 9, cat(small.size(), " (49,49) structures"));
    r.require(partitions(small, half, b1().n()), "(49,49) structures partition the second variable block");

    std::set<std::vector<Index>> rows;
    for (std::size_t i = 0; i < b1().hx.rows(); ++i) {
        const auto s = b1().hx.row(i).support();
        rows.insert({s.begin(), s.end()});
    }
    std::set<std::vector<Index>> six_zero;
    for (const auto& s : structures(c, 6, 0)) six_zero.insert(s.vars);
    r.require(six_zero == rows, cat(six_zero.size(), " (6,0) supports, equal to the ", rows.size(), " H_X row supports"));
    const bool all_symmetric = std::all_of(six_zero.begin(), six_zero.end(), [&](const std::vector<Index>& s) {
        return is_symmetric_stabilizer(b1_graph(), b1(), s);
    });
    r.require(all_symmetric && c.symmetric_stabilizers.size() == six_zero.size(),
              "every (6,0) support passes is_symmetric_stabilizer");
    return r;
}

VarState state_from(const std::string& bits) {
    return static_cast<VarState>((bits[0] == '1' ? 2 : 0) | (bits[1] == '1' ? 1 : 0));
}

Result truth_tables(const Options&) {
    Result r;
    const bool phi_ok = phi(false, false) == CheckState::ZeroOld && phi(false, true) == CheckState::OneNew &&
                        phi(true, false) == CheckState::ZeroNew && phi(true, true) == CheckState::OneOld;
    r.require(phi_ok, "phi on its four cases");

    // Rows 01, 00, 11, 10; columns chi1 = 0..3. Tuples chosen so no flag applies.
    const std::array<std::string, 4> labels{"01", "00", "11", "10"};
    const std::array<std::string, 4> table_one{"01 01 00 11", "01 10 11 11", "11 11 10 01", "11 00 01 01"};
    const std::array<std::string, 4> table_three{"01 01 00 00", "01 10 11 11", "11 11 10 10", "11 00 01 01"};
    const std::array<CheckTuple, 4> plain{CheckTuple{3, 0, 0}, CheckTuple{1, 1, 0}, CheckTuple{1, 0, 0}, CheckTuple{0, 0, 0}};
    auto matches = [&](const std::array<std::string, 4>& table, const PsiTable& psi) {
        std::size_t ok = 0;
        for (std::size_t row = 0; row < 4; ++row) {
            for (unsigned chi1 = 0; chi1 < 4; ++chi1) {
                const auto got = var_update(state_from(labels[row]), plain[chi1], chi1, FVector{}, psi);
                ok += got == state_from(table[row].substr(chi1 * 3, 2));
            }
        }
        return ok;
    };
    const auto one = matches(table_one, tables::base());
    const auto three = matches(table_three, tables::delayed());
    r.require(one == 16, cat("Table I entries reproduced: ", one, "/16"));
    r.require(three == 16, cat("Table III entries reproduced: ", three, "/16"));

    const std::array<std::string, 8> published{"0100011010", "0000000000", "0000100000", "0000010000",
                                               "1100000011", "0001000001", "1100001100", "0100010111"};
    std::size_t same = 0;
    for (std::size_t i = 0; i < 8; ++i) same += named_decoder("D" + std::to_string(i + 1), 441).rules.at(0).f.to_string() == published[i];
    r.require(same == 8, cat("Table II f-vectors reproduced: ", same, "/8"));
    return r;
}

Result named_behaviours(const Options&) {
    Result r;
    const auto& g = b1_graph();
    const auto d1 = named_decoder("D1", b1().circulant_boundary);
    const std::size_t n = g.num_vars();

    // BF on the all-error pattern of every (3,3) set.
    std::size_t stalls = 0;
    const auto six = enumerate_cycles(g, 6);
    for (const auto& c : six) {
        Trajectory t;
        const auto res = bf_decode(g, syndrome_of(g, c.variables()), 50, &t);
        stalls += !res.converged && !t.empty() && t.front().none();
    }
    r.require(stalls == six.size(), cat("BF flips nothing on ", stalls, "/", six.size(), " (3,3) all-error patterns"));

    // BF and D1 on the weight-2 patterns of every (4,4) set.
    std::size_t sets = 0, diag = 0, diag_osc = 0, diag_d1_one = 0, pairs_osc = 0, pairs = 0;
    for (const auto& c : enumerate_cycles(g, 8)) {
        const auto vars = c.variables();
        if (classify(g, vars).b != 4) continue;
        ++sets;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            for (std::size_t j = i + 1; j < vars.size(); ++j) {
                const std::vector<Index> p{vars[i], vars[j]};
                const auto s = syndrome_of(g, p);
                Trajectory t;
                const auto bf = bf_decode(g, s, 50, &t);
                const bool osc = !bf.converged && repeats_a_state(t);
                ++pairs;
                pairs_osc += osc;
                if (classify(g, p).b != 6) continue;  // adjacent pair: the two variables share a check
                ++diag;
                diag_osc += osc;
                const auto res = tbf_decode(g, s, 50, d1);
                diag_d1_one += res.converged && res.iterations == 1 && res.estimate == pattern_vector(n, p);
            }
        }
    }
    r.require(diag_osc == diag, cat("BF oscillates on ", diag_osc, "/", diag, " diagonal pairs of ", sets, " (4,4) sets"));
    r.require(pairs_osc == 6 * sets,
              cat("BF oscillates on ", pairs_osc, "/", pairs, " weight-2 patterns of those sets (claimed: all 6 per set)"));
    r.require(diag_d1_one == diag, cat("D1 corrects ", diag_d1_one, "/", diag, " diagonal pairs in 1 iteration"));

    // D1 on the weight-3 BF failures inside the structures, grouped into the
    // five classes by (b, residual weight after BF's first iteration).
    struct Class {
        const char* label;
        std::size_t b, residual, expected;
        std::map<std::string, std::size_t> outcomes;
    };
    std::vector<Class> classes{{"(3,3)", 3, 3, 5, {}}, {"(3,5)", 5, 0, 4, {}}, {"(3,7)", 7, 0, 1, {}},
                               {"(3,9) residual 3", 9, 3, 1, {}}, {"(3,9) residual 4", 9, 4, 1, {}}};
    std::size_t unclassified = 0;
    for (const auto& p : collect_patterns(b1_structures(), 3)) {
        const auto e = pattern_vector(n, p);
        const auto s = syndrome_of(g, p);
        Trajectory t;
        const auto bf = bf_decode(g, s, 50, &t);
        if (bf.converged && bf.estimate == e) continue;
        const std::size_t b = classify(g, p).b;
        const std::size_t residual = t.empty() ? 0 : (t.front() ^ e).weight();
        Class* cls = nullptr;
        for (auto& k : classes) {
            if (k.b == b && (k.residual == 0 || k.residual == residual)) cls = &k;
        }
        if (cls == nullptr) {
            ++unclassified;
            continue;
        }
        const auto res = tbf_decode(g, s, 50, d1);
        const bool ok = res.converged && res.estimate == e;
        ++cls->outcomes[ok ? cat(res.iterations, " it") : std::string("not corrected")];
    }
    r.require(unclassified == 0, cat(unclassified, " weight-3 BF failures outside the five classes"));
    for (const auto& k : classes) {
        std::string seen;
        for (const auto& [what, count] : k.outcomes) seen += cat(seen.empty() ? "" : ", ", count, "x ", what);
        const bool exact = k.outcomes.size() == 1 && k.outcomes.begin()->first == cat(k.expected, " it");
        r.require(exact, cat("D1 on class ", k.label, ": expected ", k.expected, " it, measured ", seen.empty() ? "none" : seen));
    }
    return r;
}

Result quantum_trapping_sets(const Options& opts) {
    Result r;
    const auto& code = b1();
    const OutcomeClassifier cls(code);
    const TwoBitDecoder d9(b1_graph(), named_decoder("D9", code.circulant_boundary));
    const auto supports = structures(b1_census(), 6, 0);
    std::vector<std::size_t> failures(supports.size(), 0);
    parallel_for(supports.size(), opts.workers, [&](std::size_t i) {
        const auto& vars = supports[i].vars;
        for (std::uint32_t mask = 1; mask < (1U << vars.size()); ++mask) {
            std::vector<Index> p;
            for (std::size_t k = 0; k < vars.size(); ++k) {
                if ((mask >> k) & 1U) p.push_back(vars[k]);
            }
            const auto e = pattern_vector(code.n(), p);
            const auto res = d9.decode(syndrome(code.hz, e), 50);
            failures[i] += !is_success(cls.classify(e, res.estimate, res.converged));
        }
    });
    const auto total = std::accumulate(failures.begin(), failures.end(), std::size_t{0});
    r.require(supports.size() == 441, cat(supports.size(), " (6,0) supports"));
    r.require(total == 0, cat("D9 fails on ", total, " of ", 63 * supports.size(), " nonzero patterns"));
    return r;
}

Result classical_guarantee(const Options& opts) {
    Result r;
    const auto& t2 = fvectors::table_ii();
    for (std::size_t j = 1; j <= 3; ++j) {
        const auto f = count_failures({t2[0]}, j, opts.workers);
        r.require(f == 0, cat("{D1}, weight ", j, ": ", f, " failures of ", collect_patterns(b1_structures(), j).size()));
    }
    const auto f4 = count_failures({t2[0], t2[1], t2[2]}, 4, opts.workers);
    r.require(f4 == 0, cat("{D1,D2,D3}, weight 4: ", f4, " failures of ", collect_patterns(b1_structures(), 4).size()));
    const auto f5 = count_failures({t2.begin(), t2.end()}, 5, opts.workers);
    r.require(f5 == 0, cat("{D1..D8}, weight 5: ", f5, " failures of ", pattern_count(63, 5, true) + pattern_count(49, 5, true)));
    return r;
}

Result set_generation(const Options& opts) {
    Result r;
    GenerateOptions g;
    g.workers = opts.workers;
    const auto result = generate_set(4, b1_structures(), b1(), g);
    std::string members;
    for (auto f : result.trace.chosen) members += " " + f.to_string();
    r.note("chosen:" + members);
    r.require(result.achieved_weight == 4, cat("achieved weight ", result.achieved_weight));
    const auto left = replay_failures(result.trace.chosen, 4, b1_structures(), b1(), g);
    r.require(left.empty(), cat("replay to weight 4 leaves ", left.size(), " failures"));
    if (result.trace.chosen.size() < 2) {
        r.require(false, "no member after D1");
        return r;
    }
    const PatternJudge judge(b1(), 50);
    const TwoBitDecoder d1(judge.graph(), DecoderSpec::two_bit("D1", fvectors::table_ii()[0]));
    const TwoBitDecoder second(judge.graph(), DecoderSpec::two_bit("second", result.trace.chosen[1]));
    const auto patterns = collect_patterns(b1_structures(), 4);
    std::vector<char> d1_fails(patterns.size(), 0), missed(patterns.size(), 0);
    parallel_for(patterns.size(), opts.workers, [&](std::size_t i) {
        d1_fails[i] = !judge.corrects(d1, patterns[i]);
        missed[i] = d1_fails[i] && !judge.corrects(second, patterns[i]);
    });
    const auto base = std::count(d1_fails.begin(), d1_fails.end(), 1);
    const auto miss = std::count(missed.begin(), missed.end(), 1);
    r.require(miss == 0, cat("first member after D1 (", result.trace.chosen[1].to_string(), ") misses ", miss, " of {D1}'s ",
                             base, " weight-4 failures"));
    return r;
}

Result monte_carlo_ordering(const Options& opts) {
    Result r;
    McOptions mc;
    mc.seed = 2024;
    mc.workers = opts.workers;
    const std::size_t boundary = b1().circulant_boundary;
    std::map<std::string, std::map<double, Stats>> st;
    for (const char* name : {"D24", "D4", "D1", "BF"}) {
        for (double p : {0.02, 0.01}) {
            st[name][p] = run_mc(b1(), builtin_ensemble(name, boundary), p, opts.trials, mc);
            const auto& s = st[name][p];
            r.note(cat(name, " p=", p, ": ", s.frame_errors, "/", s.trials, " FER ", s.fer(), " CI [", s.ci().lo, ", ",
                       s.ci().hi, "] avg it ", s.avg_iterations()));
        }
    }
    auto compare = [&](const std::string& better, const std::string& worse, bool strict) {
        bool ordered = true, separated = false;
        for (double p : {0.02, 0.01}) {
            const auto& a = st[better][p];
            const auto& b = st[worse][p];
            ordered = ordered && (strict ? a.fer() < b.fer() : a.fer() <= b.fer());
            separated = separated || a.ci().hi < b.ci().lo;
        }
        r.require(ordered && separated, cat("FER(", better, ") ", strict ? "<" : "<=", " FER(", worse,
                                            ") at both p, intervals separated at one p or more"));
    };
    compare("D24", "D4", false);
    compare("D4", "D1", false);
    compare("D4", "BF", true);
    return r;
}

Result reproducibility(const Options&) {
    Result r;
    const auto dir = fs::temp_directory_path() / "qtbf_acceptance";
    fs::create_directories(dir);
    const std::string base = std::string("\"") + QTBF_CLI_PATH + "\" simulate --code " + QTBF_CONFIG_DIR +
                             "/b1.code --ensemble D4,BF,NMS --p 0.03,0.02 --trials 3000 --seed 99";
    for (const std::string format : {"csv", "json"}) {
        std::vector<std::string> outputs;
        for (int workers : {1, 2, 4}) {
            const auto out = dir / cat("out_", workers, ".", format);
            const auto plot = dir / cat("plot_", workers, ".txt");
            const std::string cmd = base + " --format " + format + cat(" --workers ", workers) + " --out \"" + out.string() +
                                    "\" --plot-data \"" + plot.string() + "\" > /dev/null 2>&1";
            if (std::system(cmd.c_str()) != 0) {
                r.require(false, "simulate exited with an error: " + cmd);
                return r;
            }
            outputs.push_back(read_file(out) + read_file(plot));
        }
        const bool same = std::all_of(outputs.begin(), outputs.end(), [&](const std::string& o) { return o == outputs.front(); });
        r.require(same && !outputs.front().empty(), format + " and plot files identical for --workers 1, 2, 4");
    }
    return r;
}

Result bivariate_bicycle(const Options& opts) {
    Result r;
    const auto code = load_code_spec(std::string(QTBF_CONFIG_DIR) + "/bb288.code");
    const auto report = validate_css(code);
    r.require(report.pass() && code.n() == 288, cat("BB288 validates (n = ", code.n(), ")"));
    const auto c = census(build_graph(code.hz), code);
    r.require(!c.symmetric_stabilizers.empty(), cat("census finds ", c.symmetric_stabilizers.size(), " symmetric stabilizers"));
    McOptions mc;
    mc.seed = 2024;
    mc.workers = opts.workers;
    const auto ours = run_mc(code, builtin_ensemble("D24", code.circulant_boundary), 0.01, opts.bb_trials, mc);
    const auto nms = run_mc(code, builtin_ensemble("NMS", code.circulant_boundary), 0.01, opts.bb_trials, mc);
    for (const auto* s : {&ours, &nms}) {
        r.note(cat(s == &ours ? "D24" : "NMS", ": ", s->frame_errors, "/", s->trials, " FER ", s->fer(), " CI [", s->ci().lo,
                   ", ", s->ci().hi, "] avg it ", s->avg_iterations()));
    }
    const bool separated = ours.ci().hi < nms.ci().lo;
    const bool ratio = nms.fer() >= 3.0 * ours.fer() && nms.frame_errors > 0;
    r.require(separated && ratio, "FER(D24) < FER(NMS) at p = 0.01, intervals separated, ratio at least 3");
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    Options opts;
    bool strict = false;
    std::vector<int> only;
    app.add_option("--trials", opts.trials, "Monte-Carlo trials per point on B1")->capture_default_str();
    app.add_option("--bb-trials", opts.bb_trials, "Monte-Carlo trials per decoder on BB288")->capture_default_str();
    app.add_option("--workers", opts.workers, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--only", only, "Run only these criteria");
    std::string report;
    app.add_flag("--strict", strict, "Exit with status 1 if any criterion fails");
    app.add_option("--report", report, "Also write the results to this file");
    CLI11_PARSE(app, argc, argv);
    std::ofstream report_file;
    if (!report.empty()) report_file.open(report);

    const std::vector<std::function<Result(const Options&)>> criteria{
        construction,          graph_structure,      census_check,         truth_tables,
        named_behaviours,      quantum_trapping_sets, classical_guarantee, set_generation,
        monte_carlo_ordering,  reproducibility,      bivariate_bicycle};

    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Result res;
        try {
            res = criteria[i](opts);
        } catch (const std::exception& e) {
            res.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        all = all && res.pass;
        std::ostringstream text;
        text << "CRITERION " << id << ' ' << (res.pass ? "PASS" : "FAIL") << " (" << std::fixed << std::setprecision(1) << secs
             << " s)\n";
        for (const auto& n : res.notes) text << "    " << n << '\n';
        std::cout << text.str() << std::flush;
        if (report_file) report_file << text.str() << std::flush;
    }
    return strict && !all ? 1 : 0;
}
