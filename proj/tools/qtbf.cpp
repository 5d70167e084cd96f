#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qtbf/qtbf.hpp"

namespace fs = std::filesystem;
using namespace qtbf;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kConfigError = 2, kTargetMissed = 3, kInvariant = 4 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t x) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << x;
    return os.str();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Canonical configuration: the command, its result-affecting options in a
/// fixed order, and the contents (not the paths) of every input file.
class Canon {
public:
    explicit Canon(std::string command) { text_ = "command=" + command + "\n"; }
    Canon& add(const std::string& key, const std::string& value) {
        text_ += key + "=" + value + "\n";
        return *this;
    }
    Canon& file(const std::string& key, const fs::path& path) { return add(key, hex64(fnv1a(slurp(path)))); }
    std::string hash() const { return hex64(fnv1a(text_)); }

private:
    std::string text_;
};

std::string header_line(std::uint64_t seed, const Canon& canon) {
    return std::string("# qtbf ") + kVersion + " seed=" + std::to_string(seed) + " config=" + canon.hash();
}

/// Writes to --out when given, otherwise to standard output.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw ConfigError("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

CssCode load_code(const std::string& path) {
    if (path.empty()) throw ConfigError("--code is required");
    return load_code_spec(path);
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<Ensemble> load_ensembles(const std::string& list, const CssCode& code, Canon& canon) {
    std::vector<Ensemble> out;
    for (const auto& item : split_commas(list)) {
        if (fs::is_regular_file(item)) {
            out.push_back(read_ensemble_file(item, code.circulant_boundary));
            canon.file("ensemble-file", item);
        } else {
            out.push_back(builtin_ensemble(item, code.circulant_boundary));
            canon.add("ensemble", item);
        }
    }
    if (out.empty()) throw ConfigError("--ensemble names no ensemble");
    return out;
}

std::vector<double> parse_p_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_commas(text)) {
        std::size_t pos = 0;
        double p = 0;
        try {
            p = std::stod(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size() || !(p >= 0.0 && p <= 1.0)) throw ConfigError("--p: bad probability '" + item + "'");
        out.push_back(p);
    }
    if (out.empty()) throw ConfigError("--p is required");
    return out;
}

std::string join(const std::vector<Index>& vars) {
    std::string out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(vars[i]);
    }
    return out;
}

/// One index list per line; anything up to a ':' is a label and is skipped.
std::vector<std::vector<Index>> read_index_lists(const fs::path& path) {
    std::istringstream in(slurp(path));
    std::vector<std::vector<Index>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (auto colon = line.find(':'); colon != std::string::npos) line.erase(0, colon + 1);
        std::istringstream ls(line);
        std::vector<Index> vars;
        for (std::string tok; ls >> tok;) {
            try {
                std::size_t pos = 0;
                const unsigned long v = std::stoul(tok, &pos);
                if (pos != tok.size()) throw std::invalid_argument(tok);
                vars.push_back(static_cast<Index>(v));
            } catch (const std::exception&) {
                throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad index '" + tok + "'");
            }
        }
        if (!vars.empty()) out.push_back(std::move(vars));
    }
    return out;
}

void check_indices(const std::vector<Index>& vars, std::size_t n, const std::string& what) {
    for (auto v : vars) {
        if (v >= n) throw ConfigError(what + ": index " + std::to_string(v) + " out of range");
    }
}

BitVector read_bits(const fs::path& path, std::size_t expected) {
    std::istringstream in(slurp(path));
    std::string bits, line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        for (char ch : line) {
            if (ch == '0' || ch == '1') bits += ch;
            else if (!std::isspace(static_cast<unsigned char>(ch))) throw ConfigError(path.string() + ": expected 0/1 characters");
        }
    }
    if (bits.size() != expected) {
        throw ConfigError(path.string() + ": expected " + std::to_string(expected) + " bits, got " + std::to_string(bits.size()));
    }
    return BitVector::from_string(bits);
}

struct Common {
    std::string code;
    std::string out;
    std::string format = "csv";
    std::size_t max_iters = 50;
    std::uint64_t seed = 1;
    std::size_t workers = 0;
};

int cmd_code_build(const Common& o, const std::string& matrix_format) {
    const CssCode code = load_code(o.code);
    if (o.out.empty()) throw ConfigError("code build needs --out <directory>");
    fs::create_directories(o.out);
    Canon canon("code-build");
    canon.file("code", o.code).add("matrix-format", matrix_format);
    for (const auto& [name, m] : {std::pair<const char*, const BinaryMatrix*>{"hx", &code.hx}, {"hz", &code.hz}}) {
        std::ofstream f(fs::path(o.out) / (std::string(name) + ".txt"), std::ios::binary);
        if (!f) throw ConfigError("cannot write into " + o.out);
        f << header_line(0, canon) << '\n';
        if (matrix_format == "sparse") write_sparse(f, *m);
        else write_dense(f, *m);
    }
    std::cerr << code.name << ": H_X " << code.hx.rows() << "x" << code.hx.cols() << ", H_Z " << code.hz.rows() << "x"
              << code.hz.cols() << " written to " << o.out << "\n";
    return kOk;
}

std::string histogram(const std::map<std::size_t, std::size_t>& h) {
    std::string out;
    for (auto [d, count] : h) out += (out.empty() ? "" : " ") + std::to_string(d) + ":" + std::to_string(count);
    return out;
}

int cmd_code_validate(const Common& o) {
    const CssCode code = load_code(o.code);
    const CssReport r = validate_css(code);
    Canon canon("code-validate");
    canon.file("code", o.code);
    Output out(o.out);
    auto& os = out.stream();
    os << header_line(0, canon) << '\n';
    os << "name " << code.name << '\n';
    os << "n " << code.n() << '\n';
    os << "hx " << code.hx.rows() << ' ' << code.hx.cols() << '\n';
    os << "hz " << code.hz.rows() << ' ' << code.hz.cols() << '\n';
    os << "commutes " << (r.commutes ? "yes" : "no") << '\n';
    const std::size_t k = code.n() - gf2_rank(code.hx) - gf2_rank(code.hz);
    const bool k_ok = !code.k || *code.k == k;
    os << "k " << k;
    if (code.k) os << " declared " << *code.k;
    os << '\n';
    os << "hx-column-degrees " << histogram(r.hx.columns) << '\n';
    os << "hx-row-degrees " << histogram(r.hx.rows) << '\n';
    os << "hz-column-degrees " << histogram(r.hz.columns) << '\n';
    os << "hz-row-degrees " << histogram(r.hz.rows) << '\n';
    const bool pass = r.pass() && k_ok;
    os << (pass ? "pass" : "fail") << '\n';
    std::cerr << code.name << ": " << (pass ? "pass" : "fail") << "\n";
    return pass ? kOk : kConfigError;
}

int cmd_cycles(const Common& o, std::size_t length) {
    const CssCode code = load_code(o.code);
    const TannerGraph g = build_graph(code.hz);
    const auto cycles = enumerate_cycles(g, length);
    Canon canon("tsa-cycles");
    canon.file("code", o.code).add("length", std::to_string(length));
    Output out(o.out);
    auto& os = out.stream();
    os << header_line(0, canon) << '\n';
    for (const auto& c : cycles) {
        os << c.length();
        for (std::size_t i = 0; i < c.vertices.size(); ++i) os << ' ' << (i % 2 == 0 ? 'v' : 'c') << c.vertices[i];
        os << '\n';
    }
    std::cerr << cycles.size() << " cycles of length " << length << "\n";
    return kOk;
}

int cmd_census(const Common& o, std::size_t max_size) {
    const CssCode code = load_code(o.code);
    const TannerGraph g = build_graph(code.hz);
    const Census cs = census(g, code, max_size);
    Canon canon("tsa-census");
    canon.file("code", o.code).add("max-size", std::to_string(max_size));
    Output out(o.out);
    auto& os = out.stream();
    os << header_line(0, canon) << '\n';
    os << "# girth " << (cs.girth == kInfiniteGirth ? std::string("inf") : std::to_string(cs.girth)) << ", " << cs.short_cycles
       << " shortest cycles, " << cs.next_cycles << " next-shortest cycles\n";
    for (const auto& e : cs.terminals) {
        for (const auto& s : e.structures) os << e.a << ' ' << e.b << ' ' << e.origin << ": " << join(s.vars) << '\n';
    }
    for (const auto& s : cs.symmetric_stabilizers) os << s.a << ' ' << s.b << " symmetric-stabilizer: " << join(s.vars) << '\n';
    for (const auto& e : cs.terminals) {
        std::cerr << e.structures.size() << " x (" << e.a << "," << e.b << ") from " << e.origin << " seeds\n";
    }
    std::cerr << cs.symmetric_stabilizers.size() << " symmetric stabilizers\n";
    return kOk;
}

int cmd_expand(const Common& o, const std::string& parent_path, std::size_t max_size) {
    const CssCode code = load_code(o.code);
    const TannerGraph g = build_graph(code.hz);
    const auto lists = read_index_lists(parent_path);
    if (lists.size() != 1) throw ConfigError("--parent must hold exactly one index list");
    check_indices(lists[0], g.num_vars(), "--parent");
    const auto path = expand_to_terminal(g, classify(g, lists[0]), max_size, seed_domain(g, code.circulant_boundary, lists[0]));
    Canon canon("tsa-expand");
    canon.file("code", o.code).file("parent", parent_path).add("max-size", std::to_string(max_size));
    Output out(o.out);
    auto& os = out.stream();
    os << header_line(0, canon) << '\n';
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        os << "# step " << i << " (" << path[i].a << "," << path[i].b << "): " << join(path[i].vars) << '\n';
    }
    os << path.back().a << ' ' << path.back().b << " terminal: " << join(path.back().vars) << '\n';
    std::cerr << "(" << path.front().a << "," << path.front().b << ") -> (" << path.back().a << "," << path.back().b << ") in "
              << path.size() - 1 << " steps\n";
    return kOk;
}

int cmd_decode(const Common& o, const std::string& ensemble, const std::string& syndrome_path, const std::string& error_path,
               double prior) {
    const CssCode code = load_code(o.code);
    Canon canon("decode");
    canon.file("code", o.code).file("syndrome", syndrome_path).add("max-iters", std::to_string(o.max_iters));
    const auto ensembles = load_ensembles(ensemble, code, canon);
    if (ensembles.size() != 1) throw ConfigError("decode takes a single ensemble");
    const BitVector s = read_bits(syndrome_path, code.hz.rows());
    const EnsembleDecoder dec(code, ensembles[0], prior);
    const auto results = dec.run(s, o.max_iters);
    std::optional<Outcome> outcome;
    if (!error_path.empty()) {
        canon.file("error", error_path);
        outcome = dec.decode(read_bits(error_path, code.n()), s, o.max_iters);
    }
    Output out(o.out);
    auto& os = out.stream();
    os << header_line(0, canon) << '\n';
    os << "member,converged,iterations,estimate\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        os << ensembles[0].members[i].name << ',' << (results[i].converged ? 1 : 0) << ',' << results[i].iterations << ','
           << results[i].estimate.to_string() << '\n';
    }
    if (outcome) {
        os << "# verdict " << to_string(outcome->verdict) << " winner "
           << (outcome->winner ? ensembles[0].members[*outcome->winner].name : std::string("none")) << " iterations "
           << outcome->iterations_used << '\n';
    }
    std::size_t converged = 0;
    for (const auto& r : results) converged += r.converged;
    std::cerr << converged << " of " << results.size() << " members converged\n";
    return kOk;
}

int cmd_genset(const Common& o, std::size_t t, const std::string& supports_path, bool pin, std::optional<std::size_t> budget) {
    const CssCode code = load_code(o.code);
    const auto lists = read_index_lists(supports_path);
    if (lists.empty()) throw ConfigError("--supports file lists no structures");
    std::vector<PatternSupport> supports;
    for (const auto& l : lists) {
        check_indices(l, code.n(), "--supports");
        supports.push_back({l, pin});
    }
    Canon canon("genset");
    canon.file("code", o.code).file("supports", supports_path).add("t", std::to_string(t)).add("pin", pin ? "1" : "0");
    canon.add("budget", budget ? std::to_string(*budget) : "none").add("max-iters", std::to_string(o.max_iters));
    GenerateOptions opts;
    opts.max_iters = o.max_iters;
    opts.budget = budget;
    opts.workers = o.workers;
    const GenerateResult res = generate_set(t, supports, code, opts);

    Output out(o.out);
    auto& os = out.stream();
    os << header_line(0, canon) << '\n';
    os << "# achievedWeight " << res.achieved_weight << " requested " << t << (res.trace.budget_applied ? " (budgeted)" : "") << '\n';
    for (auto [w, count] : res.trace.patterns_per_weight) os << "# weight " << w << " patterns " << count << '\n';
    os << "step,weight,fvector,failuresBefore,failuresAfter,candidates\n";
    os << "0,0," << res.trace.chosen.front().to_string() << ",,,\n";
    for (std::size_t i = 0; i < res.trace.steps.size(); ++i) {
        const auto& st = res.trace.steps[i];
        os << i + 1 << ',' << st.weight << ',' << st.chosen.to_string() << ',' << st.failures_before << ',' << st.failures_after << ','
           << st.candidates_evaluated << '\n';
    }
    std::cerr << res.trace.chosen.size() << " decoders chosen; achieved weight " << res.achieved_weight << " of " << t << "\n";
    return res.achieved_weight < t ? kTargetMissed : kOk;
}

int cmd_simulate(const Common& o, const std::string& ensemble, const std::string& p_list, std::uint64_t trials,
                 std::optional<std::uint64_t> early_stop, const std::string& plot_path) {
    const CssCode code = load_code(o.code);
    if (trials < 1) throw ConfigError("--trials must be at least 1");
    if (o.format != "csv" && o.format != "json") throw ConfigError("--format must be csv or json");
    Canon canon("simulate");
    canon.file("code", o.code).add("p", p_list).add("trials", std::to_string(trials)).add("max-iters", std::to_string(o.max_iters));
    canon.add("seed", std::to_string(o.seed)).add("early-stop-frames", early_stop ? std::to_string(*early_stop) : "none");
    canon.add("format", o.format);
    const auto ensembles = load_ensembles(ensemble, code, canon);
    const auto ps = parse_p_list(p_list);

    McOptions mc;
    mc.max_iters = o.max_iters;
    mc.seed = o.seed;
    mc.workers = o.workers;
    mc.early_stop_frames = early_stop;
    std::vector<SweepRow> rows;
    for (const auto& ens : ensembles) {
        for (double p : ps) {
            rows.push_back({ens.name, p, run_mc(code, ens, p, trials, mc)});
            const auto& st = rows.back().stats;
            std::cerr << ens.name << " p=" << format_double(p) << ": " << st.frame_errors << "/" << st.trials
                      << " frame errors, FER " << format_double(st.fer()) << "\n";
        }
    }

    Output out(o.out);
    auto& os = out.stream();
    if (o.format == "csv") {
        os << header_line(o.seed, canon) << '\n';
        write_csv(os, rows);
    } else {
        nlohmann::ordered_json doc;
        doc["version"] = kVersion;
        doc["seed"] = o.seed;
        doc["config"] = canon.hash();
        doc["rows"] = nlohmann::ordered_json::array();
        for (const auto& r : rows) {
            const Interval ci = r.stats.ci();
            doc["rows"].push_back({{"ensemble", r.ensemble},
                                   {"p", r.p},
                                   {"trials", r.stats.trials},
                                   {"frameErrors", r.stats.frame_errors},
                                   {"logicalErrors", r.stats.logical_errors},
                                   {"FER", r.stats.fer()},
                                   {"ciLo", ci.lo},
                                   {"ciHi", ci.hi},
                                   {"avgIterations", r.stats.avg_iterations()}});
        }
        os << doc.dump(2) << '\n';
    }
    if (!plot_path.empty()) {
        std::ofstream plot(plot_path, std::ios::binary);
        if (!plot) throw ConfigError("cannot write " + plot_path);
        plot << header_line(o.seed, canon) << '\n';
        write_plot_data(plot, rows);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collective two-bit bit-flipping decoding of quantum LDPC codes"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Common o;
    auto add_code = [&](CLI::App* sub) { sub->add_option("--code", o.code, "Code specification file")->required(); };
    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", o.out, "Output file (default: standard output)"); };
    auto add_workers = [&](CLI::App* sub) {
        sub->add_option("--workers", o.workers, "Worker threads (0 = all cores)")->capture_default_str();
    };
    auto add_iters = [&](CLI::App* sub) {
        sub->add_option("--max-iters", o.max_iters, "Iteration budget L")->capture_default_str()->check(CLI::PositiveNumber);
    };

    auto* code_cmd = app.add_subcommand("code", "Build or validate a code");
    code_cmd->require_subcommand(1);
    std::string matrix_format = "sparse";
    auto* build = code_cmd->add_subcommand("build", "Write H_X and H_Z to <out>/hx.txt and <out>/hz.txt");
    add_code(build);
    add_out(build);
    build->add_option("--matrix-format", matrix_format, "dense or sparse")->check(CLI::IsMember({"dense", "sparse"}))->capture_default_str();
    auto* validate = code_cmd->add_subcommand("validate", "Check H_X H_Z^T = 0 and report degree histograms");
    add_code(validate);
    add_out(validate);

    auto* tsa = app.add_subcommand("tsa", "Trapping-set analysis");
    tsa->require_subcommand(1);
    std::size_t length = 6;
    std::size_t max_size = kDefaultMaxSize;
    std::string parent;
    auto* cycles = tsa->add_subcommand("cycles", "List cycles of one length in the H_Z Tanner graph");
    add_code(cycles);
    add_out(cycles);
    cycles->add_option("--length", length, "Cycle length")->capture_default_str();
    auto* census_cmd = tsa->add_subcommand("census", "Expand all shortest and next-shortest cycles to terminal structures");
    add_code(census_cmd);
    add_out(census_cmd);
    census_cmd->add_option("--max-size", max_size, "Largest structure to grow")->capture_default_str();
    auto* expand = tsa->add_subcommand("expand", "Expand one variable set to its terminal structure");
    add_code(expand);
    add_out(expand);
    expand->add_option("--parent", parent, "File holding the starting variable list")->required();
    expand->add_option("--max-size", max_size, "Largest structure to grow")->capture_default_str();

    std::string ensemble = "D1";
    std::string syndrome, error;
    double prior = 0.01;
    auto* decode = app.add_subcommand("decode", "Decode one syndrome with every member of an ensemble");
    add_code(decode);
    add_out(decode);
    add_iters(decode);
    decode->add_option("--ensemble", ensemble, "Builtin ensemble, decoder name or ensemble file")->capture_default_str();
    decode->add_option("--syndrome", syndrome, "File of 0/1 syndrome bits")->required();
    decode->add_option("--error", error, "File of 0/1 error bits; adds the collective verdict");
    decode->add_option("--prior", prior, "Crossover probability for min-sum members")->capture_default_str();

    std::size_t t = 4;
    std::string supports;
    bool pin = false;
    std::optional<std::size_t> budget;
    auto* genset = app.add_subcommand("genset", "Greedy decoder-set generation");
    add_code(genset);
    add_out(genset);
    add_iters(genset);
    add_workers(genset);
    genset->add_option("--t", t, "Target error weight")->capture_default_str()->check(CLI::PositiveNumber);
    genset->add_option("--supports", supports, "File of structures, one variable list per line")->required();
    genset->add_flag("--pin", pin, "Only patterns containing each structure's first variable (transitive structures)");
    genset->add_option("--budget", budget, "Per-weight cap on examined patterns");

    std::string p_list;
    std::uint64_t trials = 10000;
    std::optional<std::uint64_t> early_stop;
    std::string plot;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo frame error rates on the binary symmetric channel");
    add_code(simulate);
    add_out(simulate);
    add_iters(simulate);
    add_workers(simulate);
    simulate->add_option("--ensemble", ensemble, "Comma list of builtin ensembles, decoder names or ensemble files")->capture_default_str();
    simulate->add_option("--p", p_list, "Comma list of crossover probabilities")->required();
    simulate->add_option("--trials", trials, "Trials per point")->capture_default_str();
    simulate->add_option("--seed", o.seed, "Base seed")->capture_default_str();
    simulate->add_option("--format", o.format, "csv or json")->capture_default_str();
    simulate->add_option("--early-stop-frames", early_stop, "Stop a point after this many frame errors");
    simulate->add_option("--plot-data", plot, "Also write p-vs-FER plot data here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (build->parsed()) return cmd_code_build(o, matrix_format);
        if (validate->parsed()) return cmd_code_validate(o);
        if (cycles->parsed()) return cmd_cycles(o, length);
        if (census_cmd->parsed()) return cmd_census(o, max_size);
        if (expand->parsed()) return cmd_expand(o, parent, max_size);
        if (decode->parsed()) return cmd_decode(o, ensemble, syndrome, error, prior);
        if (genset->parsed()) return cmd_genset(o, t, supports, pin, budget);
        if (simulate->parsed()) return cmd_simulate(o, ensemble, p_list, trials, early_stop, plot);
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kConfigError;
}
