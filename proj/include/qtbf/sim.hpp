#pragma once

// Seeded Monte-Carlo frame-error simulation over the binary symmetric channel.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtbf/code.hpp"
#include "qtbf/collective.hpp"
#include "qtbf/gf2.hpp"
#include "qtbf/parallel.hpp"

namespace qtbf {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent stream seed for one trial; depends only on (seed, trial index).
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) { return splitmix64(splitmix64(seed) ^ trial); }

using TrialRng = std::mt19937_64;

/// I.i.d. Bernoulli(p) bits: bit i is set iff the i-th 64-bit draw is below p * 2^64.
inline BitVector sample_error(std::size_t n, double p, TrialRng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_error: p must lie in [0, 1]");
    BitVector e(n);
    if (p == 0.0) return e;
    if (p == 1.0) {
        for (std::size_t i = 0; i < n; ++i) e.set(i);
        return e;
    }
    const long double scaled = std::ldexp(static_cast<long double>(p), 64);
    const std::uint64_t threshold = scaled >= std::ldexp(1.0L, 64) ? std::numeric_limits<std::uint64_t>::max()
                                                                    : static_cast<std::uint64_t>(scaled);
    for (std::size_t i = 0; i < n; ++i) {
        if (rng() < threshold) e.set(i);
    }
    return e;
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval at 95% confidence.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double denom = 1.0 + z * z / n;
    const double centre = (phat + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
    return {successes == 0 ? 0.0 : std::max(0.0, centre - half), successes == trials ? 1.0 : std::min(1.0, centre + half)};
}

struct Stats {
    std::uint64_t trials = 0;
    std::uint64_t frame_errors = 0;
    std::uint64_t logical_errors = 0;
    std::uint64_t iteration_sum = 0;  // over successful frames

    double fer() const { return trials == 0 ? 0.0 : static_cast<double>(frame_errors) / static_cast<double>(trials); }
    double avg_iterations() const {
        const std::uint64_t ok = trials - frame_errors;
        return ok == 0 ? 0.0 : static_cast<double>(iteration_sum) / static_cast<double>(ok);
    }
    Interval ci() const { return wilson_interval(frame_errors, trials); }

    friend bool operator==(const Stats&, const Stats&) = default;
};

struct McOptions {
    std::size_t max_iters = 50;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    /// Stop once this many frame errors have been seen (counted in trial order).
    std::optional<std::uint64_t> early_stop_frames;
};

inline constexpr std::size_t kTrialBatch = 1024;

struct TrialRecord {
    Verdict verdict = Verdict::SyndromeMismatch;
    std::size_t iterations = 0;
};

/// Runs `trials` frames (fewer with early stop). Trials are decoded in batches
/// in parallel and merged strictly in trial order, so the result does not
/// depend on the worker count.
inline Stats run_mc(const EnsembleDecoder& dec, double p, std::uint64_t trials, const McOptions& opts) {
    if (trials < 1) throw std::invalid_argument("run_mc: need at least one trial");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("run_mc: p must lie in [0, 1]");
    const TannerGraph& g = dec.graph();
    Stats stats;
    std::vector<TrialRecord> batch;
    for (std::uint64_t start = 0; start < trials; start += kTrialBatch) {
        const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(kTrialBatch, trials - start));
        batch.assign(count, {});
        parallel_for(count, opts.workers, [&](std::size_t i) {
            TrialRng rng(trial_seed(opts.seed, start + i));
            const BitVector e = sample_error(g.num_vars(), p, rng);
            BitVector s(g.num_checks());
            for (auto v : e.support()) {
                for (auto c : g.var_neighbors(v)) s.flip(c);
            }
            const Outcome o = dec.decode(e, s, opts.max_iters, false);
            batch[i] = {o.verdict, o.iterations_used};
        });
        for (const auto& rec : batch) {
            ++stats.trials;
            if (is_success(rec.verdict)) {
                stats.iteration_sum += rec.iterations;
            } else {
                ++stats.frame_errors;
                if (rec.verdict == Verdict::LogicalError) ++stats.logical_errors;
            }
            if (opts.early_stop_frames && stats.frame_errors >= *opts.early_stop_frames) return stats;
        }
    }
    return stats;
}

inline Stats run_mc(const CssCode& code, const Ensemble& ens, double p, std::uint64_t trials, const McOptions& opts) {
    const EnsembleDecoder dec(code, ens, p > 0.0 && p < 1.0 ? p : 0.01);
    return run_mc(dec, p, trials, opts);
}

struct SweepRow {
    std::string ensemble;
    double p = 0.0;
    Stats stats;
};

inline std::vector<SweepRow> sweep(const CssCode& code, const std::vector<Ensemble>& ensembles, const std::vector<double>& ps,
                                   std::uint64_t trials, const McOptions& opts) {
    std::vector<SweepRow> rows;
    for (const auto& ens : ensembles) {
        for (double p : ps) rows.push_back({ens.name, p, run_mc(code, ens, p, trials, opts)});
    }
    return rows;
}

/// Shortest round-trip decimal form; stable across runs and platforms.
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "ensemble,p,trials,frameErrors,logicalErrors,FER,ciLo,ciHi,avgIterations\n";
    for (const auto& r : rows) {
        const Interval ci = r.stats.ci();
        out << r.ensemble << ',' << format_double(r.p) << ',' << r.stats.trials << ',' << r.stats.frame_errors << ','
            << r.stats.logical_errors << ',' << format_double(r.stats.fer()) << ',' << format_double(ci.lo) << ','
            << format_double(ci.hi) << ',' << format_double(r.stats.avg_iterations()) << '\n';
    }
}

/// One row per p, one FER column per ensemble (in first-seen order).
inline void write_plot_data(std::ostream& out, const std::vector<SweepRow>& rows) {
    std::vector<std::string> names;
    std::vector<double> ps;
    for (const auto& r : rows) {
        if (std::find(names.begin(), names.end(), r.ensemble) == names.end()) names.push_back(r.ensemble);
        if (std::find(ps.begin(), ps.end(), r.p) == ps.end()) ps.push_back(r.p);
    }
    out << "p";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (double p : ps) {
        out << format_double(p);
        for (const auto& n : names) {
            out << ',';
            for (const auto& r : rows) {
                if (r.ensemble == n && r.p == p) out << format_double(r.stats.fer());
            }
        }
        out << '\n';
    }
}

}  // namespace qtbf
