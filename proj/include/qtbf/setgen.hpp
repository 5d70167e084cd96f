#pragma once

// Greedy construction of a TBF decoder set that corrects every error pattern
// up to a target weight on given variable supports.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qtbf/code.hpp"
#include "qtbf/collective.hpp"
#include "qtbf/decoders.hpp"
#include "qtbf/parallel.hpp"
#include "qtbf/registry.hpp"
#include "qtbf/tanner.hpp"

namespace qtbf {

struct PatternSet {
    std::size_t weight = 0;
    std::vector<std::vector<Index>> patterns;
};

/// All weight-j subsets of `support`, in lexicographic order of positions.
/// With `pinned`, only subsets containing support[0] are produced
/// (C(|support|-1, j-1) of them); this covers every orbit when the support's
/// automorphisms act transitively on it.
inline PatternSet enumerate_patterns(const std::vector<Index>& support, std::size_t j, bool pinned = false) {
    if (j > support.size()) throw std::invalid_argument("enumerate_patterns: weight exceeds support size");
    PatternSet out{j, {}};
    if (j == 0) {
        out.patterns.emplace_back();
        return out;
    }
    const std::size_t first = pinned ? 1 : 0;
    const std::size_t free_count = pinned ? j - 1 : j;
    const std::size_t k = support.size();
    std::vector<std::size_t> pos(free_count);
    for (std::size_t i = 0; i < free_count; ++i) pos[i] = first + i;
    while (true) {
        std::vector<Index> p;
        p.reserve(j);
        if (pinned) p.push_back(support[0]);
        for (auto x : pos) p.push_back(support[x]);
        out.patterns.push_back(std::move(p));
        if (free_count == 0) break;
        std::size_t i = free_count;
        while (i > 0 && pos[i - 1] == k - free_count + i - 1) --i;
        if (i == 0) break;
        ++pos[i - 1];
        for (std::size_t q = i; q < free_count; ++q) pos[q] = pos[q - 1] + 1;
    }
    return out;
}

/// Number of patterns enumerate_patterns would return, without building them.
inline std::uint64_t pattern_count(std::size_t support_size, std::size_t j, bool pinned) {
    auto choose = [](std::uint64_t n, std::uint64_t r) -> std::uint64_t {
        if (r > n) return 0;
        std::uint64_t out = 1;
        for (std::uint64_t i = 1; i <= r; ++i) out = out * (n - r + i) / i;
        return out;
    };
    if (pinned) return j == 0 ? 1 : choose(support_size - 1, j - 1);
    return choose(support_size, j);
}

struct PatternSupport {
    std::vector<Index> vars;
    bool symmetric = false;  // pin the first variable when enumerating
};

/// Keeps at most `budget` patterns, evenly spaced over the full list.
inline void apply_budget(std::vector<std::vector<Index>>& patterns, std::optional<std::size_t> budget) {
    if (!budget || patterns.size() <= *budget) return;
    std::vector<std::vector<Index>> kept;
    kept.reserve(*budget);
    const std::size_t total = patterns.size();
    for (std::size_t i = 0; i < *budget; ++i) kept.push_back(std::move(patterns[i * total / *budget]));
    patterns = std::move(kept);
}

inline std::vector<std::vector<Index>> collect_patterns(const std::vector<PatternSupport>& supports, std::size_t j,
                                                        std::optional<std::size_t> budget = std::nullopt) {
    std::vector<std::vector<Index>> all;
    for (const auto& s : supports) {
        if (j > s.vars.size()) continue;
        auto ps = enumerate_patterns(s.vars, j, s.symmetric);
        for (auto& p : ps.patterns) all.push_back(std::move(p));
    }
    apply_budget(all, budget);
    return all;
}

/// Decodes one pattern with one prepared decoder and reports success (exact or degenerate).
class PatternJudge {
public:
    explicit PatternJudge(const CssCode& code, std::size_t max_iters) : classifier_(code), max_iters_(max_iters) {}

    const TannerGraph& graph() const { return classifier_.hz_graph(); }

    BitVector syndrome_of(const std::vector<Index>& pattern) const {
        const TannerGraph& g = graph();
        BitVector s(g.num_checks());
        for (auto v : pattern) {
            for (auto c : g.var_neighbors(v)) s.flip(c);
        }
        return s;
    }

    bool corrects(const TwoBitDecoder& dec, const std::vector<Index>& pattern) const {
        const BitVector s = syndrome_of(pattern);
        const DecodeResult r = dec.decode(s, max_iters_);
        const BitVector e = BitVector::from_support(graph().num_vars(), pattern);
        return is_success(classifier_.classify(e, r.estimate, r.converged));
    }

private:
    OutcomeClassifier classifier_;
    std::size_t max_iters_;
};

struct SelectionStep {
    std::size_t weight = 0;
    FVector chosen;
    std::size_t failures_before = 0;
    std::size_t failures_after = 0;
    std::size_t candidates_evaluated = 0;
};

struct SelectionTrace {
    std::vector<FVector> chosen;  // starts with D1
    std::vector<SelectionStep> steps;
    /// Per weight: number of patterns examined (after budget).
    std::vector<std::pair<std::size_t, std::size_t>> patterns_per_weight;
    bool budget_applied = false;
};

struct GenerateResult {
    SelectionTrace trace;
    std::size_t achieved_weight = 0;
};

struct GenerateOptions {
    std::size_t max_iters = 50;
    std::optional<std::size_t> budget;  // per-weight pattern cap
    std::size_t workers = 1;
};

/// Greedy selection over the 1024 f-vectors (uniform base Psi table). Starts
/// from {D1}; for each weight j = 1..t collects the patterns the current set
/// fails on and repeatedly appends the candidate leaving the fewest of them
/// uncorrected (ties to the lowest f-vector index). A weight is achieved once
/// its failure list is empty; selection stops at the first weight that cannot
/// be completed.
inline GenerateResult generate_set(std::size_t t, const std::vector<PatternSupport>& supports, const CssCode& code,
                                   const GenerateOptions& opts = {}) {
    if (t < 1) throw std::invalid_argument("generate_set: target weight must be at least 1");
    const PatternJudge judge(code, opts.max_iters);
    const TannerGraph& g = judge.graph();
    const FVector first = fvectors::table_ii()[0];

    GenerateResult result;
    std::vector<TwoBitDecoder> chosen_decoders;
    auto add_chosen = [&](FVector f) {
        result.trace.chosen.push_back(f);
        chosen_decoders.emplace_back(g, DecoderSpec::two_bit("f" + f.to_string(), f));
    };
    add_chosen(first);

    std::vector<unsigned> candidates;
    for (unsigned idx = 0; idx < 1024; ++idx) {
        if (idx != first.index()) candidates.push_back(idx);
    }

    for (std::size_t j = 1; j <= t; ++j) {
        auto patterns = collect_patterns(supports, j, opts.budget);
        if (opts.budget) {
            std::size_t full = 0;
            for (const auto& s : supports) {
                if (j <= s.vars.size()) full += pattern_count(s.vars.size(), j, s.symmetric);
            }
            result.trace.budget_applied = result.trace.budget_applied || full > patterns.size();
        }
        result.trace.patterns_per_weight.emplace_back(j, patterns.size());

        std::vector<char> failed(patterns.size(), 0);
        parallel_for(patterns.size(), opts.workers, [&](std::size_t i) {
            bool ok = false;
            for (const auto& d : chosen_decoders) {
                if (judge.corrects(d, patterns[i])) {
                    ok = true;
                    break;
                }
            }
            failed[i] = !ok;
        });
        std::vector<std::vector<Index>> failures;
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            if (failed[i]) failures.push_back(std::move(patterns[i]));
        }

        while (!failures.empty() && !candidates.empty()) {
            // Branch and bound: a candidate is abandoned once it has left more
            // patterns uncorrected than the best complete count so far; the
            // argmin and its tie-break are unaffected.
            const std::size_t nf = failures.size();
            std::atomic<std::size_t> best_bound{nf};
            std::vector<std::size_t> uncorrected(candidates.size(), std::numeric_limits<std::size_t>::max());
            parallel_for(candidates.size(), opts.workers, [&](std::size_t ci) {
                const FVector f = FVector::from_index(candidates[ci]);
                const TwoBitDecoder dec(g, DecoderSpec::two_bit("candidate", f));
                std::size_t miss = 0;
                for (const auto& p : failures) {
                    if (!judge.corrects(dec, p) && ++miss > best_bound.load()) return;
                }
                uncorrected[ci] = miss;
                std::size_t cur = best_bound.load();
                while (miss < cur && !best_bound.compare_exchange_weak(cur, miss)) {
                }
            });
            std::size_t best = 0;
            for (std::size_t ci = 1; ci < candidates.size(); ++ci) {
                if (uncorrected[ci] < uncorrected[best]) best = ci;
            }
            if (uncorrected[best] >= nf) break;  // nothing left corrects any remaining failure

            const FVector f = FVector::from_index(candidates[best]);
            add_chosen(f);
            candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best));
            std::vector<std::vector<Index>> remaining;
            for (auto& p : failures) {
                if (!judge.corrects(chosen_decoders.back(), p)) remaining.push_back(std::move(p));
            }
            result.trace.steps.push_back({j, f, nf, remaining.size(), candidates.size() + 1});
            failures = std::move(remaining);
        }
        if (!failures.empty()) {
            result.achieved_weight = j - 1;
            return result;
        }
        result.achieved_weight = j;
    }
    return result;
}

/// Replays a decoder set over every pattern of weight 1..w on the supports and
/// returns the patterns none of them corrects.
inline std::vector<std::vector<Index>> replay_failures(const std::vector<FVector>& set, std::size_t w,
                                                       const std::vector<PatternSupport>& supports, const CssCode& code,
                                                       const GenerateOptions& opts = {}) {
    const PatternJudge judge(code, opts.max_iters);
    std::vector<TwoBitDecoder> decoders;
    for (auto f : set) decoders.emplace_back(judge.graph(), DecoderSpec::two_bit("f" + f.to_string(), f));
    std::vector<std::vector<Index>> out;
    for (std::size_t j = 1; j <= w; ++j) {
        auto patterns = collect_patterns(supports, j, opts.budget);
        std::vector<char> failed(patterns.size(), 0);
        parallel_for(patterns.size(), opts.workers, [&](std::size_t i) {
            failed[i] = std::none_of(decoders.begin(), decoders.end(),
                                     [&](const TwoBitDecoder& d) { return judge.corrects(d, patterns[i]); });
        });
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            if (failed[i]) out.push_back(patterns[i]);
        }
    }
    return out;
}

}  // namespace qtbf
