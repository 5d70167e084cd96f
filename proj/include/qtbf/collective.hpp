#pragma once

// Decoder ensembles run side by side on one syndrome, and classification of
// their outputs against the CSS success criteria.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qtbf/code.hpp"
#include "qtbf/decoders.hpp"
#include "qtbf/gf2.hpp"
#include "qtbf/registry.hpp"
#include "qtbf/tanner.hpp"

namespace qtbf {

/// Raised when a result contradicts an invariant that must hold by construction.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Declared best-first: a smaller enumerator is a better outcome.
enum class Verdict { ExactMatch, DegenerateSuccess, LogicalError, SyndromeMismatch };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::ExactMatch: return "ExactMatch";
        case Verdict::DegenerateSuccess: return "DegenerateSuccess";
        case Verdict::LogicalError: return "LogicalError";
        case Verdict::SyndromeMismatch: return "SyndromeMismatch";
    }
    return "?";
}

inline bool is_success(Verdict v) { return v == Verdict::ExactMatch || v == Verdict::DegenerateSuccess; }

/// Reusable classifier holding the reduced H_X basis.
class OutcomeClassifier {
public:
    explicit OutcomeClassifier(const CssCode& code) : hx_basis_(row_reduce(code.hx)), hz_graph_(build_graph(code.hz)) {}

    Verdict classify(const BitVector& e, const BitVector& estimate, bool converged) const {
        if (!converged) return Verdict::SyndromeMismatch;
        BitVector residual = e;
        residual ^= estimate;
        if (residual.none()) return Verdict::ExactMatch;
        if (!in_kernel(residual)) throw InvariantViolation("converged estimate leaves a residual outside ker(H_Z)");
        return in_rowspace(hx_basis_, residual) ? Verdict::DegenerateSuccess : Verdict::LogicalError;
    }

    const TannerGraph& hz_graph() const { return hz_graph_; }

private:
    bool in_kernel(const BitVector& x) const {
        std::vector<std::uint8_t> parity(hz_graph_.num_checks(), 0);
        for (auto v : x.support()) {
            for (auto c : hz_graph_.var_neighbors(v)) parity[c] ^= 1;
        }
        return std::none_of(parity.begin(), parity.end(), [](std::uint8_t p) { return p != 0; });
    }

    RowBasis hx_basis_;
    TannerGraph hz_graph_;
};

inline Verdict classify_outcome(const BitVector& e, const BitVector& estimate, const CssCode& code, bool converged) {
    return OutcomeClassifier(code).classify(e, estimate, converged);
}

struct Ensemble {
    std::string name;
    std::vector<DecoderSpec> members;
};

inline void validate_ensemble(const Ensemble& ens) {
    if (ens.members.empty()) throw std::invalid_argument("ensemble '" + ens.name + "' has no members");
    std::set<std::string> names;
    for (const auto& m : ens.members) {
        if (!names.insert(m.name).second) {
            throw std::invalid_argument("ensemble '" + ens.name + "' repeats member name '" + m.name + "'");
        }
    }
}

/// Builtins: D1, D4, D8, D9set, D24. Any decoder name (D1..D10, Dk/V1, Dk/V2,
/// BF, NMS) that is not a builtin ensemble yields a single-member ensemble.
inline Ensemble builtin_ensemble(const std::string& name, std::size_t boundary) {
    auto make = [&](std::initializer_list<const char*> names) {
        Ensemble ens{name, {}};
        for (const char* n : names) ens.members.push_back(named_decoder(n, boundary));
        return ens;
    };
    if (name == "D1") return make({"D1"});
    if (name == "D4") return make({"D1", "D2", "D3", "D9"});
    if (name == "D8") return make({"D1", "D2", "D3", "D4", "D5", "D6", "D7", "D8"});
    if (name == "D9set") return make({"D1", "D2", "D3", "D4", "D5", "D6", "D7", "D8", "D9"});
    if (name == "D24") {
        Ensemble ens = make({"D1", "D9", "D10"});
        for (int k = 2; k <= 8; ++k) {
            const std::string base = "D" + std::to_string(k);
            for (const auto& variant : {base, base + "/V2", base + "/V1"}) ens.members.push_back(named_decoder(variant, boundary));
        }
        return ens;
    }
    return Ensemble{name, {named_decoder(name, boundary)}};
}

/// Ensemble file:
///   name <label>
///   member <decoder name>        (registry name)
///   spec <path>                  (decoder description file, relative to the ensemble file)
inline Ensemble read_ensemble_file(const std::filesystem::path& path, std::size_t boundary) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open ensemble file " + path.string());
    Ensemble ens{path.stem().string(), {}};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key, value, extra;
        if (!(ls >> key)) continue;
        if (!(ls >> value) || (ls >> extra)) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": expected '<key> <value>'");
        }
        try {
            if (key == "name") {
                ens.name = value;
            } else if (key == "member") {
                ens.members.push_back(named_decoder(value, boundary));
            } else if (key == "spec") {
                const auto spec_path = path.parent_path() / value;
                std::ifstream sin(spec_path);
                if (!sin) throw std::invalid_argument("cannot open decoder spec " + spec_path.string());
                ens.members.push_back(read_decoder_spec(sin, boundary));
            } else {
                throw std::invalid_argument("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    validate_ensemble(ens);
    return ens;
}

struct Outcome {
    std::vector<DecodeResult> per_member;  // empty when decoded in fast mode
    Verdict verdict = Verdict::SyndromeMismatch;
    std::optional<std::size_t> winner;
    std::size_t iterations_used = 0;
};

/// One decoder prepared for repeated use on a fixed graph.
class MemberDecoder {
public:
    MemberDecoder(const TannerGraph& graph, const DecoderSpec& spec, double prior) : spec_(spec), graph_(&graph) {
        switch (spec.kind) {
            case DecoderKind::TwoBit: impl_ = std::make_shared<TwoBitDecoder>(graph, spec); break;
            case DecoderKind::MinSum: impl_ = std::make_shared<MinSumDecoder>(graph, spec.nms_factor, prior); break;
            case DecoderKind::BitFlip: impl_ = std::monostate{}; break;
        }
    }

    DecodeResult decode(const BitVector& s, std::size_t max_iters) const {
        if (auto* tbf = std::get_if<std::shared_ptr<TwoBitDecoder>>(&impl_)) return (*tbf)->decode(s, max_iters);
        if (auto* nms = std::get_if<std::shared_ptr<MinSumDecoder>>(&impl_)) return (*nms)->decode(s, max_iters);
        return bf_decode(*graph_, s, max_iters);
    }

    const DecoderSpec& spec() const { return spec_; }

private:
    DecoderSpec spec_;
    const TannerGraph* graph_;
    std::variant<std::monostate, std::shared_ptr<TwoBitDecoder>, std::shared_ptr<MinSumDecoder>> impl_;
};

/// An ensemble compiled against one code. `prior` is the channel crossover
/// probability handed to min-sum members.
class EnsembleDecoder {
public:
    EnsembleDecoder(const CssCode& code, const Ensemble& ens, double prior = 0.01)
        : name_(ens.name), classifier_(code) {
        validate_ensemble(ens);
        for (const auto& m : ens.members) members_.emplace_back(classifier_.hz_graph(), m, prior);
    }

    const std::string& name() const { return name_; }
    std::size_t size() const { return members_.size(); }
    const OutcomeClassifier& classifier() const { return classifier_; }
    const TannerGraph& graph() const { return classifier_.hz_graph(); }

    std::vector<DecodeResult> run(const BitVector& s, std::size_t max_iters) const {
        std::vector<DecodeResult> out;
        out.reserve(members_.size());
        for (const auto& m : members_) out.push_back(m.decode(s, max_iters));
        for (const auto& r : out) check_converged(r, s);
        return out;
    }

    /// Verdict = best verdict over members (ExactMatch > DegenerateSuccess >
    /// LogicalError > SyndromeMismatch). Winner = fewest iterations among the
    /// members reaching that verdict, ties to the earlier member.
    ///
    /// With keep_members = false, members after an exact match are only run
    /// for fewer iterations than the current winner (they cannot win
    /// otherwise) and per_member stays empty; verdict, winner and
    /// iterations_used are identical to the full run.
    Outcome decode(const BitVector& e, const BitVector& s, std::size_t max_iters, bool keep_members = true) const {
        Outcome out;
        for (std::size_t i = 0; i < members_.size(); ++i) {
            std::size_t budget = max_iters;
            if (!keep_members && out.winner && out.verdict == Verdict::ExactMatch) {
                if (out.iterations_used == 0) break;
                budget = std::min(budget, out.iterations_used - 1);
            }
            DecodeResult r = members_[i].decode(s, budget);
            check_converged(r, s);
            const Verdict v = classifier_.classify(e, r.estimate, r.converged);
            const bool better = !out.winner || v < out.verdict ||
                                (v == out.verdict && r.iterations < out.iterations_used);
            if (better) {
                out.verdict = v;
                out.winner = i;
                out.iterations_used = r.iterations;
            }
            if (keep_members) out.per_member.push_back(std::move(r));
        }
        if (out.verdict == Verdict::SyndromeMismatch) {
            out.winner.reset();
            out.iterations_used = max_iters;
        }
        return out;
    }

private:
    void check_converged(const DecodeResult& r, const BitVector& s) const {
        if (!r.converged) return;
        const TannerGraph& g = classifier_.hz_graph();
        std::vector<std::uint8_t> parity(g.num_checks(), 0);
        for (auto v : r.estimate.support()) {
            for (auto c : g.var_neighbors(v)) parity[c] ^= 1;
        }
        for (std::size_t c = 0; c < parity.size(); ++c) {
            if (parity[c] != static_cast<std::uint8_t>(s.get(c))) {
                throw InvariantViolation("decoder reported convergence but the estimate does not match the syndrome");
            }
        }
    }

    std::string name_;
    OutcomeClassifier classifier_;
    std::vector<MemberDecoder> members_;
};

inline std::vector<DecodeResult> run_ensemble(const CssCode& code, const BitVector& s, std::size_t max_iters,
                                              const Ensemble& ens, double prior = 0.01) {
    return EnsembleDecoder(code, ens, prior).run(s, max_iters);
}

}  // namespace qtbf
