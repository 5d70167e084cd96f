#pragma once

// Syndrome-based bit-flipping decoders: plain BF, two-bit bit flipping (TBF)
// parameterized by a Psi-table and an f-vector per variable region, and a
// normalized min-sum baseline.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qtbf/gf2.hpp"
#include "qtbf/tanner.hpp"

namespace qtbf {

/// Two-bit variable state: MSB is the hard decision, LSB is the strength (1 = strong).
enum class VarState : std::uint8_t { WeakZero = 0b00, StrongZero = 0b01, WeakOne = 0b10, StrongOne = 0b11 };

constexpr bool hard_decision(VarState w) { return (static_cast<std::uint8_t>(w) >> 1) & 1U; }
constexpr bool is_strong(VarState w) { return static_cast<std::uint8_t>(w) & 1U; }
/// Keeps the hard decision and clears the strength bit.
constexpr VarState weaken(VarState w) { return static_cast<VarState>(static_cast<std::uint8_t>(w) & 0b10); }

/// Residual bit in bit 1, "changed this iteration" in bit 0.
enum class CheckState : std::uint8_t { ZeroOld = 0, ZeroNew = 1, OneOld = 2, OneNew = 3 };

constexpr bool is_unsatisfied(CheckState z) { return (static_cast<std::uint8_t>(z) >> 1) & 1U; }

/// Check update from the residual bits of the previous and current iteration.
constexpr CheckState phi(bool r_prev, bool r_cur) {
    if (!r_prev && !r_cur) return CheckState::ZeroOld;
    if (!r_prev && r_cur) return CheckState::OneNew;
    if (r_prev && !r_cur) return CheckState::ZeroNew;
    return CheckState::OneOld;
}

constexpr CheckState init_check(bool syndrome_bit, bool as_new) {
    return static_cast<CheckState>((syndrome_bit ? 2U : 0U) | (as_new ? 1U : 0U));
}

inline std::vector<CheckState> init_checks(const BitVector& s, bool as_new) {
    std::vector<CheckState> z(s.size());
    for (std::size_t c = 0; c < s.size(); ++c) z[c] = init_check(s.get(c), as_new);
    return z;
}

/// Next variable state as a function of (current state, unsatisfied-check count).
class PsiTable {
public:
    /// Row order used by the published tables: strong zero, weak zero, strong one, weak one.
    static constexpr std::array<VarState, 4> kRowOrder = {VarState::StrongZero, VarState::WeakZero, VarState::StrongOne,
                                                          VarState::WeakOne};

    PsiTable() = default;

    /// rows[i][chi1] is the next state for current state kRowOrder[i].
    static PsiTable from_rows(const std::array<std::array<VarState, 4>, 4>& rows) {
        PsiTable t;
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t chi = 0; chi < 4; ++chi) t.set(kRowOrder[i], static_cast<unsigned>(chi), rows[i][chi]);
        }
        return t;
    }

    VarState operator()(VarState w, unsigned chi1) const { return table_[index(w, chi1)]; }
    void set(VarState w, unsigned chi1, VarState next) { table_[index(w, chi1)] = next; }

    friend bool operator==(const PsiTable&, const PsiTable&) = default;

private:
    static std::size_t index(VarState w, unsigned chi1) {
        if (chi1 > 3) throw std::invalid_argument("PsiTable: unsatisfied count must be at most 3");
        return static_cast<std::size_t>(w) * 4 + chi1;
    }

    std::array<VarState, 16> table_{};
};

namespace tables {

inline constexpr VarState S0 = VarState::StrongZero;
inline constexpr VarState W0 = VarState::WeakZero;
inline constexpr VarState S1 = VarState::StrongOne;
inline constexpr VarState W1 = VarState::WeakOne;

/// Base rule: three unsatisfied checks flip to strong, two demote strong bits and
/// flip weak ones, one flips weak bits, none strengthens.
inline const PsiTable& base() {
    static const PsiTable t = PsiTable::from_rows({{
        {S0, S0, W0, S1},
        {S0, W1, S1, S1},
        {S1, S1, W1, S0},
        {S1, W0, S0, S0},
    }});
    return t;
}

/// Delayed rule: like base() but three unsatisfied checks only weaken a strong bit.
inline const PsiTable& delayed() {
    static const PsiTable t = PsiTable::from_rows({{
        {S0, S0, W0, W0},
        {S0, W1, S1, S1},
        {S1, S1, W1, W1},
        {S1, W0, S0, S0},
    }});
    return t;
}

/// Hard-decision majority rule: flips iff chi1 >= 2; strength is never consulted.
inline const PsiTable& majority() {
    static const PsiTable t = PsiTable::from_rows({{
        {S0, S0, S1, S1},
        {W0, W0, W1, W1},
        {S1, S1, S0, S0},
        {W1, W1, W0, W0},
    }});
    return t;
}

}  // namespace tables

/// Ten flags (I_dv, I_dc, W012, W120, W200, W201, W101, W021, W011, W020).
/// The first flag is the most significant bit of index().
class FVector {
public:
    enum Flag : unsigned {
        InitWeakVars = 0,
        InitNewChecks,
        W012,
        W120,
        W200,
        W201,
        W101,
        W021,
        W011,
        W020,
    };
    static constexpr unsigned kSize = 10;

    constexpr FVector() = default;
    static constexpr FVector from_index(unsigned index) {
        FVector f;
        f.bits_ = static_cast<std::uint16_t>(index & 0x3FFU);
        return f;
    }
    static FVector from_string(std::string_view bits) {
        std::string compact;
        for (char ch : bits) {
            if (ch == '0' || ch == '1') {
                compact.push_back(ch);
            } else if (ch != ',' && ch != ' ' && ch != '(' && ch != ')') {
                throw std::invalid_argument("FVector: unexpected character in flag string");
            }
        }
        if (compact.size() != kSize) throw std::invalid_argument("FVector: expected exactly 10 flags");
        FVector f;
        for (unsigned i = 0; i < kSize; ++i) f.set(static_cast<Flag>(i), compact[i] == '1');
        return f;
    }

    constexpr bool get(Flag flag) const { return (bits_ >> (kSize - 1 - flag)) & 1U; }
    constexpr void set(Flag flag, bool value) {
        const auto mask = static_cast<std::uint16_t>(1U << (kSize - 1 - flag));
        bits_ = value ? static_cast<std::uint16_t>(bits_ | mask) : static_cast<std::uint16_t>(bits_ & ~mask);
    }
    constexpr unsigned index() const { return bits_; }

    std::string to_string() const {
        std::string s;
        for (unsigned i = 0; i < kSize; ++i) s.push_back(get(static_cast<Flag>(i)) ? '1' : '0');
        return s;
    }

    friend constexpr bool operator==(FVector, FVector) = default;

private:
    std::uint16_t bits_ = 0;
};

/// Counts of previously satisfied, newly satisfied and previously unsatisfied
/// neighbor checks; newly unsatisfied checks make up the rest of the degree.
struct CheckTuple {
    unsigned zero_old = 0;
    unsigned zero_new = 0;
    unsigned one_old = 0;

    constexpr unsigned sum() const { return zero_old + zero_new + one_old; }
    constexpr bool is(unsigned a, unsigned b, unsigned c) const { return zero_old == a && zero_new == b && one_old == c; }
};

/// Variable update. Flagged tuples override the Psi-table:
///   (0,1,2): hold if W012 else Psi
///   (1,2,0), (2,0,0): weaken if flag else hold
///   (2,0,1), (1,0,1), (0,2,1), (0,1,1), (0,2,0): weaken if flag else Psi
/// Every other tuple goes through Psi.
inline VarState var_update(VarState w, CheckTuple x, unsigned chi1, FVector f, const PsiTable& psi) {
    if (x.sum() > 3 || chi1 > 3 || chi1 < x.one_old || x.sum() + (chi1 - x.one_old) > 3) {
        throw std::invalid_argument("var_update: check tuple inconsistent with a degree-3 variable");
    }
    using F = FVector;
    if (x.is(0, 1, 2)) return f.get(F::W012) ? w : psi(w, chi1);
    if (x.is(1, 2, 0)) return f.get(F::W120) ? weaken(w) : w;
    if (x.is(2, 0, 0)) return f.get(F::W200) ? weaken(w) : w;

    struct Override {
        unsigned a, b, c;
        F::Flag flag;
    };
    static constexpr std::array<Override, 5> kWeakenOrPsi = {{
        {2, 0, 1, F::W201},
        {1, 0, 1, F::W101},
        {0, 2, 1, F::W021},
        {0, 1, 1, F::W011},
        {0, 2, 0, F::W020},
    }};
    for (const auto& o : kWeakenOrPsi) {
        if (x.is(o.a, o.b, o.c)) return f.get(o.flag) ? weaken(w) : psi(w, chi1);
    }
    return psi(w, chi1);
}

enum class DecoderKind { TwoBit, BitFlip, MinSum };

struct RegionRule {
    PsiTable psi;
    FVector f;

    friend bool operator==(const RegionRule&, const RegionRule&) = default;
};

/// A decoder description. For TwoBit decoders, region i covers variables
/// [region_starts[i], region_starts[i+1]) (the last region runs to n) and is
/// updated with rules[i].
struct DecoderSpec {
    std::string name;
    DecoderKind kind = DecoderKind::TwoBit;
    std::vector<std::size_t> region_starts{0};
    std::vector<RegionRule> rules;
    double nms_factor = 0.875;

    /// Single-region TBF decoder.
    static DecoderSpec two_bit(std::string name, FVector f, const PsiTable& psi = tables::base()) {
        DecoderSpec spec;
        spec.name = std::move(name);
        spec.rules = {RegionRule{psi, f}};
        return spec;
    }

    std::size_t region_of(std::size_t v) const {
        auto it = std::upper_bound(region_starts.begin(), region_starts.end(), v);
        return static_cast<std::size_t>(it - region_starts.begin()) - 1;
    }

    friend bool operator==(const DecoderSpec&, const DecoderSpec&) = default;
};

inline void validate_spec(const DecoderSpec& spec, std::size_t n) {
    if (spec.kind != DecoderKind::TwoBit) return;
    if (spec.region_starts.empty() || spec.region_starts.front() != 0) {
        throw std::invalid_argument("DecoderSpec: regions must start at variable 0");
    }
    if (!std::is_sorted(spec.region_starts.begin(), spec.region_starts.end()) ||
        std::adjacent_find(spec.region_starts.begin(), spec.region_starts.end()) != spec.region_starts.end()) {
        throw std::invalid_argument("DecoderSpec: region starts must be strictly increasing");
    }
    if (spec.region_starts.back() >= n && spec.region_starts.size() > 1) {
        throw std::invalid_argument("DecoderSpec: region start beyond the variable count");
    }
    if (spec.rules.size() != spec.region_starts.size()) {
        throw std::invalid_argument("DecoderSpec: need exactly one rule per region");
    }
    for (const auto& r : spec.rules) {
        if (r.f.get(FVector::InitNewChecks) != spec.rules.front().f.get(FVector::InitNewChecks)) {
            throw std::invalid_argument("DecoderSpec: all regions must share the check initialization flag");
        }
    }
}

struct DecodeResult {
    BitVector estimate;
    bool converged = false;
    std::size_t iterations = 0;
};

/// Optional per-iteration record of the hard decisions (one entry per completed iteration).
using Trajectory = std::vector<BitVector>;

namespace detail {

inline void require_degree_at_most_3(const TannerGraph& g) {
    if (g.max_var_degree() > 3) throw std::invalid_argument("decoder: variable degree above 3 is not supported");
}

inline BitVector to_bits(const std::vector<std::uint8_t>& e) {
    BitVector out(e.size());
    for (std::size_t v = 0; v < e.size(); ++v) {
        if (e[v]) out.set(v);
    }
    return out;
}

}  // namespace detail

/// TBF decoder with the variable update compiled into one lookup table per
/// region. Index: state << 8 | packed check-state counts (2 bits per state).
class TwoBitDecoder {
public:
    TwoBitDecoder(const TannerGraph& graph, const DecoderSpec& spec) : graph_(&graph) {
        if (spec.kind != DecoderKind::TwoBit) throw std::invalid_argument("TwoBitDecoder: spec is not a TBF decoder");
        detail::require_degree_at_most_3(graph);
        validate_spec(spec, graph.num_vars());
        region_.resize(graph.num_vars());
        for (std::size_t v = 0; v < graph.num_vars(); ++v) region_[v] = static_cast<std::uint8_t>(spec.region_of(v));
        checks_new_ = spec.rules.front().f.get(FVector::InitNewChecks);
        for (const auto& rule : spec.rules) {
            init_state_.push_back(rule.f.get(FVector::InitWeakVars) ? VarState::WeakZero : VarState::StrongZero);
            luts_.push_back(compile(rule));
        }
    }

    DecodeResult decode(const BitVector& s, std::size_t max_iters, Trajectory* trace = nullptr) const {
        const TannerGraph& g = *graph_;
        const std::size_t n = g.num_vars();
        const std::size_t m = g.num_checks();
        if (s.size() != m) throw std::invalid_argument("tbf_decode: syndrome length does not match H.rows");

        std::vector<std::uint8_t> w(n), next(n), z(m), r(m), toggled(m, 0);
        for (std::size_t v = 0; v < n; ++v) w[v] = static_cast<std::uint8_t>(init_state_[region_[v]]);
        std::size_t unsat = 0;
        for (std::size_t c = 0; c < m; ++c) {
            r[c] = s.get(c);
            unsat += r[c];
            z[c] = static_cast<std::uint8_t>(init_check(r[c], checks_new_));
        }

        std::size_t iter = 0;
        std::vector<Index> flipped;
        while (unsat != 0 && iter < max_iters) {
            flipped.clear();
            for (std::size_t v = 0; v < n; ++v) {
                unsigned packed = 0;
                for (auto c : g.var_neighbors(v)) packed += 1U << (2U * z[c]);
                next[v] = luts_[region_[v]][static_cast<std::size_t>(w[v]) << 8 | packed];
                if ((next[v] ^ w[v]) & 0b10) flipped.push_back(static_cast<Index>(v));
            }
            w.swap(next);
            for (auto v : flipped) {
                for (auto c : g.var_neighbors(v)) toggled[c] ^= 1;
            }
            for (std::size_t c = 0; c < m; ++c) {
                const std::uint8_t cur = r[c] ^ toggled[c];
                z[c] = static_cast<std::uint8_t>(phi(r[c], cur));
                unsat += cur;
                unsat -= r[c];
                r[c] = cur;
                toggled[c] = 0;
            }
            ++iter;
            if (trace != nullptr) trace->push_back(hard_decisions(w));
        }

        return {hard_decisions(w), unsat == 0, iter};
    }

private:
    using Lut = std::array<std::uint8_t, 1024>;

    static Lut compile(const RegionRule& rule) {
        Lut lut{};
        for (unsigned state = 0; state < 4; ++state) {
            for (unsigned packed = 0; packed < 256; ++packed) {
                const unsigned zero_old = packed & 3U, zero_new = (packed >> 2) & 3U;
                const unsigned one_old = (packed >> 4) & 3U, one_new = (packed >> 6) & 3U;
                const auto w = static_cast<VarState>(state);
                if (zero_old + zero_new + one_old + one_new > 3) {
                    lut[state << 8 | packed] = static_cast<std::uint8_t>(w);  // unreachable for degree <= 3
                    continue;
                }
                const VarState out = var_update(w, {zero_old, zero_new, one_old}, one_old + one_new, rule.f, rule.psi);
                lut[state << 8 | packed] = static_cast<std::uint8_t>(out);
            }
        }
        return lut;
    }

    static BitVector hard_decisions(const std::vector<std::uint8_t>& w) {
        BitVector out(w.size());
        for (std::size_t v = 0; v < w.size(); ++v) {
            if (w[v] & 0b10) out.set(v);
        }
        return out;
    }

    const TannerGraph* graph_;
    std::vector<std::uint8_t> region_;
    std::vector<VarState> init_state_;
    std::vector<Lut> luts_;
    bool checks_new_ = false;
};

inline DecodeResult tbf_decode(const TannerGraph& g, const BitVector& s, std::size_t max_iters, const DecoderSpec& spec,
                               Trajectory* trace = nullptr) {
    return TwoBitDecoder(g, spec).decode(s, max_iters, trace);
}

inline DecodeResult tbf_decode(const BinaryMatrix& h, const BitVector& s, std::size_t max_iters, const DecoderSpec& spec,
                               Trajectory* trace = nullptr) {
    const TannerGraph g = build_graph(h);
    return tbf_decode(g, s, max_iters, spec, trace);
}

/// Parallel syndrome bit flipping: flip every variable with more unsatisfied
/// than satisfied neighbor checks.
inline DecodeResult bf_decode(const TannerGraph& g, const BitVector& s, std::size_t max_iters, Trajectory* trace = nullptr) {
    const std::size_t n = g.num_vars();
    const std::size_t m = g.num_checks();
    if (s.size() != m) throw std::invalid_argument("bf_decode: syndrome length does not match H.rows");

    std::vector<std::uint8_t> e(n, 0), r(m);
    std::size_t unsat = 0;
    for (std::size_t c = 0; c < m; ++c) {
        r[c] = s.get(c);
        unsat += r[c];
    }
    std::vector<Index> flips;
    std::size_t iter = 0;
    while (unsat != 0 && iter < max_iters) {
        flips.clear();
        for (std::size_t v = 0; v < n; ++v) {
            std::size_t chi1 = 0;
            const auto nbrs = g.var_neighbors(v);
            for (auto c : nbrs) chi1 += r[c];
            if (2 * chi1 > nbrs.size()) flips.push_back(static_cast<Index>(v));
        }
        for (auto v : flips) {
            e[v] ^= 1;
            for (auto c : g.var_neighbors(v)) {
                unsat -= r[c];
                r[c] ^= 1;
                unsat += r[c];
            }
        }
        ++iter;
        if (trace != nullptr) trace->push_back(detail::to_bits(e));
    }
    return {detail::to_bits(e), unsat == 0, iter};
}

inline DecodeResult bf_decode(const BinaryMatrix& h, const BitVector& s, std::size_t max_iters, Trajectory* trace = nullptr) {
    return bf_decode(build_graph(h), s, max_iters, trace);
}

/// Syndrome-based normalized min-sum with flooding schedule.
///
/// Fixed constants: channel LLR = ln((1-p)/p) for every variable, message
/// magnitudes saturate at kSaturation, and a zero posterior decides 0.
class MinSumDecoder {
public:
    static constexpr double kSaturation = 31.0;

    MinSumDecoder(const TannerGraph& graph, double factor, double prior) : graph_(&graph), factor_(factor) {
        if (!(factor > 0.0 && factor <= 1.0)) throw std::invalid_argument("nms_decode: factor must lie in (0, 1]");
        if (!(prior > 0.0 && prior < 1.0)) throw std::invalid_argument("nms_decode: prior must lie in (0, 1)");
        channel_llr_ = std::min(kSaturation, std::log((1.0 - prior) / prior));
        // Edge layout: variable-major, plus a per-check list of edge ids.
        edge_offset_.resize(graph.num_vars() + 1, 0);
        for (std::size_t v = 0; v < graph.num_vars(); ++v) {
            edge_offset_[v + 1] = edge_offset_[v] + graph.var_neighbors(v).size();
        }
        edge_check_.resize(edge_offset_.back());
        check_edges_.resize(graph.num_checks());
        for (std::size_t v = 0; v < graph.num_vars(); ++v) {
            std::size_t e = edge_offset_[v];
            for (auto c : graph.var_neighbors(v)) {
                edge_check_[e] = c;
                check_edges_[c].push_back(static_cast<Index>(e));
                ++e;
            }
        }
    }

    DecodeResult decode(const BitVector& s, std::size_t max_iters) const {
        const TannerGraph& g = *graph_;
        const std::size_t n = g.num_vars();
        if (s.size() != g.num_checks()) throw std::invalid_argument("nms_decode: syndrome length does not match H.rows");

        BitVector estimate(n);
        if (s.none()) return {estimate, true, 0};

        const std::size_t edges = edge_check_.size();
        std::vector<double> v2c(edges, channel_llr_), c2v(edges, 0.0);
        std::size_t iter = 0;
        bool matched = false;
        while (iter < max_iters && !matched) {
            for (std::size_t c = 0; c < g.num_checks(); ++c) {
                const auto& ce = check_edges_[c];
                double min1 = kSaturation, min2 = kSaturation;
                std::size_t argmin = ce.size();
                bool negative = s.get(c);
                for (std::size_t k = 0; k < ce.size(); ++k) {
                    const double q = v2c[ce[k]];
                    negative ^= q < 0.0;
                    const double mag = std::abs(q);
                    if (mag < min1) {
                        min2 = min1;
                        min1 = mag;
                        argmin = k;
                    } else if (mag < min2) {
                        min2 = mag;
                    }
                }
                for (std::size_t k = 0; k < ce.size(); ++k) {
                    const double q = v2c[ce[k]];
                    const bool sign = negative ^ (q < 0.0);
                    const double mag = factor_ * (k == argmin ? min2 : min1);
                    c2v[ce[k]] = sign ? -mag : mag;
                }
            }
            for (std::size_t v = 0; v < n; ++v) {
                double total = channel_llr_;
                for (std::size_t e = edge_offset_[v]; e < edge_offset_[v + 1]; ++e) total += c2v[e];
                for (std::size_t e = edge_offset_[v]; e < edge_offset_[v + 1]; ++e) {
                    v2c[e] = std::clamp(total - c2v[e], -kSaturation, kSaturation);
                }
                estimate.set(v, total < 0.0);
            }
            ++iter;
            matched = true;
            for (std::size_t c = 0; c < g.num_checks() && matched; ++c) {
                bool parity = false;
                for (auto v : g.check_neighbors(c)) parity ^= estimate.get(v);
                matched = parity == s.get(c);
            }
        }
        return {estimate, matched, iter};
    }

private:
    const TannerGraph* graph_;
    double factor_;
    double channel_llr_ = 0.0;
    std::vector<std::size_t> edge_offset_;
    std::vector<Index> edge_check_;
    std::vector<std::vector<Index>> check_edges_;
};

inline DecodeResult nms_decode(const TannerGraph& g, const BitVector& s, std::size_t max_iters, double factor, double prior) {
    return MinSumDecoder(g, factor, prior).decode(s, max_iters);
}

inline DecodeResult nms_decode(const BinaryMatrix& h, const BitVector& s, std::size_t max_iters, double factor, double prior) {
    return nms_decode(build_graph(h), s, max_iters, factor, prior);
}

}  // namespace qtbf
