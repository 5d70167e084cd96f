#pragma once

// (a,b) trapping sets, fixed sets, symmetric stabilizers, parent -> child
// expansion and a structure census built on top of it.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qtbf/code.hpp"
#include "qtbf/gf2.hpp"
#include "qtbf/tanner.hpp"

namespace qtbf {

struct TrappingSet {
    std::vector<Index> vars;  // sorted, unique
    std::size_t a = 0;
    std::size_t b = 0;

    friend bool operator==(const TrappingSet& x, const TrappingSet& y) { return x.vars == y.vars; }
    friend bool operator<(const TrappingSet& x, const TrappingSet& y) { return x.vars < y.vars; }
};

inline TrappingSet classify(const TannerGraph& g, std::span<const Index> var_set) {
    if (var_set.empty()) throw std::invalid_argument("classify: empty variable set");
    const InducedSubgraph sub = induced(g, var_set);
    return {sub.vars, sub.vars.size(), sub.odd_checks()};
}

/// True iff no member variable has more odd-degree than even-degree neighbor checks.
inline bool is_fixed_set(const TannerGraph& g, std::span<const Index> var_set) {
    const InducedSubgraph sub = induced(g, var_set);
    for (auto v : sub.vars) {
        std::size_t odd = 0, even = 0;
        for (auto c : g.var_neighbors(v)) (sub.check_degrees.at(c) % 2 ? odd : even) += 1;
        if (odd > even) return false;
    }
    return true;
}

namespace detail {

/// Neighborhoods of every check touched by `vars`, restricted to `vars` and
/// expressed as positions within `vars`.
inline std::vector<std::vector<std::size_t>> local_check_neighborhoods(const TannerGraph& g,
                                                                        const std::vector<Index>& vars) {
    std::map<Index, std::vector<std::size_t>> by_check;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        for (auto c : g.var_neighbors(vars[i])) by_check[c].push_back(i);
    }
    std::vector<std::vector<std::size_t>> out;
    for (auto& [c, nbrs] : by_check) out.push_back(std::move(nbrs));
    return out;
}

/// Induced subgraphs of two equal-size variable sets are isomorphic (as
/// variable/check bipartite graphs) iff some bijection of variables maps the
/// multiset of check neighborhoods of one onto the other.
inline bool induced_isomorphic(const TannerGraph& g, const std::vector<Index>& x, const std::vector<Index>& y) {
    if (x.size() != y.size()) return false;
    auto nx = local_check_neighborhoods(g, x);
    auto ny = local_check_neighborhoods(g, y);
    if (nx.size() != ny.size()) return false;

    auto degree_profile = [&](const std::vector<Index>& vars, const std::vector<std::vector<std::size_t>>& nbhd) {
        std::vector<std::size_t> deg(vars.size(), 0);
        std::vector<std::size_t> check_sizes;
        for (const auto& n : nbhd) {
            check_sizes.push_back(n.size());
            for (auto i : n) ++deg[i];
        }
        std::sort(deg.begin(), deg.end());
        std::sort(check_sizes.begin(), check_sizes.end());
        return std::make_pair(deg, check_sizes);
    };
    if (degree_profile(x, nx) != degree_profile(y, ny)) return false;

    auto canonical = [](std::vector<std::vector<std::size_t>> nbhd, const std::vector<std::size_t>& perm) {
        for (auto& n : nbhd) {
            for (auto& i : n) i = perm[i];
            std::sort(n.begin(), n.end());
        }
        std::sort(nbhd.begin(), nbhd.end());
        return nbhd;
    };
    std::vector<std::size_t> identity(y.size());
    std::iota(identity.begin(), identity.end(), 0);
    const auto target = canonical(ny, identity);
    std::vector<std::size_t> perm = identity;
    do {
        if (canonical(nx, perm) == target) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

}  // namespace detail

inline constexpr std::size_t kMaxSymmetricStabilizerSize = 12;

/// b = 0, the indicator lies in rowspace(H_X), and the set splits into two
/// halves with isomorphic induced subgraphs. The halves then share their
/// odd-degree checks automatically, since every check has even degree in the
/// union. Only two-way splits of sets of at most 12 variables are supported.
inline bool is_symmetric_stabilizer(const TannerGraph& g, const RowBasis& hx_basis, std::span<const Index> var_set) {
    const TrappingSet t = classify(g, var_set);
    if (t.b != 0) return false;
    if (!in_rowspace(hx_basis, BitVector::from_support(g.num_vars(), t.vars))) return false;
    if (t.a < 2 || t.a % 2 != 0) return false;
    if (t.a > kMaxSymmetricStabilizerSize) {
        throw std::invalid_argument("is_symmetric_stabilizer: sets above 12 variables are not supported");
    }
    const std::size_t half = t.a / 2;
    // Enumerate halves containing the first variable to skip mirrored splits.
    std::vector<bool> pick(t.a - 1, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(half - 1), true);
    do {
        std::vector<Index> left{t.vars[0]}, right;
        for (std::size_t i = 0; i + 1 < t.a; ++i) (pick[i] ? left : right).push_back(t.vars[i + 1]);
        if (detail::induced_isomorphic(g, left, right)) return true;
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return false;
}

inline bool is_symmetric_stabilizer(const TannerGraph& g, const CssCode& code, std::span<const Index> var_set) {
    return is_symmetric_stabilizer(g, row_reduce(code.hx), var_set);
}

struct ExpansionTrace {
    TrappingSet parent;
    std::vector<TrappingSet> children;  // sorted by variable set
    bool terminal = false;
};

/// Restricts expansion to variables in [begin, end).
struct VarDomain {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool contains(Index v) const { return v >= begin && v < end; }
};

inline constexpr std::size_t kDefaultMaxSize = 64;

/// One expansion step. Anchors are the degree-1 checks of the parent; when
/// none are left, a set with b > 0 anchors on every check that still has an
/// in-domain neighbor outside the set, and a set with b = 0 is terminal.
/// Candidates, by decreasing priority:
///   1. a variable on an anchor that also touches a set check of degree d,
///      for d = 1, 2, ... (first non-empty d wins);
///   2. a path v - c' - u with v on an anchor, c' outside the set's
///      neighborhood and u touching a set check of degree d, same order;
///   3. any variable on an anchor.
/// All candidates of the winning class are returned as distinct children.
inline ExpansionTrace expand_children(const TannerGraph& g, const TrappingSet& parent, std::size_t max_size = kDefaultMaxSize,
                                      std::optional<VarDomain> domain = std::nullopt) {
    const VarDomain dom = domain.value_or(VarDomain{0, g.num_vars()});
    ExpansionTrace trace;
    trace.parent = classify(g, parent.vars);
    const InducedSubgraph sub = induced(g, trace.parent.vars);
    const std::set<Index> members(sub.vars.begin(), sub.vars.end());
    auto degree = [&](Index c) -> std::size_t {
        auto it = sub.check_degrees.find(c);
        return it == sub.check_degrees.end() ? 0 : it->second;
    };
    auto outside = [&](Index v) { return dom.contains(v) && !members.count(v); };

    std::vector<Index> anchors;
    for (auto [c, d] : sub.check_degrees) {
        if (d == 1) anchors.push_back(c);
    }
    if (anchors.empty()) {
        if (trace.parent.b == 0) {
            trace.terminal = true;
            return trace;
        }
        for (auto [c, d] : sub.check_degrees) {
            const auto nb = g.check_neighbors(c);
            if (std::any_of(nb.begin(), nb.end(), outside)) anchors.push_back(c);
        }
    }
    if (anchors.empty() || trace.parent.a >= max_size) {
        trace.terminal = true;
        return trace;
    }

    std::size_t max_check_degree = 0;
    for (auto [c, d] : sub.check_degrees) max_check_degree = std::max(max_check_degree, d);

    auto touches_degree = [&](Index v, Index except, std::size_t d) {
        for (auto c : g.var_neighbors(v)) {
            if (c != except && degree(c) == d) return true;
        }
        return false;
    };

    std::set<std::vector<Index>> additions;
    for (std::size_t d = 1; d <= max_check_degree && additions.empty(); ++d) {
        for (auto a : anchors) {
            for (auto v : g.check_neighbors(a)) {
                if (outside(v) && touches_degree(v, a, d)) additions.insert({v});
            }
        }
    }
    if (trace.parent.a + 2 <= max_size) {
        for (std::size_t d = 1; d <= max_check_degree && additions.empty(); ++d) {
            for (auto a : anchors) {
                for (auto v : g.check_neighbors(a)) {
                    if (!outside(v)) continue;
                    for (auto mid : g.var_neighbors(v)) {
                        if (mid == a || degree(mid) != 0) continue;
                        for (auto u : g.check_neighbors(mid)) {
                            if (u == v || !outside(u) || !touches_degree(u, mid, d)) continue;
                            additions.insert({std::min(u, v), std::max(u, v)});
                        }
                    }
                }
            }
        }
    }
    if (additions.empty()) {
        for (auto a : anchors) {
            for (auto v : g.check_neighbors(a)) {
                if (outside(v)) additions.insert({v});
            }
        }
    }
    if (additions.empty()) {
        trace.terminal = true;
        return trace;
    }

    std::set<TrappingSet> children;
    for (const auto& add : additions) {
        std::vector<Index> vars = trace.parent.vars;
        vars.insert(vars.end(), add.begin(), add.end());
        std::sort(vars.begin(), vars.end());
        children.insert(classify(g, vars));
    }
    trace.children.assign(children.begin(), children.end());
    return trace;
}

/// Follows the lowest child (by sorted variable list) until a terminal set or max_size.
inline std::vector<TrappingSet> expand_to_terminal(const TannerGraph& g, const TrappingSet& start,
                                                   std::size_t max_size = kDefaultMaxSize,
                                                   std::optional<VarDomain> domain = std::nullopt) {
    std::vector<TrappingSet> path{classify(g, start.vars)};
    while (true) {
        ExpansionTrace step = expand_children(g, path.back(), max_size, domain);
        if (step.terminal || step.children.empty()) break;
        path.push_back(std::move(step.children.front()));
    }
    return path;
}

/// Domain for a seed: the circulant column block holding all of its variables,
/// or the whole graph when it straddles the boundary (or no boundary is known).
inline VarDomain seed_domain(const TannerGraph& g, std::size_t boundary, std::span<const Index> seed) {
    const std::size_t n = g.num_vars();
    if (boundary == 0 || boundary >= n || seed.empty()) return {0, n};
    const bool left = std::all_of(seed.begin(), seed.end(), [&](Index v) { return v < boundary; });
    const bool right = std::all_of(seed.begin(), seed.end(), [&](Index v) { return v >= boundary; });
    if (left) return {0, boundary};
    if (right) return {boundary, n};
    return {0, n};
}

struct CensusEntry {
    std::size_t a = 0;
    std::size_t b = 0;
    std::string origin;  // "6-cycle" or "8-cycle" seeds (the girth and girth + 2 cycles)
    std::vector<TrappingSet> structures;  // distinct supports, sorted
};

struct Census {
    std::size_t girth = kInfiniteGirth;
    std::size_t short_cycles = 0;   // cycles of length girth
    std::size_t next_cycles = 0;    // cycles of length girth + 2
    std::vector<CensusEntry> terminals;  // grouped by (origin, a, b)
    /// (6,0)-like symmetric stabilizers: terminal b = 0 supports from the
    /// girth + 2 cycles that pass is_symmetric_stabilizer.
    std::vector<TrappingSet> symmetric_stabilizers;
    std::vector<std::size_t> stabilizer_membership;  // per variable: number of symmetric stabilizers containing it

    const CensusEntry* find(std::size_t a, std::size_t b) const {
        for (const auto& e : terminals) {
            if (e.a == a && e.b == b) return &e;
        }
        return nullptr;
    }
};

/// Expands every shortest and next-shortest cycle to its terminal structure and
/// groups the distinct terminals by label.
inline Census census(const TannerGraph& g, const CssCode& code, std::size_t max_size = kDefaultMaxSize) {
    Census out;
    out.girth = girth(g);
    out.stabilizer_membership.assign(g.num_vars(), 0);
    if (out.girth == kInfiniteGirth) return out;

    const RowBasis hx_basis = row_reduce(code.hx);
    std::map<std::tuple<std::string, std::size_t, std::size_t>, std::set<TrappingSet>> groups;
    std::set<TrappingSet> stabilizers;

    for (std::size_t len : {out.girth, out.girth + 2}) {
        const auto cycles = enumerate_cycles(g, len);
        (len == out.girth ? out.short_cycles : out.next_cycles) = cycles.size();
        const std::string origin = std::to_string(len) + "-cycle";
        for (const auto& cyc : cycles) {
            const auto vars = cyc.variables();
            const auto path = expand_to_terminal(g, classify(g, vars), max_size, seed_domain(g, code.circulant_boundary, vars));
            const TrappingSet& end = path.back();
            groups[{origin, end.a, end.b}].insert(end);
            if (len == out.girth + 2 && end.b == 0 && end.a <= kMaxSymmetricStabilizerSize &&
                !stabilizers.count(end) && is_symmetric_stabilizer(g, hx_basis, end.vars)) {
                stabilizers.insert(end);
            }
        }
    }
    for (auto& [key, sets] : groups) {
        out.terminals.push_back({std::get<1>(key), std::get<2>(key), std::get<0>(key), {sets.begin(), sets.end()}});
    }
    out.symmetric_stabilizers.assign(stabilizers.begin(), stabilizers.end());
    for (const auto& s : out.symmetric_stabilizers) {
        for (auto v : s.vars) ++out.stabilizer_membership[v];
    }
    return out;
}

}  // namespace qtbf
