#pragma once

// Bipartite (Tanner) view of a parity-check matrix: girth, short cycles and
// induced subgraphs on variable subsets.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "qtbf/gf2.hpp"

namespace qtbf {

using Index = std::uint32_t;

class TannerGraph {
public:
    TannerGraph() = default;
    TannerGraph(std::size_t num_vars, std::size_t num_checks) : var_adj_(num_vars), check_adj_(num_checks) {}

    void add_edge(Index v, Index c) {
        var_adj_.at(v).push_back(c);
        check_adj_.at(c).push_back(v);
    }
    void finalize() {
        for (auto& a : var_adj_) std::sort(a.begin(), a.end());
        for (auto& a : check_adj_) std::sort(a.begin(), a.end());
    }

    std::size_t num_vars() const { return var_adj_.size(); }
    std::size_t num_checks() const { return check_adj_.size(); }
    std::span<const Index> var_neighbors(std::size_t v) const { return var_adj_[v]; }
    std::span<const Index> check_neighbors(std::size_t c) const { return check_adj_[c]; }
    std::size_t max_var_degree() const {
        std::size_t d = 0;
        for (const auto& a : var_adj_) d = std::max(d, a.size());
        return d;
    }

private:
    std::vector<std::vector<Index>> var_adj_;
    std::vector<std::vector<Index>> check_adj_;
};

inline TannerGraph build_graph(const BinaryMatrix& h) {
    TannerGraph g(h.cols(), h.rows());
    for (std::size_t r = 0; r < h.rows(); ++r) {
        for (auto c : h.row_support(r)) g.add_edge(static_cast<Index>(c), static_cast<Index>(r));
    }
    g.finalize();
    return g;
}

inline constexpr std::size_t kInfiniteGirth = std::numeric_limits<std::size_t>::max();

/// Shortest cycle length, or kInfiniteGirth for a forest. BFS from every
/// variable node; every cycle contains one, so the minimum is exact.
inline std::size_t girth(const TannerGraph& g) {
    // Unified vertex ids: variables [0, n), checks [n, n + m).
    const std::size_t n = g.num_vars();
    const std::size_t total = n + g.num_checks();
    std::size_t best = kInfiniteGirth;
    std::vector<std::int32_t> dist(total, -1);
    std::vector<std::int64_t> parent(total, -1);
    std::vector<std::size_t> queue;
    queue.reserve(total);
    std::vector<std::size_t> touched;

    auto neighbors = [&](std::size_t u) -> std::span<const Index> {
        return u < n ? g.var_neighbors(u) : g.check_neighbors(u - n);
    };
    auto to_vertex = [&](std::size_t u, Index x) -> std::size_t { return u < n ? n + x : x; };

    for (std::size_t root = 0; root < n; ++root) {
        for (auto t : touched) {
            dist[t] = -1;
            parent[t] = -1;
        }
        touched.clear();
        queue.clear();
        queue.push_back(root);
        dist[root] = 0;
        touched.push_back(root);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::size_t u = queue[head];
            if (best != kInfiniteGirth && static_cast<std::size_t>(2 * dist[u] + 1) >= best) break;
            for (auto x : neighbors(u)) {
                const std::size_t w = to_vertex(u, x);
                if (static_cast<std::int64_t>(w) == parent[u]) continue;
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    parent[w] = static_cast<std::int64_t>(u);
                    touched.push_back(w);
                    queue.push_back(w);
                } else {
                    best = std::min(best, static_cast<std::size_t>(dist[u] + dist[w] + 1));
                }
            }
        }
    }
    return best;
}

/// Simple cycle as alternating variable/check indices, starting at its
/// smallest variable: v0, c0, v1, c1, ..., closing edge c_last -> v0.
struct Cycle {
    std::vector<Index> vertices;

    std::size_t length() const { return vertices.size(); }
    std::vector<Index> variables() const {
        std::vector<Index> out;
        for (std::size_t i = 0; i < vertices.size(); i += 2) out.push_back(vertices[i]);
        std::sort(out.begin(), out.end());
        return out;
    }
    std::vector<Index> checks() const {
        std::vector<Index> out;
        for (std::size_t i = 1; i < vertices.size(); i += 2) out.push_back(vertices[i]);
        std::sort(out.begin(), out.end());
        return out;
    }
};

/// Every simple cycle of exactly `length` edges, each reported once (in the
/// direction whose second vertex is the smaller check), ordered by (variables,
/// checks, vertex sequence).
inline std::vector<Cycle> enumerate_cycles(const TannerGraph& g, std::size_t length) {
    if (length < 4 || length % 2 != 0) return {};
    const std::size_t half = length / 2;
    std::map<std::tuple<std::vector<Index>, std::vector<Index>, std::vector<Index>>, Cycle> found;
    std::vector<Index> path;  // alternating v, c, v, c, ...
    std::vector<char> var_used(g.num_vars(), 0);
    std::vector<char> check_used(g.num_checks(), 0);

    // Depth-first extension from the root; only variables larger than the root
    // are allowed so each cycle is rooted at its smallest variable.
    auto extend = [&](auto&& self, Index root) -> void {
        const Index v = path.back();
        const std::size_t vars_on_path = path.size() / 2 + 1;
        for (auto c : g.var_neighbors(v)) {
            if (check_used[c]) continue;
            for (auto u : g.check_neighbors(c)) {
                if (u == v) continue;
                if (u == root) {
                    // Each cycle is walked once per direction; keep one.
                    if (vars_on_path == half && path[1] < c) {
                        Cycle cyc;
                        cyc.vertices = path;
                        cyc.vertices.push_back(c);
                        auto key = std::make_tuple(cyc.variables(), cyc.checks(), cyc.vertices);
                        found.emplace(std::move(key), std::move(cyc));
                    }
                    continue;
                }
                if (u < root || var_used[u] || vars_on_path >= half) continue;
                check_used[c] = 1;
                var_used[u] = 1;
                path.push_back(c);
                path.push_back(u);
                self(self, root);
                path.pop_back();
                path.pop_back();
                var_used[u] = 0;
                check_used[c] = 0;
            }
        }
    };

    for (Index root = 0; root < g.num_vars(); ++root) {
        path.assign(1, root);
        var_used[root] = 1;
        extend(extend, root);
        var_used[root] = 0;
    }

    std::vector<Cycle> out;
    out.reserve(found.size());
    for (auto& [key, cyc] : found) out.push_back(std::move(cyc));
    return out;
}

struct InducedSubgraph {
    std::vector<Index> vars;                 // sorted, unique
    std::map<Index, std::size_t> check_degrees;  // checks with >= 1 neighbor in vars

    std::size_t odd_checks() const {
        std::size_t b = 0;
        for (auto [c, d] : check_degrees) b += d % 2;
        return b;
    }
};

inline InducedSubgraph induced(const TannerGraph& g, std::span<const Index> var_set) {
    InducedSubgraph sub;
    sub.vars.assign(var_set.begin(), var_set.end());
    std::sort(sub.vars.begin(), sub.vars.end());
    sub.vars.erase(std::unique(sub.vars.begin(), sub.vars.end()), sub.vars.end());
    for (auto v : sub.vars) {
        if (v >= g.num_vars()) throw std::out_of_range("induced: variable index out of range");
        for (auto c : g.var_neighbors(v)) ++sub.check_degrees[c];
    }
    return sub;
}

}  // namespace qtbf
