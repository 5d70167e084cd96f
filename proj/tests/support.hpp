#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qtbf/qtbf.hpp"

namespace testing_support {

using qtbf::BinaryMatrix;
using qtbf::BitVector;
using qtbf::CssCode;
using qtbf::Index;
using qtbf::TannerGraph;

inline const CssCode& b1() {
    static const CssCode code = qtbf::load_code_spec(std::string(QTBF_CONFIG_DIR) + "/b1.code");
    return code;
}

inline const TannerGraph& b1_graph() {
    static const TannerGraph g = qtbf::build_graph(b1().hz);
    return g;
}

inline constexpr std::size_t kB1Lift = 63;
inline constexpr std::size_t kB1Blocks = 7;

inline BinaryMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double density = 0.5) {
    std::bernoulli_distribution bit(density);
    BinaryMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (bit(rng)) m.set(r, c);
        }
    }
    return m;
}

/// Every GF(2) combination of the rows, as strings (small row counts only).
inline std::set<std::string> span_of(const BinaryMatrix& m) {
    std::set<std::string> out;
    const std::size_t r = m.rows();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << r); ++mask) {
        BitVector v(m.cols());
        for (std::size_t i = 0; i < r; ++i) {
            if ((mask >> i) & 1U) v ^= m.row(i);
        }
        out.insert(v.to_string());
    }
    return out;
}

/// Rank from the size of the exhaustively enumerated span.
inline std::size_t span_rank(const BinaryMatrix& m) {
    const std::size_t size = span_of(m).size();
    std::size_t rank = 0;
    while ((std::size_t{1} << rank) < size) ++rank;
    return rank;
}

/// Parity-check matrix of the [7,4] Hamming code.
inline BinaryMatrix hamming7() {
    return BinaryMatrix::from_rows({"1010101", "0110011", "0001111"});
}

/// Parity checks of the length-n repetition code (n - 1 rows, adjacent pairs).
inline BinaryMatrix repetition(std::size_t n) {
    BinaryMatrix m(n - 1, n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        m.set(i, i);
        m.set(i, i + 1);
    }
    return m;
}

/// Cyclic repetition checks: n x n circulant 1 + x.
inline BinaryMatrix cyclic_repetition(std::size_t n) {
    BinaryMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m.set(i, i);
        m.set(i, (i + 1) % n);
    }
    return m;
}

/// Variables reachable from `start` through checks, never leaving [lo, hi).
inline std::vector<Index> component_in(const TannerGraph& g, Index start, std::size_t lo, std::size_t hi) {
    std::vector<char> seen(g.num_vars(), 0);
    std::queue<Index> q;
    q.push(start);
    seen[start] = 1;
    std::vector<Index> out;
    while (!q.empty()) {
        const Index v = q.front();
        q.pop();
        out.push_back(v);
        for (auto c : g.var_neighbors(v)) {
            for (auto u : g.check_neighbors(c)) {
                if (u >= lo && u < hi && !seen[u]) {
                    seen[u] = 1;
                    q.push(u);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// The two classical structures of B1 that hold variables 0 and 441.
inline const std::vector<Index>& b1_s63() {
    static const std::vector<Index> s = component_in(b1_graph(), 0, 0, b1().circulant_boundary);
    return s;
}
inline const std::vector<Index>& b1_s49() {
    static const std::vector<Index> s = component_in(b1_graph(), 441, b1().circulant_boundary, b1().n());
    return s;
}

/// B1 index maps: cyclic shift inside every circulant, and rotation of the
/// 7x7 block grid. Each acts the same way on variables and on checks.
inline std::size_t b1_shift(std::size_t idx) {
    const std::size_t block = idx / kB1Lift;
    return block * kB1Lift + (idx % kB1Lift + 1) % kB1Lift;
}
inline std::size_t b1_rotate(std::size_t idx) {
    const std::size_t part = idx / (kB1Lift * kB1Blocks);
    const std::size_t block = (idx / kB1Lift) % kB1Blocks;
    return part * kB1Lift * kB1Blocks + ((block + 1) % kB1Blocks) * kB1Lift + idx % kB1Lift;
}

/// Orbit of `start` under the group generated by `gens`.
inline std::set<std::size_t> orbit(std::size_t start, const std::vector<std::function<std::size_t(std::size_t)>>& gens) {
    std::set<std::size_t> seen{start};
    std::vector<std::size_t> stack{start};
    while (!stack.empty()) {
        const std::size_t x = stack.back();
        stack.pop_back();
        for (const auto& gen : gens) {
            const std::size_t y = gen(x);
            if (seen.insert(y).second) stack.push_back(y);
        }
    }
    return seen;
}

inline BitVector syndrome_of(const TannerGraph& g, const std::vector<Index>& pattern) {
    BitVector s(g.num_checks());
    for (auto v : pattern) {
        for (auto c : g.var_neighbors(v)) s.flip(c);
    }
    return s;
}

inline BitVector pattern_vector(std::size_t n, const std::vector<Index>& pattern) { return BitVector::from_support(n, pattern); }

}  // namespace testing_support
