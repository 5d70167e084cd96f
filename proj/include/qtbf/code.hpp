#pragma once

// CSS code construction from circulant block specifications: generalized
// hypergraph product (GHP), hypergraph product (HP) and bivariate bicycle (BB).

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qtbf/gf2.hpp"

namespace qtbf {

/// x^x_exp y^y_exp. Univariate polynomials keep y_exp = 0.
struct Monomial {
    std::size_t x_exp = 0;
    std::size_t y_exp = 0;

    friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

/// Polynomial with GF(2) coefficients over the cyclic group(s) of the lift.
class PolynomialSpec {
public:
    PolynomialSpec() = default;

    /// Univariate polynomial from exponents; exponents are reduced mod `lift`
    /// and repeated terms cancel in pairs.
    static PolynomialSpec univariate(const std::vector<std::size_t>& exponents, std::size_t lift) {
        if (lift == 0) throw std::invalid_argument("PolynomialSpec: lift size must be positive");
        std::vector<Monomial> terms;
        for (auto e : exponents) terms.push_back({e % lift, 0});
        return PolynomialSpec(std::move(terms), false);
    }

    static PolynomialSpec bivariate(const std::vector<Monomial>& terms, std::size_t l, std::size_t m) {
        if (l == 0 || m == 0) throw std::invalid_argument("PolynomialSpec: lift sizes must be positive");
        std::vector<Monomial> reduced;
        for (auto t : terms) reduced.push_back({t.x_exp % l, t.y_exp % m});
        return PolynomialSpec(std::move(reduced), true);
    }

    bool is_bivariate() const { return bivariate_; }
    const std::vector<Monomial>& terms() const { return terms_; }
    std::vector<std::size_t> exponents() const {
        std::vector<std::size_t> out;
        for (auto t : terms_) out.push_back(t.x_exp);
        return out;
    }

    friend bool operator==(const PolynomialSpec&, const PolynomialSpec&) = default;

private:
    PolynomialSpec(std::vector<Monomial> terms, bool bivariate) : bivariate_(bivariate) {
        std::map<Monomial, int> parity;
        for (auto t : terms) parity[t] ^= 1;
        for (auto [t, odd] : parity) {
            if (odd) terms_.push_back(t);
        }
    }

    bool bivariate_ = false;
    std::vector<Monomial> terms_;  // sorted, no duplicates
};

/// Grid of circulant entries; an empty optional is the zero block.
struct BlockSpec {
    std::size_t block_rows = 0;
    std::size_t block_cols = 0;
    std::size_t lift = 0;
    std::vector<std::optional<PolynomialSpec>> entries;  // row-major, block_rows * block_cols

    const std::optional<PolynomialSpec>& at(std::size_t r, std::size_t c) const { return entries.at(r * block_cols + c); }

    friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

struct CssCode {
    std::string name;
    BinaryMatrix hx;
    BinaryMatrix hz;
    std::optional<std::size_t> k;
    std::optional<std::pair<std::size_t, std::size_t>> distance_bounds;
    /// First column of the second circulant column block.
    std::size_t circulant_boundary = 0;

    std::size_t n() const { return hz.cols(); }
};

/// l x l circulant: entry (i, j) is 1 iff (j - i) mod l is an exponent of `spec`.
inline BinaryMatrix circulant(std::size_t l, const PolynomialSpec& spec) {
    if (spec.is_bivariate()) throw std::invalid_argument("circulant: bivariate polynomial needs bivariate_circulant");
    BinaryMatrix m(l, l);
    for (auto e : spec.exponents()) {
        if (e >= l) throw std::invalid_argument("circulant: exponent not reduced below lift size");
        for (std::size_t i = 0; i < l; ++i) m.flip(i, (i + e) % l);
    }
    return m;
}

/// (l*m) x (l*m) matrix of sum x^a y^b with x = S_l (x) I_m and y = I_l (x) S_m.
inline BinaryMatrix bivariate_circulant(std::size_t l, std::size_t m, const PolynomialSpec& spec) {
    BinaryMatrix out(l * m, l * m);
    for (auto t : spec.terms()) {
        for (std::size_t i = 0; i < l; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                out.flip(i * m + j, ((i + t.x_exp) % l) * m + (j + t.y_exp) % m);
            }
        }
    }
    return out;
}

inline void validate_block_spec(const BlockSpec& spec) {
    if (spec.lift == 0) throw std::invalid_argument("BlockSpec: lift size must be positive");
    if (spec.entries.size() != spec.block_rows * spec.block_cols) {
        throw std::invalid_argument("BlockSpec: grid size does not match block_rows x block_cols");
    }
    for (const auto& e : spec.entries) {
        if (!e) continue;
        if (e->is_bivariate()) throw std::invalid_argument("BlockSpec: entries must be univariate");
        for (auto x : e->exponents()) {
            if (x >= spec.lift) throw std::invalid_argument("BlockSpec: exponent not reduced below lift size");
        }
    }
}

inline BinaryMatrix lift(const BlockSpec& spec) {
    validate_block_spec(spec);
    const std::size_t l = spec.lift;
    BinaryMatrix out(spec.block_rows * l, spec.block_cols * l);
    for (std::size_t br = 0; br < spec.block_rows; ++br) {
        for (std::size_t bc = 0; bc < spec.block_cols; ++bc) {
            const auto& entry = spec.at(br, bc);
            if (!entry) continue;
            for (auto e : entry->exponents()) {
                for (std::size_t i = 0; i < l; ++i) out.flip(br * l + i, bc * l + (i + e) % l);
            }
        }
    }
    return out;
}

/// Transposes the grid and every circulant in it (x^k -> x^{l-k}).
inline BlockSpec block_transpose(const BlockSpec& spec) {
    validate_block_spec(spec);
    BlockSpec out;
    out.block_rows = spec.block_cols;
    out.block_cols = spec.block_rows;
    out.lift = spec.lift;
    out.entries.resize(spec.entries.size());
    for (std::size_t r = 0; r < spec.block_rows; ++r) {
        for (std::size_t c = 0; c < spec.block_cols; ++c) {
            const auto& entry = spec.at(r, c);
            if (!entry) continue;
            std::vector<std::size_t> flipped;
            for (auto e : entry->exponents()) flipped.push_back((spec.lift - e) % spec.lift);
            out.entries[c * out.block_cols + r] = PolynomialSpec::univariate(flipped, spec.lift);
        }
    }
    return out;
}

inline bool css_commutes(const BinaryMatrix& hx, const BinaryMatrix& hz) {
    return hx.cols() == hz.cols() && gf2_matmul(hx, hz.transpose()).is_zero();
}

inline void require_css(const CssCode& code, const char* who) {
    if (!css_commutes(code.hx, code.hz)) throw std::runtime_error(std::string(who) + ": H_X H_Z^T != 0");
}

/// H_X = [A | B], H_Z = [B^T | A^T].
inline CssCode ghp(const BlockSpec& a, const BlockSpec& b) {
    if (a.block_rows != a.block_cols || b.block_rows != b.block_cols) {
        throw std::invalid_argument("ghp: A and B must be square block grids");
    }
    const BinaryMatrix la = lift(a);
    const BinaryMatrix lb = lift(b);
    if (la.rows() != lb.rows()) throw std::invalid_argument("ghp: A and B lift to different sizes");
    if (gf2_matmul(la, lb) != gf2_matmul(lb, la)) throw std::invalid_argument("ghp: A and B do not commute");

    CssCode code;
    code.hx = hstack(la, lb);
    code.hz = hstack(lift(block_transpose(b)), lift(block_transpose(a)));
    code.circulant_boundary = la.cols();
    require_css(code, "ghp");
    return code;
}

/// Hypergraph product of two classical parity-check matrices.
inline CssCode hp(const BinaryMatrix& a1, const BinaryMatrix& a2) {
    const std::size_t m1 = a1.rows(), n1 = a1.cols();
    const std::size_t m2 = a2.rows(), n2 = a2.cols();
    CssCode code;
    code.hx = hstack(kron(a1, BinaryMatrix::identity(m2)), kron(BinaryMatrix::identity(m1), a2));
    code.hz = hstack(kron(BinaryMatrix::identity(n1), a2.transpose()), kron(a1.transpose(), BinaryMatrix::identity(n2)));
    code.circulant_boundary = n1 * m2;
    require_css(code, "hp");
    return code;
}

/// Bivariate bicycle code: H_X = [A | B], H_Z = [B^T | A^T].
inline CssCode bb(std::size_t l, std::size_t m, const PolynomialSpec& a_poly, const PolynomialSpec& b_poly) {
    if (!a_poly.is_bivariate() || !b_poly.is_bivariate()) throw std::invalid_argument("bb: polynomials must be bivariate");
    const BinaryMatrix a = bivariate_circulant(l, m, a_poly);
    const BinaryMatrix b = bivariate_circulant(l, m, b_poly);
    CssCode code;
    code.hx = hstack(a, b);
    code.hz = hstack(b.transpose(), a.transpose());
    code.circulant_boundary = l * m;
    require_css(code, "bb");
    return code;
}

struct DegreeHistogram {
    std::map<std::size_t, std::size_t> columns;  // degree -> count
    std::map<std::size_t, std::size_t> rows;
};

struct CssReport {
    bool commutes = false;
    bool dimensions_match = false;
    DegreeHistogram hx;
    DegreeHistogram hz;

    bool pass() const { return commutes && dimensions_match; }
};

inline DegreeHistogram degree_histogram(const BinaryMatrix& h) {
    DegreeHistogram out;
    for (auto d : h.column_degrees()) ++out.columns[d];
    for (auto d : h.row_degrees()) ++out.rows[d];
    return out;
}

inline CssReport validate_css(const CssCode& code) {
    CssReport report;
    report.dimensions_match = code.hx.cols() == code.hz.cols();
    report.commutes = report.dimensions_match && css_commutes(code.hx, code.hz);
    report.hx = degree_histogram(code.hx);
    report.hz = degree_histogram(code.hz);
    return report;
}

}  // namespace qtbf
