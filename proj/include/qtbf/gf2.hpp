#pragma once

// Dense bit-packed linear algebra over GF(2).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qtbf {

namespace detail {

inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

}  // namespace detail

/// Fixed-length binary vector, packed into 64-bit words. Bits past size() are always zero.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t size) : size_(size), words_(detail::words_for(size), 0) {}

    static BitVector from_string(std::string_view bits) {
        BitVector v(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] == '1') {
                v.set(i);
            } else if (bits[i] != '0') {
                throw std::invalid_argument("BitVector: expected only '0'/'1' characters");
            }
        }
        return v;
    }

    template <class Range>
    static BitVector from_support(std::size_t size, const Range& indices) {
        BitVector v(size);
        for (auto i : indices) {
            if (static_cast<std::size_t>(i) >= size) throw std::out_of_range("BitVector: support index out of range");
            v.set(static_cast<std::size_t>(i));
        }
        return v;
    }

    std::size_t size() const { return size_; }

    bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
    bool operator[](std::size_t i) const { return get(i); }

    void set(std::size_t i, bool value = true) {
        const std::uint64_t mask = std::uint64_t{1} << (i % 64);
        if (value) {
            words_[i / 64] |= mask;
        } else {
            words_[i / 64] &= ~mask;
        }
    }
    void flip(std::size_t i) { words_[i / 64] ^= std::uint64_t{1} << (i % 64); }

    BitVector& operator^=(const BitVector& other) {
        if (other.size_ != size_) throw std::invalid_argument("BitVector: length mismatch in xor");
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
        return *this;
    }
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }

    std::size_t weight() const {
        std::size_t total = 0;
        for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
        return total;
    }
    bool any() const {
        return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
    }
    bool none() const { return !any(); }

    /// Parity of the bitwise AND with another vector of the same length.
    bool dot(const BitVector& other) const {
        if (other.size_ != size_) throw std::invalid_argument("BitVector: length mismatch in dot");
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & other.words_[w];
        return std::popcount(acc) & 1;
    }

    std::vector<std::size_t> support() const {
        std::vector<std::size_t> out;
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t word = words_[w];
            while (word != 0) {
                out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
                word &= word - 1;
            }
        }
        return out;
    }

    std::string to_string() const {
        std::string s(size_, '0');
        for (std::size_t i = 0; i < size_; ++i) {
            if (get(i)) s[i] = '1';
        }
        return s;
    }

    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> words() { return words_; }

    friend bool operator==(const BitVector&, const BitVector&) = default;

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Row-major dense matrix over GF(2); each row is padded to a whole number of words.
class BinaryMatrix {
public:
    BinaryMatrix() = default;
    BinaryMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_(detail::words_for(cols)), data_(rows * stride_, 0) {}

    static BinaryMatrix identity(std::size_t n) {
        BinaryMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i);
        return m;
    }

    static BinaryMatrix from_rows(const std::vector<std::string>& rows) {
        if (rows.empty()) return {};
        BinaryMatrix m(rows.size(), rows.front().size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != m.cols_) throw std::invalid_argument("BinaryMatrix: ragged rows");
            for (std::size_t c = 0; c < m.cols_; ++c) {
                if (rows[r][c] == '1') {
                    m.set(r, c);
                } else if (rows[r][c] != '0') {
                    throw std::invalid_argument("BinaryMatrix: expected only '0'/'1' characters");
                }
            }
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const {
        check_index(r, c);
        return (data_[r * stride_ + c / 64] >> (c % 64)) & 1U;
    }
    void set(std::size_t r, std::size_t c, bool value = true) {
        check_index(r, c);
        const std::uint64_t mask = std::uint64_t{1} << (c % 64);
        auto& w = data_[r * stride_ + c / 64];
        w = value ? (w | mask) : (w & ~mask);
    }
    void flip(std::size_t r, std::size_t c) {
        check_index(r, c);
        data_[r * stride_ + c / 64] ^= std::uint64_t{1} << (c % 64);
    }

    std::span<const std::uint64_t> row_words(std::size_t r) const { return {data_.data() + r * stride_, stride_}; }
    std::span<std::uint64_t> row_words(std::size_t r) { return {data_.data() + r * stride_, stride_}; }

    BitVector row(std::size_t r) const {
        BitVector v(cols_);
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(r * stride_), stride_, v.words().begin());
        return v;
    }

    std::vector<std::size_t> row_support(std::size_t r) const { return row(r).support(); }

    std::size_t nnz() const {
        std::size_t total = 0;
        for (auto w : data_) total += static_cast<std::size_t>(std::popcount(w));
        return total;
    }
    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](std::uint64_t w) { return w == 0; });
    }

    BinaryMatrix transpose() const {
        BinaryMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (auto c : row_support(r)) t.set(c, r);
        }
        return t;
    }

    std::vector<std::size_t> row_degrees() const {
        std::vector<std::size_t> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (auto w : row_words(r)) out[r] += static_cast<std::size_t>(std::popcount(w));
        }
        return out;
    }
    std::vector<std::size_t> column_degrees() const {
        std::vector<std::size_t> out(cols_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (auto c : row_support(r)) ++out[c];
        }
        return out;
    }

    friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

private:
    void check_index(std::size_t r, std::size_t c) const {
        if (r >= rows_ || c >= cols_) throw std::out_of_range("BinaryMatrix: index out of range");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t stride_ = 0;
    std::vector<std::uint64_t> data_;
};

inline BinaryMatrix gf2_matmul(const BinaryMatrix& a, const BinaryMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("gf2_matmul: dimension mismatch");
    BinaryMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto dst = out.row_words(i);
        for (auto k : a.row_support(i)) {
            auto src = b.row_words(k);
            for (std::size_t w = 0; w < dst.size(); ++w) dst[w] ^= src[w];
        }
    }
    return out;
}

/// Kronecker product over GF(2).
inline BinaryMatrix kron(const BinaryMatrix& a, const BinaryMatrix& b) {
    BinaryMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (auto j : a.row_support(i)) {
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (auto l : b.row_support(k)) out.set(i * b.rows() + k, j * b.cols() + l);
            }
        }
    }
    return out;
}

/// [a | b]
inline BinaryMatrix hstack(const BinaryMatrix& a, const BinaryMatrix& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("hstack: row count mismatch");
    BinaryMatrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (auto c : a.row_support(r)) out.set(r, c);
        for (auto c : b.row_support(r)) out.set(r, a.cols() + c);
    }
    return out;
}

/// s = e * H^T: one parity bit per row of H.
inline BitVector syndrome(const BinaryMatrix& h, const BitVector& e) {
    if (e.size() != h.cols()) throw std::invalid_argument("syndrome: error length does not match H.cols");
    BitVector s(h.rows());
    for (std::size_t r = 0; r < h.rows(); ++r) {
        auto row = h.row_words(r);
        auto ew = e.words();
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < row.size(); ++w) acc ^= row[w] & ew[w];
        if (std::popcount(acc) & 1) s.set(r);
    }
    return s;
}

/// Reduced row-echelon basis of a rowspace. rows[i] has its leading one at pivots[i]
/// and is the only basis row with a one in that column.
struct RowBasis {
    std::size_t cols = 0;
    std::vector<BitVector> rows;
    std::vector<std::size_t> pivots;

    std::size_t rank() const { return rows.size(); }
};

inline RowBasis row_reduce(const BinaryMatrix& m) {
    std::vector<BitVector> work;
    work.reserve(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) work.push_back(m.row(r));

    RowBasis basis;
    basis.cols = m.cols();
    std::size_t rank = 0;
    for (std::size_t col = 0; col < m.cols() && rank < work.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < work.size() && !work[pivot].get(col)) ++pivot;
        if (pivot == work.size()) continue;
        std::swap(work[rank], work[pivot]);
        for (std::size_t r = 0; r < work.size(); ++r) {
            if (r != rank && work[r].get(col)) work[r] ^= work[rank];
        }
        basis.pivots.push_back(col);
        ++rank;
    }
    work.resize(rank);
    basis.rows = std::move(work);
    return basis;
}

inline std::size_t gf2_rank(const BinaryMatrix& m) { return row_reduce(m).rank(); }

/// Residue of v after eliminating every pivot column; zero iff v lies in the rowspace.
inline BitVector reduce_against(const RowBasis& basis, BitVector v) {
    if (v.size() != basis.cols) throw std::invalid_argument("in_rowspace: vector length does not match basis");
    for (std::size_t i = 0; i < basis.rows.size(); ++i) {
        if (v.get(basis.pivots[i])) v ^= basis.rows[i];
    }
    return v;
}

inline bool in_rowspace(const RowBasis& basis, const BitVector& v) { return reduce_against(basis, v).none(); }

/// Basis of {x : H x^T = 0}, one vector per free column of the echelon form.
inline std::vector<BitVector> kernel_basis(const BinaryMatrix& h) {
    const RowBasis basis = row_reduce(h);
    std::vector<bool> is_pivot(h.cols(), false);
    for (auto p : basis.pivots) is_pivot[p] = true;
    std::vector<BitVector> out;
    for (std::size_t free = 0; free < h.cols(); ++free) {
        if (is_pivot[free]) continue;
        BitVector x(h.cols());
        x.set(free);
        for (std::size_t i = 0; i < basis.rows.size(); ++i) {
            if (basis.rows[i].get(free)) x.set(basis.pivots[i]);
        }
        out.push_back(std::move(x));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text formats.
//
// Dense: one row per line of '0'/'1' characters. Blank lines and lines starting
// with '#' are ignored.
// Sparse: header "rows cols nnz" followed by nnz lines "r c" (1-indexed).
// ---------------------------------------------------------------------------

inline BinaryMatrix read_dense(std::istream& in) {
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        rows.push_back(line);
    }
    return BinaryMatrix::from_rows(rows);
}

inline void write_dense(std::ostream& out, const BinaryMatrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) out << m.row(r).to_string() << '\n';
}

inline BinaryMatrix read_sparse(std::istream& in) {
    std::string line;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            if (!line.empty() && (line.front() == '%' || line.front() == '#')) continue;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            return true;
        }
        return false;
    };
    if (!next_line()) throw std::runtime_error("sparse matrix: missing header");
    std::istringstream header(line);
    std::size_t rows = 0, cols = 0, nnz = 0;
    if (!(header >> rows >> cols >> nnz)) throw std::runtime_error("sparse matrix: header must be 'rows cols nnz'");
    BinaryMatrix m(rows, cols);
    for (std::size_t k = 0; k < nnz; ++k) {
        if (!next_line()) throw std::runtime_error("sparse matrix: fewer entries than declared");
        std::istringstream entry(line);
        std::size_t r = 0, c = 0;
        if (!(entry >> r >> c) || r == 0 || c == 0 || r > rows || c > cols) {
            throw std::runtime_error("sparse matrix: bad entry '" + line + "'");
        }
        m.set(r - 1, c - 1);
    }
    return m;
}

inline void write_sparse(std::ostream& out, const BinaryMatrix& m) {
    out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (auto c : m.row_support(r)) out << r + 1 << ' ' << c + 1 << '\n';
    }
}

}  // namespace qtbf
