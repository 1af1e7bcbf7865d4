#include "dirackit/exact_linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace dirackit {

RationalMatrix RationalMatrix::identity(std::size_t n) {
    RationalMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i) r.at(i, i) = Rational(1);
    return r;
}

RationalMatrix RationalMatrix::from_double(const Eigen::MatrixXd& m) {
    RationalMatrix r(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (std::size_t i = 0; i < r.rows(); ++i)
        for (std::size_t j = 0; j < r.cols(); ++j)
            r.at(i, j) = Rational::from_double(m(static_cast<Eigen::Index>(i),
                                                 static_cast<Eigen::Index>(j)));
    return r;
}

RationalMatrix RationalMatrix::transpose() const {
    RationalMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
}

RationalMatrix RationalMatrix::operator-() const {
    RationalMatrix r(rows_, cols_);
    for (std::size_t k = 0; k < m_.size(); ++k) r.m_[k] = -m_[k];
    return r;
}

RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
        throw std::invalid_argument("RationalMatrix: shape mismatch in +");
    RationalMatrix r(a.rows_, a.cols_);
    for (std::size_t k = 0; k < r.m_.size(); ++k) r.m_[k] = a.m_[k] + b.m_[k];
    return r;
}

RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
        throw std::invalid_argument("RationalMatrix: shape mismatch in -");
    RationalMatrix r(a.rows_, a.cols_);
    for (std::size_t k = 0; k < r.m_.size(); ++k) r.m_[k] = a.m_[k] - b.m_[k];
    return r;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols_ != b.rows_)
        throw std::invalid_argument("RationalMatrix: shape mismatch in *");
    RationalMatrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            if (a.at(i, k).is_zero()) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) {
                if (b.at(k, j).is_zero()) continue;
                r.at(i, j) += a.at(i, k) * b.at(k, j);
            }
        }
    return r;
}

RationalMatrix RationalMatrix::scaled(const Rational& c) const {
    RationalMatrix r(rows_, cols_);
    for (std::size_t k = 0; k < m_.size(); ++k) r.m_[k] = m_[k] * c;
    return r;
}

bool RationalMatrix::is_zero() const {
    for (const auto& v : m_)
        if (!v.is_zero()) return false;
    return true;
}

bool RationalMatrix::is_antisymmetric() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            if (at(i, j) != -at(j, i)) return false;
    return true;
}

double RationalMatrix::max_abs() const {
    double m = 0;
    for (const auto& v : m_) m = std::max(m, std::fabs(v.to_double()));
    return m;
}

Eigen::MatrixXd RationalMatrix::to_double() const {
    Eigen::MatrixXd r(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = at(i, j).to_double();
    return r;
}

RowEchelon row_reduce(const RationalMatrix& a) {
    RowEchelon out;
    out.reduced = a;
    RationalMatrix& m = out.reduced;
    const std::size_t rows = m.rows(), cols = m.cols();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (!m.at(i, c).is_zero()) { piv = i; break; }
        if (piv == rows) continue;
        if (piv != r)
            for (std::size_t j = 0; j < cols; ++j) std::swap(m.at(piv, j), m.at(r, j));
        const Rational inv = Rational(1) / m.at(r, c);
        for (std::size_t j = c; j < cols; ++j) m.at(r, j) *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m.at(i, c).is_zero()) continue;
            const Rational f = m.at(i, c);
            for (std::size_t j = c; j < cols; ++j) m.at(i, j) -= f * m.at(r, j);
        }
        out.pivots.push_back(c);
        ++r;
    }
    out.rank = r;
    return out;
}

std::size_t rank_exact(const RationalMatrix& a) { return row_reduce(a).rank; }

RationalMatrix nullspace(const RationalMatrix& a) {
    const RowEchelon re = row_reduce(a);
    const std::size_t cols = a.cols();
    std::vector<bool> is_pivot(cols, false);
    for (auto p : re.pivots) is_pivot[p] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < cols; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);

    RationalMatrix basis(cols, free_cols.size());
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
        const std::size_t fc = free_cols[k];
        basis.at(fc, k) = Rational(1);
        for (std::size_t r = 0; r < re.rank; ++r)
            basis.at(re.pivots[r], k) = -re.reduced.at(r, fc);
    }
    return basis;
}

std::optional<RationalMatrix> inverse(const RationalMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("inverse: matrix not square");
    const std::size_t n = a.rows();
    RationalMatrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = a.at(i, j);
        aug.at(i, n + i) = Rational(1);
    }
    const RowEchelon re = row_reduce(aug);
    if (re.rank < n || re.pivots[n - 1] >= n) return std::nullopt;
    RationalMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv.at(i, j) = re.reduced.at(i, n + j);
    return inv;
}

RationalMatrix pseudo_inverse(const RationalMatrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    const RowEchelon re = row_reduce(a);
    const std::size_t r = re.rank;
    if (r == 0) return RationalMatrix(n, m);  // pseudoinverse of the zero matrix

    // A = F G with F = pivot columns of A (m x r), G = nonzero rows of rref (r x n).
    RationalMatrix f(m, r), g(r, n);
    for (std::size_t k = 0; k < r; ++k)
        for (std::size_t i = 0; i < m; ++i) f.at(i, k) = a.at(i, re.pivots[k]);
    for (std::size_t k = 0; k < r; ++k)
        for (std::size_t j = 0; j < n; ++j) g.at(k, j) = re.reduced.at(k, j);

    const RationalMatrix ft = f.transpose();
    const RationalMatrix gt = g.transpose();
    auto ggti = inverse(g * gt);
    auto ftfi = inverse(ft * f);
    if (!ggti || !ftfi)
        throw std::logic_error("pseudo_inverse: rank factorization produced singular factor");
    return gt * (*ggti) * (*ftfi) * ft;
}

} // namespace dirackit
