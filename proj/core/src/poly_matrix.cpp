#include "dirackit/poly_matrix.hpp"

#include <stdexcept>

namespace dirackit {

PolyMatrix PolyMatrix::identity(std::size_t n, std::size_t nvars) {
    PolyMatrix r(n, n, nvars);
    for (std::size_t i = 0; i < n; ++i) r.at(i, i) = PolyExpr::constant(nvars, Rational(1));
    return r;
}

PolyMatrix PolyMatrix::from_rationals(const RationalMatrix& src, std::size_t nvars) {
    PolyMatrix r(src.rows(), src.cols(), nvars);
    for (std::size_t i = 0; i < src.rows(); ++i)
        for (std::size_t j = 0; j < src.cols(); ++j)
            r.at(i, j) = PolyExpr::constant(nvars, src.at(i, j));
    return r;
}

PolyMatrix PolyMatrix::transpose() const {
    PolyMatrix r(cols_, rows_, nvars_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
}

PolyMatrix PolyMatrix::operator-() const {
    PolyMatrix r(rows_, cols_, nvars_);
    for (std::size_t k = 0; k < m_.size(); ++k) r.m_[k] = -m_[k];
    return r;
}

PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.nvars_ != b.nvars_)
        throw std::invalid_argument("PolyMatrix: shape mismatch in +");
    PolyMatrix r(a.rows_, a.cols_, a.nvars_);
    for (std::size_t k = 0; k < r.m_.size(); ++k) r.m_[k] = a.m_[k] + b.m_[k];
    return r;
}

PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.nvars_ != b.nvars_)
        throw std::invalid_argument("PolyMatrix: shape mismatch in -");
    PolyMatrix r(a.rows_, a.cols_, a.nvars_);
    for (std::size_t k = 0; k < r.m_.size(); ++k) r.m_[k] = a.m_[k] - b.m_[k];
    return r;
}

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
    if (a.cols_ != b.rows_ || a.nvars_ != b.nvars_)
        throw std::invalid_argument("PolyMatrix: shape mismatch in *");
    PolyMatrix r(a.rows_, b.cols_, a.nvars_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            if (a.at(i, k).is_zero()) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) {
                if (b.at(k, j).is_zero()) continue;
                r.at(i, j) = r.at(i, j) + a.at(i, k) * b.at(k, j);
            }
        }
    return r;
}

bool PolyMatrix::is_zero() const {
    for (const auto& p : m_)
        if (!p.is_zero()) return false;
    return true;
}

bool PolyMatrix::is_antisymmetric() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            if (at(i, j) != -at(j, i)) return false;
    return true;
}

bool PolyMatrix::is_constant() const {
    for (const auto& p : m_)
        if (!p.is_constant()) return false;
    return true;
}

std::size_t PolyMatrix::max_degree() const {
    std::size_t d = 0;
    for (const auto& p : m_) d = std::max(d, p.degree());
    return d;
}

Eigen::MatrixXd PolyMatrix::eval(std::span<const double> point) const {
    Eigen::MatrixXd r(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = at(i, j).eval(point);
    return r;
}

RationalMatrix PolyMatrix::eval_exact(std::span<const Rational> point) const {
    RationalMatrix r(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r.at(i, j) = at(i, j).eval(point);
    return r;
}

} // namespace dirackit
