#pragma once

// Dense exact linear algebra over Rational: row reduction, nullspaces,
// inverses and the Moore-Penrose pseudoinverse via rank factorization.

#include "dirackit/rational.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dirackit {

class RationalMatrix {
public:
    RationalMatrix() : rows_(0), cols_(0) {}
    RationalMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), m_(rows * cols) {}

    static RationalMatrix identity(std::size_t n);
    static RationalMatrix from_double(const Eigen::MatrixXd& m);  // exact

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& at(std::size_t i, std::size_t j) { return m_[i * cols_ + j]; }
    const Rational& at(std::size_t i, std::size_t j) const { return m_[i * cols_ + j]; }

    RationalMatrix transpose() const;
    RationalMatrix operator-() const;
    friend RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b);
    friend RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b);
    friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
    RationalMatrix scaled(const Rational& c) const;

    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.m_ == b.m_;
    }

    bool is_zero() const;
    bool is_antisymmetric() const;
    double max_abs() const;  // max-norm, as double
    Eigen::MatrixXd to_double() const;

private:
    std::size_t rows_, cols_;
    std::vector<Rational> m_;
};

struct RowEchelon {
    RationalMatrix reduced;          // reduced row echelon form
    std::vector<std::size_t> pivots; // pivot column per nonzero row
    std::size_t rank = 0;
};

RowEchelon row_reduce(const RationalMatrix& a);

std::size_t rank_exact(const RationalMatrix& a);

// Columns form a basis of { x : A x = 0 }; 0 columns when the kernel is trivial.
RationalMatrix nullspace(const RationalMatrix& a);

std::optional<RationalMatrix> inverse(const RationalMatrix& a);

// Moore-Penrose pseudoinverse of an arbitrary rational matrix, computed
// exactly through the rank factorization A = F G:
//   A+ = G^T (G G^T)^-1 (F^T F)^-1 F^T.
RationalMatrix pseudo_inverse(const RationalMatrix& a);

} // namespace dirackit
