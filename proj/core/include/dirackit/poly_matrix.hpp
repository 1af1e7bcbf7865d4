#pragma once

// Dense matrices with PolyExpr entries; the workhorse for C, J*, the
// projector and the forD residual in symbolic pipelines.

#include "dirackit/exact_linalg.hpp"
#include "dirackit/poly.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace dirackit {

class PolyMatrix {
public:
    PolyMatrix() : rows_(0), cols_(0), nvars_(0) {}
    PolyMatrix(std::size_t rows, std::size_t cols, std::size_t nvars)
        : rows_(rows), cols_(cols), nvars_(nvars),
          m_(rows * cols, PolyExpr(nvars)) {}

    static PolyMatrix identity(std::size_t n, std::size_t nvars);
    static PolyMatrix from_rationals(const RationalMatrix& r, std::size_t nvars);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nvars() const { return nvars_; }

    PolyExpr& at(std::size_t i, std::size_t j) { return m_[i * cols_ + j]; }
    const PolyExpr& at(std::size_t i, std::size_t j) const { return m_[i * cols_ + j]; }

    PolyMatrix transpose() const;
    PolyMatrix operator-() const;
    friend PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b);
    friend PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b);
    friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);

    friend bool operator==(const PolyMatrix& a, const PolyMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.m_ == b.m_;
    }

    bool is_zero() const;
    bool is_antisymmetric() const;  // structural: entry(i,j) == -entry(j,i)
    bool is_constant() const;
    std::size_t max_degree() const;

    Eigen::MatrixXd eval(std::span<const double> point) const;
    RationalMatrix eval_exact(std::span<const Rational> point) const;

private:
    std::size_t rows_, cols_, nvars_;
    std::vector<PolyExpr> m_;
};

} // namespace dirackit
