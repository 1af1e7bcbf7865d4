#pragma once

// Phase space, Poisson structures, constraint sets and the Jacobiator
// (the trilinear obstruction to the Jacobi identity), computed either
// symbolically or through central finite differences on a matrix field.

#include "dirackit/poly.hpp"
#include "dirackit/poly_matrix.hpp"

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dirackit {

struct PhaseSpace {
    std::vector<std::string> var_names;

    explicit PhaseSpace(std::vector<std::string> names);
    std::size_t dim() const { return var_names.size(); }

    friend bool operator==(const PhaseSpace& a, const PhaseSpace& b) {
        return a.var_names == b.var_names;
    }
};

// Antisymmetric N x N matrix of polynomials; antisymmetry is a constructor
// invariant. Jacobi is deliberately *not* an invariant: broken structures
// are representable so negative tests and the counter-example fixture work.
class PoissonStructure {
public:
    PoissonStructure(PhaseSpace space, PolyMatrix entries);

    const PhaseSpace& space() const { return space_; }
    const PolyMatrix& matrix() const { return j_; }
    std::size_t dim() const { return space_.dim(); }

private:
    PhaseSpace space_;
    PolyMatrix j_;
};

// Builds the full antisymmetric matrix from strict upper-triangle entries
// keyed (i, j) with 0 <= i < j < N; unspecified entries are zero.
PoissonStructure build_structure(const PhaseSpace& space,
                                 const std::map<std::pair<std::size_t, std::size_t>,
                                                std::string>& upper_entries);

class ConstraintSet {
public:
    ConstraintSet(PhaseSpace space, std::vector<PolyExpr> phis);

    const PhaseSpace& space() const { return space_; }
    std::size_t count() const { return phis_.size(); }
    const std::vector<PolyExpr>& phis() const { return phis_; }
    const PolyMatrix& qhat() const { return qhat_; }  // M x N Jacobian

    static ConstraintSet parse(const PhaseSpace& space, const std::vector<std::string>& phi_srcs);

private:
    PhaseSpace space_;
    std::vector<PolyExpr> phis_;
    PolyMatrix qhat_;
};

// {F,G} = dF/dz . J(z) dG/dz
PolyExpr bracket(const PolyExpr& f, const PolyExpr& g, const PoissonStructure& j);

// T_ijk = sum_l [ J_il d_l J_jk + J_jl d_l J_ki + J_kl d_l J_ij ].
// Only the independent components i<j<k are stored; the tensor is totally
// antisymmetric so everything else follows by permutation sign.
template <class Scalar>
struct JacobiatorTensor {
    std::size_t n = 0;
    std::vector<Scalar> comps;  // lexicographic over i<j<k

    static std::size_t index_of(std::size_t n, std::size_t i, std::size_t j, std::size_t k);
    const Scalar& at(std::size_t i, std::size_t j, std::size_t k) const {
        return comps[index_of(n, i, j, k)];
    }
};

JacobiatorTensor<PolyExpr> jacobiator(const PoissonStructure& j);

// Pointwise matrix fields (double and exact-rational backed).
using MatrixField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
using ExactMatrixField = std::function<RationalMatrix(std::span<const Rational>)>;

// Central differences, step h per coordinate. Throws std::domain_error on
// non-finite field values and std::invalid_argument on step underflow.
JacobiatorTensor<double> jacobiator_fd(const MatrixField& field, std::size_t n,
                                       const Eigen::VectorXd& point, double step);

// Same finite-difference stencil evaluated in exact rational arithmetic;
// the result is the pure truncation term of the stencil.
JacobiatorTensor<Rational> jacobiator_fd_exact(const ExactMatrixField& field, std::size_t n,
                                               std::span<const Rational> point,
                                               const Rational& step);

// Emits the spec'd soft warning threshold: true when M >= N - 2.
bool constraint_count_excessive(std::size_t m, std::size_t n);

} // namespace dirackit
