#pragma once

// Generalized Dirac-bracket construction: the constraint bracket matrix C,
// solvability of the Casimir condition J Qhat^T (1 - D C) = 0 through the
// kernel condition Ker C <= Ker J Qhat^T, antisymmetric solutions D (exact
// user-supplied or pointwise Moore-Penrose pseudoinverse), the reduced
// matrix J* = J - J Qhat^T D Qhat J and the projector P = 1 - J Qhat^T D Qhat.

#include "dirackit/exact_linalg.hpp"
#include "dirackit/phase.hpp"
#include "dirackit/poly_matrix.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <stdexcept>

namespace dirackit {

struct ObstructionError : std::runtime_error {
    ObstructionError(std::string msg, Eigen::VectorXd w, Eigen::VectorXd at)
        : std::runtime_error(std::move(msg)), witness(std::move(w)), point(std::move(at)) {}
    Eigen::VectorXd witness;  // unit vector v with C v ~ 0 but J Qhat^T v != 0
    Eigen::VectorXd point;
};

struct ResidualError : std::runtime_error {
    ResidualError(std::string msg, std::size_t r, std::size_t c, std::string poly)
        : std::runtime_error(std::move(msg)), row(r), col(c), entry(std::move(poly)) {}
    std::size_t row, col;
    std::string entry;  // offending residual polynomial, canonical form
};

struct AntisymmetryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// C[n][m] = {Phi_n, Phi_m}; equals Qhat J Qhat^T entrywise, antisymmetric.
PolyMatrix compute_C(const PoissonStructure& j, const ConstraintSet& cons);

struct KernelCheck {
    bool holds = true;
    bool rank_ambiguous = false;  // singular value within 100x of the rank threshold
    std::size_t rank = 0;
    double violation = 0;          // ||A v|| for the returned witness
    std::optional<Eigen::VectorXd> witness;
};

struct SolveOptions {
    double svd_threshold = 1e-10;   // keep sigma >= svd_threshold * sigma_max
    double obstruction_tol = 1e-8;  // ||A v|| above this is a certified violation
};

// Numerical route: SVD of C(point), nullspace basis, maximal violation
// direction as witness. `tol` is the violation threshold on ||A v||.
KernelCheck check_kernel_condition(const PoissonStructure& j, const ConstraintSet& cons,
                                   const Eigen::VectorXd& point, double tol,
                                   double svd_threshold = 1e-10);

// Exact route at a rational point: nullspace by row reduction, A v == 0 exactly.
KernelCheck check_kernel_condition_exact(const PoissonStructure& j, const ConstraintSet& cons,
                                         std::span<const Rational> point);

enum class DProvenance { user_supplied, pseudoinverse, block_first_class };

// A solution of the Casimir condition. Symbolic kind wraps a verified
// polynomial matrix; pointwise kind evaluates the Moore-Penrose
// pseudoinverse of C(z) on demand (double SVD route and exact rational
// route produce the same matrix; the exact route is noise-free).
class DSolution {
public:
    bool symbolic() const { return sym_.has_value(); }
    const PolyMatrix& matrix() const;

    Eigen::MatrixXd at(const Eigen::VectorXd& point) const;
    RationalMatrix at_exact(std::span<const Rational> point) const;

    DProvenance provenance() const { return provenance_; }
    bool verified() const { return verified_; }

    // D + Delta where J Qhat^T Delta C = 0 symbolically (checked).
    DSolution perturbed(const PolyMatrix& delta) const;

private:
    friend DSolution solve_D_pointwise(const PoissonStructure&, const ConstraintSet&,
                                       SolveOptions);
    friend DSolution verify_user_D(const PoissonStructure&, const ConstraintSet&,
                                   const PolyMatrix&);
    friend DSolution wrap_unverified_D(const PoissonStructure&, const ConstraintSet&,
                                       const PolyMatrix&);
    friend class DiracSystem;

    struct PointwiseCtx;
    DSolution() = default;

    std::optional<PolyMatrix> sym_;
    std::shared_ptr<const PointwiseCtx> ctx_;
    std::optional<PolyMatrix> delta_;  // additive symbolic perturbation
    DProvenance provenance_ = DProvenance::pseudoinverse;
    bool verified_ = false;
};

// D(z) = C(z)^+ with antisymmetrization (D - D^T)/2 after the SVD route.
// Evaluation throws ObstructionError at points violating the kernel condition.
DSolution solve_D_pointwise(const PoissonStructure& j, const ConstraintSet& cons,
                            SolveOptions opts = {});

// Checks structural antisymmetry then that J Qhat^T (1 - D C) vanishes
// identically; throws AntisymmetryError / ResidualError otherwise.
DSolution verify_user_D(const PoissonStructure& j, const ConstraintSet& cons,
                        const PolyMatrix& d_user);

// Wraps a user D *without* the residual gate; only build_dirac_matrix_relaxed
// accepts the result. Exists so the counter-example system is representable.
DSolution wrap_unverified_D(const PoissonStructure& j, const ConstraintSet& cons,
                            const PolyMatrix& d_user);

// R = J Qhat^T (1 - D C), N x M; identically zero iff D solves the
// Casimir condition.
PolyMatrix residual_forD(const PoissonStructure& j, const ConstraintSet& cons,
                         const PolyMatrix& d);

class DiracSystem {
public:
    const PoissonStructure& structure() const { return j_; }
    const ConstraintSet& constraints() const { return cons_; }
    const PolyMatrix& c_matrix() const { return c_; }
    const DSolution& d() const { return d_; }
    bool symbolic() const { return jstar_sym_.has_value(); }
    bool relaxed() const { return relaxed_; }
    std::size_t dim() const { return j_.dim(); }

    // Symbolic pipeline products (throw when the system is pointwise).
    const PolyMatrix& jstar() const;
    const PolyMatrix& projector() const;
    PoissonStructure jstar_structure() const;

    // Pointwise products, double route and exact route.
    Eigen::MatrixXd jstar_at(const Eigen::VectorXd& point) const;
    Eigen::MatrixXd projector_at(const Eigen::VectorXd& point) const;
    RationalMatrix jstar_at_exact(std::span<const Rational> point) const;
    RationalMatrix projector_at_exact(std::span<const Rational> point) const;

    Eigen::MatrixXd qhat_at(const Eigen::VectorXd& point) const;
    RationalMatrix qhat_at_exact(std::span<const Rational> point) const;

private:
    friend DiracSystem build_dirac_matrix(const PoissonStructure&, const ConstraintSet&,
                                          const DSolution&);
    friend DiracSystem build_dirac_matrix_relaxed(const PoissonStructure&, const ConstraintSet&,
                                                  const DSolution&);
    static DiracSystem assemble(const PoissonStructure& j, const ConstraintSet& cons,
                                const DSolution& d, bool relaxed);

    DiracSystem(PoissonStructure j, ConstraintSet cons, PolyMatrix c, DSolution d)
        : j_(std::move(j)), cons_(std::move(cons)), c_(std::move(c)), d_(std::move(d)) {}

    PoissonStructure j_;
    ConstraintSet cons_;
    PolyMatrix c_;
    DSolution d_;
    PolyMatrix a_sym_;  // J Qhat^T, cached for the pointwise evaluators
    std::optional<PolyMatrix> jstar_sym_;
    std::optional<PolyMatrix> p_sym_;
    bool relaxed_ = false;
};

// Refuses unverified D (std::invalid_argument).
DiracSystem build_dirac_matrix(const PoissonStructure& j, const ConstraintSet& cons,
                               const DSolution& d);

// Negative-testing constructor: accepts unverified symbolic D.
DiracSystem build_dirac_matrix_relaxed(const PoissonStructure& j, const ConstraintSet& cons,
                                       const DSolution& d);

// Antisymmetric polynomial perturbations Delta with J Qhat^T Delta C = 0,
// found by exact linear algebra on the coefficient system. `degree` is the
// maximal total degree of Delta entries (0 = constant, the default).
// Returns std::nullopt when only Delta = 0 solves the system (rigid).
std::optional<PolyMatrix> perturbation_delta(const PoissonStructure& j,
                                             const ConstraintSet& cons, unsigned seed,
                                             unsigned degree = 0);

// Spec-facing wrapper: D + Delta, or std::nullopt when rigid.
std::optional<DSolution> perturb_D(const PoissonStructure& j, const ConstraintSet& cons,
                                   const DSolution& d, unsigned seed, unsigned degree = 0);

} // namespace dirackit
