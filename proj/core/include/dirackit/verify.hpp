#pragma once

// Verification battery: antisymmetry, the Casimir property (everywhere, not
// just on the constraint surface), the Jacobi identity, projector identities
// and bracket uniqueness, reduced into a deterministic structured report.

#include "dirackit/dirac.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dirackit {

enum class CheckStatus { pass, fail, skipped };

struct Witness {
    std::vector<double> point;
    std::vector<int> indices;
    std::vector<double> vector;  // certificate vector (kernel-condition check)
};

struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::skipped;
    bool exact_zero = false;               // symbolic-mode success
    std::optional<double> max_residual;    // absent for exact-zero / skipped
    std::optional<Witness> witness;        // present on every fail
    std::string reason;                    // for skipped checks
};

struct Tolerances {
    double casimir = 1e-10;
    double jacobi = 1e-6;
    double projector = 1e-10;
    double uniqueness = 1e-10;
    double kernel = 1e-8;
    double jacobi_step = 1e-5;
};

struct SamplePlan {
    unsigned seed = 0;
    std::size_t count = 100;
    double box_halfwidth = 2.0;
    // Rank-transition guards on C(z): points with exact rank below the
    // generic rank, with a kept singular value under sigma_floor, or inside
    // the 100x rank-ambiguity band are excluded and counted.
    double sigma_floor = 1e-3;
};

struct SampleSet {
    std::vector<Eigen::VectorXd> points;
    std::size_t excluded_rank_drop = 0;
    std::size_t excluded_ambiguous = 0;
    std::size_t generic_rank = 0;
};

// Draws dyadic-rational points (exactly representable in double) so the
// exact evaluation backend sees the same coordinates as the double one.
SampleSet draw_samples(const PoissonStructure& j, const ConstraintSet& cons,
                       const SamplePlan& plan);

CheckResult check_antisymmetry(const DiracSystem& sys,
                               const std::vector<Eigen::VectorXd>& points, double tol);

// max-norm of J*(z) Qhat(z)^T over the points; symbolic systems are checked
// structurally first and report exact-zero on success.
CheckResult check_casimir(const DiracSystem& sys, const std::vector<Eigen::VectorXd>& points,
                          double tol);

// Second, independent route to the same residual: J Qhat^T (1 - D C).
CheckResult check_forD_residual(const DiracSystem& sys,
                                const std::vector<Eigen::VectorXd>& points, double tol);

// Symbolic (exact tensor must vanish) for symbolic systems; finite
// differences of the pointwise J* field (exact-arithmetic stencil) otherwise.
CheckResult check_jacobi(const DiracSystem& sys, const std::vector<Eigen::VectorXd>& points,
                         double step, double tol);

CheckResult check_kernel(const DiracSystem& sys, const std::vector<Eigen::VectorXd>& points,
                         double tol);

CheckResult check_projector_idempotent(const DiracSystem& sys,
                                       const std::vector<Eigen::VectorXd>& points, double tol);
CheckResult check_projector_annihilation(const DiracSystem& sys,
                                         const std::vector<Eigen::VectorXd>& points, double tol);
CheckResult check_projector_reconstruction(const DiracSystem& sys,
                                           const std::vector<Eigen::VectorXd>& points,
                                           double tol);

// Rebuilds J* for perturbed solutions D + Delta; pass when every perturbed
// bracket agrees (structurally for symbolic D, pointwise otherwise) or the
// solution space is rigid.
CheckResult check_uniqueness(const DiracSystem& sys, std::size_t n_perturbations, double tol,
                             unsigned seed, const std::vector<Eigen::VectorXd>& points,
                             unsigned delta_degree = 0);

enum class Classification { jacobi_and_casimir, jacobi_only, casimir_only, neither };

std::string to_string(Classification c);

// Joint Jacobi/Casimir classification; the counter-example system comes out
// jacobi_only.
Classification check_counterexample_semantics(const DiracSystem& sys,
                                              const std::vector<Eigen::VectorXd>& points,
                                              const Tolerances& tols);

struct VerificationReport {
    std::vector<CheckResult> checks;  // ordered by name
    std::vector<std::vector<double>> sample_points;
    unsigned seed = 0;
    std::map<std::string, double> tolerances;
    std::optional<Classification> classification;
    std::size_t excluded_rank_drop = 0;
    std::size_t excluded_ambiguous = 0;

    nlohmann::json to_json() const;
    std::string summary() const;  // one line per check
    bool kernel_violated() const;
    bool any_failed() const;
};

struct BatteryOptions {
    SamplePlan plan;
    Tolerances tols;
    std::size_t uniqueness_perturbations = 3;
};

VerificationReport run_battery(const DiracSystem& sys, const BatteryOptions& opts);

} // namespace dirackit
