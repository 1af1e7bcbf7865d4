#include "dirackit/verify.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace dirackit {
namespace {

std::vector<Rational> rational_point(const Eigen::VectorXd& z) {
    std::vector<Rational> p(static_cast<std::size_t>(z.size()));
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = Rational::from_double(z[static_cast<Eigen::Index>(i)]);
    return p;
}

std::vector<double> std_point(const Eigen::VectorXd& z) {
    return std::vector<double>(z.data(), z.data() + z.size());
}

// Tracks the worst residual over points with its witness location.
struct MaxTracker {
    double value = 0;
    std::optional<Witness> witness;

    void update(double v, const Eigen::VectorXd& point, std::vector<int> indices) {
        if (!witness || v > value) {
            value = v;
            witness = Witness{std_point(point), std::move(indices), {}};
        }
    }
};

CheckResult summarize(std::string name, const MaxTracker& t, double tol) {
    CheckResult r;
    r.name = std::move(name);
    r.max_residual = t.value;
    if (t.value <= tol) {
        r.status = CheckStatus::pass;
    } else {
        r.status = CheckStatus::fail;
        r.witness = t.witness;
    }
    return r;
}

CheckResult exact_pass(std::string name) {
    CheckResult r;
    r.name = std::move(name);
    r.status = CheckStatus::pass;
    r.exact_zero = true;
    return r;
}

// Worst entry of |m| with its index pair.
std::pair<double, std::pair<int, int>> max_entry(const Eigen::MatrixXd& m) {
    double best = 0;
    std::pair<int, int> at{0, 0};
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = std::fabs(m(i, j));
            if (v > best) {
                best = v;
                at = {static_cast<int>(i), static_cast<int>(j)};
            }
        }
    return {best, at};
}

// Evaluates a symbolic residual matrix over the points (used when a
// structural zero test already failed and a witness is wanted).
CheckResult fail_from_symbolic(std::string name, const PolyMatrix& residual,
                               const std::vector<Eigen::VectorXd>& points, double tol) {
    MaxTracker t;
    for (const auto& z : points) {
        const auto [v, ij] = max_entry(residual.eval(std_point(z)));
        t.update(v, z, {ij.first, ij.second});
    }
    if (points.empty() && !residual.is_zero()) {
        // No sample points: report the failure without a witness point.
        CheckResult r;
        r.name = std::move(name);
        r.status = CheckStatus::fail;
        r.max_residual = std::numeric_limits<double>::infinity();
        return r;
    }
    return summarize(std::move(name), t, tol);
}

} // namespace

SampleSet draw_samples(const PoissonStructure& j, const ConstraintSet& cons,
                       const SamplePlan& plan) {
    const std::size_t n = j.dim();
    const std::size_t m = cons.count();
    SampleSet out;
    std::mt19937_64 rng(plan.seed);

    auto next_coord = [&]() {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
        const double x = -plan.box_halfwidth + 2.0 * plan.box_halfwidth * u;
        // Snap to a dyadic grid so double and exact backends agree bit-for-bit.
        return std::round(x * 1048576.0) / 1048576.0;
    };
    auto draw_point = [&]() {
        Eigen::VectorXd z(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) z[static_cast<Eigen::Index>(i)] = next_coord();
        return z;
    };

    const PolyMatrix c_sym = compute_C(j, cons);

    // Generic rank of C from a handful of probes, decided exactly.
    if (m > 0) {
        for (int probe = 0; probe < 8; ++probe) {
            const Eigen::VectorXd z = draw_point();
            const auto r = rank_exact(c_sym.eval_exact(rational_point(z)));
            out.generic_rank = std::max(out.generic_rank, r);
        }
    }

    const std::size_t max_attempts = plan.count * 64 + 256;
    std::size_t attempts = 0;
    while (out.points.size() < plan.count && attempts < max_attempts) {
        ++attempts;
        Eigen::VectorXd z = draw_point();
        if (m > 0) {
            const RationalMatrix cq = c_sym.eval_exact(rational_point(z));
            if (rank_exact(cq) < out.generic_rank) {
                ++out.excluded_rank_drop;
                continue;
            }
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(cq.to_double());
            const auto& sig = svd.singularValues();
            const double smax = sig.size() ? sig[0] : 0.0;
            if (smax >= 1e-300) {
                const double thr = 1e-10 * smax;
                bool bad = false;
                double kept_min = smax;
                for (Eigen::Index i = 0; i < sig.size(); ++i) {
                    const double s = sig[i];
                    if (s > 0 && s / thr < 100.0 && s / thr > 0.01) bad = true;
                    if (s >= thr) kept_min = std::min(kept_min, s);
                }
                if (kept_min < plan.sigma_floor) {
                    ++out.excluded_rank_drop;
                    continue;
                }
                if (bad) {
                    ++out.excluded_ambiguous;
                    continue;
                }
            }
        }
        out.points.push_back(std::move(z));
    }
    return out;
}

CheckResult check_antisymmetry(const DiracSystem& sys,
                               const std::vector<Eigen::VectorXd>& points, double tol) {
    if (sys.symbolic()) {
        if (sys.jstar().is_antisymmetric()) return exact_pass("antisymmetry");
        return fail_from_symbolic("antisymmetry", sys.jstar() + sys.jstar().transpose(), points,
                                  tol);
    }
    MaxTracker t;
    for (const auto& z : points) {
        const Eigen::MatrixXd js = sys.jstar_at(z);
        const auto [v, ij] = max_entry(js + js.transpose());
        t.update(v, z, {ij.first, ij.second});
    }
    return summarize("antisymmetry", t, tol);
}

CheckResult check_casimir(const DiracSystem& sys, const std::vector<Eigen::VectorXd>& points,
                          double tol) {
    const std::size_t m = sys.constraints().count();
    if (m == 0) {
        CheckResult r = exact_pass("casimir");
        r.reason = "no constraints";
        return r;
    }
    if (sys.symbolic()) {
        const PolyMatrix residual = sys.jstar() * sys.constraints().qhat().transpose();
        if (residual.is_zero()) return exact_pass("casimir");
        return fail_from_symbolic("casimir", residual, points, tol);
    }
    MaxTracker t;
    for (const auto& z : points) {
        const Eigen::MatrixXd r = sys.jstar_at(z) * sys.qhat_at(z).transpose();
        const auto [v, ij] = max_entry(r);
        t.update(v, z, {ij.first, ij.second});
    }
    return summarize("casimir", t, tol);
}

CheckResult check_forD_residual(const DiracSystem& sys,
                                const std::vector<Eigen::VectorXd>& points, double tol) {
    const std::size_t m = sys.constraints().count();
    if (m == 0) {
        CheckResult r = exact_pass("ford_residual");
        r.reason = "no constraints";
        return r;
    }
    if (sys.d().symbolic()) {
        const PolyMatrix residual = residual_forD(sys.structure(), sys.constraints(),
                                                  sys.d().matrix());
        if (residual.is_zero()) return exact_pass("ford_residual");
        return fail_from_symbolic("ford_residual", residual, points, tol);
    }
    const PolyMatrix a = sys.structure().matrix() * sys.constraints().qhat().transpose();
    MaxTracker t;
    const PolyMatrix c_sym = sys.c_matrix();
    for (const auto& z : points) {
        const auto zs = std_point(z);
        const Eigen::MatrixXd av = a.eval(zs);
        const Eigen::MatrixXd cv = c_sym.eval(zs);
        const Eigen::MatrixXd dv = sys.d().at(z);
        const auto [v, ij] = max_entry(av - av * (dv * cv));
        t.update(v, z, {ij.first, ij.second});
    }
    return summarize("ford_residual", t, tol);
}

CheckResult check_jacobi(const DiracSystem& sys, const std::vector<Eigen::VectorXd>& points,
                         double step, double tol) {
    const std::size_t n = sys.dim();
    if (n < 3) {
        CheckResult r = exact_pass("jacobi");
        r.reason = "fewer than three variables";
        return r;
    }
    if (sys.symbolic()) {
        const auto tensor = jacobiator(sys.jstar_structure());
        bool all_zero = true;
        for (const auto& c : tensor.comps)
            if (!c.is_zero()) {
                all_zero = false;
                break;
            }
        if (all_zero) return exact_pass("jacobi");
        MaxTracker t;
        for (const auto& z : points) {
            const auto zs = std_point(z);
            std::size_t idx = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t jj = i + 1; jj < n; ++jj)
                    for (std::size_t k = jj + 1; k < n; ++k) {
                        const double v = std::fabs(tensor.comps[idx++].eval(zs));
                        t.update(v, z,
                                 {static_cast<int>(i), static_cast<int>(jj),
                                  static_cast<int>(k)});
                    }
        }
        return summarize("jacobi", t, tol);
    }

    // Pointwise J*: central differences on the exact evaluation backend, so
    // the residual is pure stencil truncation.
    const Rational h = Rational::from_double(step);
    ExactMatrixField field = [&sys](std::span<const Rational> z) {
        return sys.jstar_at_exact(z);
    };
    MaxTracker t;
    for (const auto& z : points) {
        const auto zr = rational_point(z);
        const auto tensor = jacobiator_fd_exact(field, n, zr, h);
        std::size_t idx = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t jj = i + 1; jj < n; ++jj)
                for (std::size_t k = jj + 1; k < n; ++k) {
                    const double v = std::fabs(tensor.comps[idx++].to_double());
                    t.update(v, z,
                             {static_cast<int>(i), static_cast<int>(jj), static_cast<int>(k)});
                }
    }
    return summarize("jacobi", t, tol);
}

CheckResult check_kernel(const DiracSystem& sys, const std::vector<Eigen::VectorXd>& points,
                         double tol) {
    if (sys.constraints().count() == 0) {
        CheckResult r = exact_pass("kernel_condition");
        r.reason = "no constraints";
        return r;
    }
    MaxTracker t;
    for (const auto& z : points) {
        const KernelCheck kc = check_kernel_condition(sys.structure(), sys.constraints(), z, tol);
        if (kc.rank_ambiguous) continue;  // excluded from pass/fail statistics
        if (!kc.holds) {
            CheckResult r;
            r.name = "kernel_condition";
            r.status = CheckStatus::fail;
            r.max_residual = kc.violation;
            Witness w;
            w.point = std_point(z);
            if (kc.witness)
                for (Eigen::Index i = 0; i < kc.witness->size(); ++i)
                    w.vector.push_back((*kc.witness)[i]);
            r.witness = w;
            return r;
        }
        t.update(kc.violation, z, {});
    }
    return summarize("kernel_condition", t, tol);
}

namespace {

template <class Fn>
CheckResult pointwise_projector_check(const char* name,
                                      const std::vector<Eigen::VectorXd>& points, double tol,
                                      Fn residual_at) {
    MaxTracker t;
    for (const auto& z : points) {
        const auto [v, ij] = max_entry(residual_at(z));
        t.update(v, z, {ij.first, ij.second});
    }
    return summarize(name, t, tol);
}

} // namespace

CheckResult check_projector_idempotent(const DiracSystem& sys,
                                       const std::vector<Eigen::VectorXd>& points, double tol) {
    return pointwise_projector_check("projector_idempotent", points, tol,
                                     [&](const Eigen::VectorXd& z) {
                                         const Eigen::MatrixXd p = sys.projector_at(z);
                                         return Eigen::MatrixXd(p * p - p);
                                     });
}

CheckResult check_projector_annihilation(const DiracSystem& sys,
                                         const std::vector<Eigen::VectorXd>& points,
                                         double tol) {
    const PolyMatrix a = sys.structure().matrix() * sys.constraints().qhat().transpose();
    return pointwise_projector_check("projector_annihilation", points, tol,
                                     [&](const Eigen::VectorXd& z) {
                                         const Eigen::MatrixXd p = sys.projector_at(z);
                                         return Eigen::MatrixXd(p * a.eval(std_point(z)));
                                     });
}

CheckResult check_projector_reconstruction(const DiracSystem& sys,
                                           const std::vector<Eigen::VectorXd>& points,
                                           double tol) {
    return pointwise_projector_check(
        "projector_reconstruction", points, tol, [&](const Eigen::VectorXd& z) {
            const Eigen::MatrixXd p = sys.projector_at(z);
            const Eigen::MatrixXd jv = sys.structure().matrix().eval(std_point(z));
            return Eigen::MatrixXd(sys.jstar_at(z) - p * jv * p.transpose());
        });
}

CheckResult check_uniqueness(const DiracSystem& sys, std::size_t n_perturbations, double tol,
                             unsigned seed, const std::vector<Eigen::VectorXd>& points,
                             unsigned delta_degree) {
    CheckResult r;
    r.name = "uniqueness";
    if (!sys.d().verified()) {
        r.status = CheckStatus::skipped;
        r.reason = "D is unverified";
        return r;
    }

    MaxTracker t;
    bool any_perturbation = false;
    for (std::size_t k = 0; k < n_perturbations; ++k) {
        auto perturbed = perturb_D(sys.structure(), sys.constraints(), sys.d(),
                                   seed + static_cast<unsigned>(k), delta_degree);
        if (!perturbed) break;  // rigid: nothing further to compare
        any_perturbation = true;
        const DiracSystem alt = build_dirac_matrix(sys.structure(), sys.constraints(),
                                                   *perturbed);
        if (sys.symbolic() && alt.symbolic()) {
            if (!(sys.jstar() == alt.jstar()))
                return fail_from_symbolic("uniqueness", sys.jstar() - alt.jstar(), points, tol);
        } else {
            for (const auto& z : points) {
                const auto [v, ij] = max_entry(sys.jstar_at(z) - alt.jstar_at(z));
                t.update(v, z, {ij.first, ij.second});
            }
        }
    }
    if (!any_perturbation) {
        r.status = CheckStatus::pass;
        r.exact_zero = true;
        r.reason = "rigid";
        return r;
    }
    if (!t.witness) {
        // symbolic comparisons all agreed structurally
        r.status = CheckStatus::pass;
        r.exact_zero = true;
        return r;
    }
    return summarize("uniqueness", t, tol);
}

std::string to_string(Classification c) {
    switch (c) {
        case Classification::jacobi_and_casimir: return "jacobi_and_casimir";
        case Classification::jacobi_only: return "jacobi_only";
        case Classification::casimir_only: return "casimir_only";
        case Classification::neither: return "neither";
    }
    return "unknown";
}

Classification check_counterexample_semantics(const DiracSystem& sys,
                                              const std::vector<Eigen::VectorXd>& points,
                                              const Tolerances& tols) {
    const CheckResult jac = check_jacobi(sys, points, tols.jacobi_step, tols.jacobi);
    const CheckResult cas = check_casimir(sys, points, tols.casimir);
    const bool j_ok = jac.status == CheckStatus::pass;
    // A vacuous Casimir pass (no constraints) is reported in the check itself
    // but does not classify the system as Casimir-holding.
    const bool c_ok = cas.status == CheckStatus::pass && sys.constraints().count() > 0;
    if (j_ok && c_ok) return Classification::jacobi_and_casimir;
    if (j_ok) return Classification::jacobi_only;
    if (c_ok) return Classification::casimir_only;
    return Classification::neither;
}

namespace {

nlohmann::json witness_json(const Witness& w) {
    nlohmann::json j;
    j["point"] = w.point;
    j["indices"] = w.indices;
    if (!w.vector.empty()) j["vector"] = w.vector;
    return j;
}

nlohmann::json check_json(const CheckResult& c) {
    nlohmann::json j;
    j["name"] = c.name;
    j["status"] = c.status == CheckStatus::pass   ? "pass"
                  : c.status == CheckStatus::fail ? "fail"
                                                  : "skipped";
    if (c.exact_zero)
        j["max_residual"] = "exact-zero";
    else if (c.max_residual)
        j["max_residual"] = *c.max_residual;
    if (c.witness) j["witness"] = witness_json(*c.witness);
    if (!c.reason.empty()) j["reason"] = c.reason;
    return j;
}

} // namespace

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json j;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) j["checks"].push_back(check_json(c));
    j["sample_points"] = sample_points;
    j["seed"] = seed;
    j["tolerances"] = tolerances;
    if (classification) j["classification"] = to_string(*classification);
    j["sampling"] = {{"excluded_rank_drop", excluded_rank_drop},
                     {"excluded_ambiguous", excluded_ambiguous}};
    return j;
}

std::string VerificationReport::summary() const {
    std::ostringstream out;
    for (const auto& c : checks) {
        out << c.name << ": "
            << (c.status == CheckStatus::pass   ? "pass"
                : c.status == CheckStatus::fail ? "FAIL"
                                                : "skipped");
        if (c.exact_zero)
            out << " (exact-zero)";
        else if (c.max_residual)
            out << " (max residual " << *c.max_residual << ")";
        if (!c.reason.empty()) out << " [" << c.reason << "]";
        out << "\n";
    }
    if (classification) out << "classification: " << to_string(*classification) << "\n";
    return out.str();
}

bool VerificationReport::kernel_violated() const {
    for (const auto& c : checks)
        if (c.name == "kernel_condition" && c.status == CheckStatus::fail) return true;
    return false;
}

bool VerificationReport::any_failed() const {
    for (const auto& c : checks)
        if (c.status == CheckStatus::fail) return true;
    return false;
}

VerificationReport run_battery(const DiracSystem& sys, const BatteryOptions& opts) {
    const SampleSet samples = draw_samples(sys.structure(), sys.constraints(), opts.plan);
    const auto& pts = samples.points;
    const Tolerances& tols = opts.tols;

    VerificationReport report;
    report.seed = opts.plan.seed;
    report.excluded_rank_drop = samples.excluded_rank_drop;
    report.excluded_ambiguous = samples.excluded_ambiguous;
    report.tolerances = {{"casimir", tols.casimir},
                         {"jacobi", tols.jacobi},
                         {"kernel", tols.kernel},
                         {"projector", tols.projector},
                         {"step", tols.jacobi_step},
                         {"uniqueness", tols.uniqueness}};

    // The kernel condition gates everything else: a pointwise D cannot even
    // be evaluated where it fails, so the remaining checks are skipped.
    const CheckResult kernel = check_kernel(sys, pts, tols.kernel);
    const bool obstructed = kernel.status == CheckStatus::fail && !sys.d().symbolic();
    report.checks.push_back(kernel);
    if (obstructed) {
        for (const char* name :
             {"antisymmetry", "casimir", "ford_residual", "jacobi", "projector_annihilation",
              "projector_idempotent", "projector_reconstruction", "uniqueness"}) {
            CheckResult c;
            c.name = name;
            c.status = CheckStatus::skipped;
            c.reason = "kernel condition violated";
            report.checks.push_back(c);
        }
    } else {
        report.checks.push_back(check_antisymmetry(sys, pts, tols.projector));
        report.checks.push_back(check_casimir(sys, pts, tols.casimir));
        report.checks.push_back(check_forD_residual(sys, pts, tols.casimir));
        report.checks.push_back(check_jacobi(sys, pts, tols.jacobi_step, tols.jacobi));
        report.checks.push_back(check_projector_annihilation(sys, pts, tols.projector));
        report.checks.push_back(check_projector_idempotent(sys, pts, tols.projector));
        report.checks.push_back(check_projector_reconstruction(sys, pts, tols.projector));
        report.checks.push_back(check_uniqueness(sys, opts.uniqueness_perturbations,
                                                 tols.uniqueness, opts.plan.seed, pts));
    }

    std::sort(report.checks.begin(), report.checks.end(),
              [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });

    const auto find = [&](const char* n) -> const CheckResult* {
        for (const auto& c : report.checks)
            if (c.name == n) return &c;
        return nullptr;
    };
    const CheckResult* jac = find("jacobi");
    const CheckResult* cas = find("casimir");
    if (jac && cas && jac->status != CheckStatus::skipped) {
        const bool j_ok = jac->status == CheckStatus::pass;
        const bool c_ok = cas->status == CheckStatus::pass && sys.constraints().count() > 0;
        report.classification = j_ok && c_ok ? Classification::jacobi_and_casimir
                                : j_ok       ? Classification::jacobi_only
                                : c_ok       ? Classification::casimir_only
                                             : Classification::neither;
    }

    report.sample_points.reserve(pts.size());
    for (const auto& z : pts) report.sample_points.push_back(std_point(z));
    return report;
}

} // namespace dirackit
