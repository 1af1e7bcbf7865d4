#include "dirackit/dirac.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <random>
#include <stdexcept>

namespace dirackit {
namespace {

// J Qhat^T, N x M. Column m is J grad(Phi_m).
PolyMatrix a_matrix(const PoissonStructure& j, const ConstraintSet& cons) {
    return j.matrix() * cons.qhat().transpose();
}

void require_same_space(const PoissonStructure& j, const ConstraintSet& cons) {
    if (!(j.space() == cons.space()))
        throw std::invalid_argument("constraints and Poisson structure use different phase spaces");
}

} // namespace

PolyMatrix compute_C(const PoissonStructure& j, const ConstraintSet& cons) {
    require_same_space(j, cons);
    const std::size_t m = cons.count();
    PolyMatrix c(m, m, j.dim());
    for (std::size_t n = 0; n < m; ++n)
        for (std::size_t k = n + 1; k < m; ++k) {
            PolyExpr b = bracket(cons.phis()[n], cons.phis()[k], j);
            c.at(n, k) = b;
            c.at(k, n) = -b;
        }
    return c;
}

KernelCheck check_kernel_condition(const PoissonStructure& j, const ConstraintSet& cons,
                                   const Eigen::VectorXd& point, double tol,
                                   double svd_threshold) {
    require_same_space(j, cons);
    const std::size_t m = cons.count();
    KernelCheck out;
    if (m == 0) {
        out.holds = true;
        return out;
    }
    const std::size_t n = j.dim();
    if (static_cast<std::size_t>(point.size()) != n)
        throw std::invalid_argument("check_kernel_condition: point dimension mismatch");

    std::vector<double> z(point.data(), point.data() + point.size());
    const Eigen::MatrixXd c = compute_C(j, cons).eval(z);
    const Eigen::MatrixXd a = a_matrix(j, cons).eval(z);
    if (!c.allFinite() || !a.allFinite())
        throw std::domain_error("check_kernel_condition: non-finite matrix entries at point");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sig = svd.singularValues();
    const double smax = sig.size() ? sig[0] : 0.0;

    Eigen::MatrixXd v0;
    if (smax < 1e-300) {
        out.rank = 0;
        v0 = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                       static_cast<Eigen::Index>(m));
    } else {
        const double thr = svd_threshold * smax;
        std::size_t rank = 0;
        for (Eigen::Index i = 0; i < sig.size(); ++i) {
            const double s = sig[i];
            if (s >= thr) ++rank;
            if (s > 0 && s / thr < 100.0 && s / thr > 0.01) out.rank_ambiguous = true;
        }
        out.rank = rank;
        v0 = svd.matrixV().rightCols(static_cast<Eigen::Index>(m - rank));
    }

    if (v0.cols() == 0) {
        out.holds = true;  // trivial kernel
        return out;
    }

    const Eigen::MatrixXd b = a * v0;
    Eigen::JacobiSVD<Eigen::MatrixXd> bsvd(b, Eigen::ComputeFullV);
    const double viol = bsvd.singularValues().size() ? bsvd.singularValues()[0] : 0.0;
    out.violation = viol;
    if (viol > tol) {
        out.holds = false;
        Eigen::VectorXd w = v0 * bsvd.matrixV().col(0);
        w.normalize();
        out.witness = w;
    }
    return out;
}

KernelCheck check_kernel_condition_exact(const PoissonStructure& j, const ConstraintSet& cons,
                                         std::span<const Rational> point) {
    require_same_space(j, cons);
    const std::size_t m = cons.count();
    KernelCheck out;
    if (m == 0) return out;

    const RationalMatrix c = compute_C(j, cons).eval_exact(point);
    const RationalMatrix a = a_matrix(j, cons).eval_exact(point);
    const RationalMatrix ns = nullspace(c);
    out.rank = m - ns.cols();
    for (std::size_t k = 0; k < ns.cols(); ++k) {
        RationalMatrix v(m, 1);
        for (std::size_t i = 0; i < m; ++i) v.at(i, 0) = ns.at(i, k);
        const RationalMatrix av = a * v;
        if (!av.is_zero()) {
            out.holds = false;
            Eigen::VectorXd w = v.to_double();
            out.violation = (a.to_double() * w).norm() / w.norm();
            w.normalize();
            out.witness = w;
            return out;
        }
    }
    return out;
}

struct DSolution::PointwiseCtx {
    PoissonStructure j;
    ConstraintSet cons;
    PolyMatrix a_sym;  // J Qhat^T
    PolyMatrix c_sym;
    SolveOptions opts;
};

const PolyMatrix& DSolution::matrix() const {
    if (!sym_) throw std::logic_error("DSolution::matrix: not a symbolic solution");
    return *sym_;
}

Eigen::MatrixXd DSolution::at(const Eigen::VectorXd& point) const {
    std::vector<double> z(point.data(), point.data() + point.size());
    if (sym_) return sym_->eval(z);

    const auto& ctx = *ctx_;
    const std::size_t m = ctx.cons.count();
    if (m == 0) return Eigen::MatrixXd(0, 0);

    const Eigen::MatrixXd c = ctx.c_sym.eval(z);
    if (!c.allFinite()) throw std::domain_error("DSolution: non-finite C at point");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sig = svd.singularValues();
    const double smax = sig.size() ? sig[0] : 0.0;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(c.rows(), c.cols());
    std::size_t rank = 0;
    if (smax >= 1e-300) {
        const double thr = ctx.opts.svd_threshold * smax;
        Eigen::VectorXd inv = Eigen::VectorXd::Zero(sig.size());
        for (Eigen::Index i = 0; i < sig.size(); ++i)
            if (sig[i] >= thr) {
                inv[i] = 1.0 / sig[i];
                ++rank;
            }
        d = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
        d = 0.5 * (d - d.transpose().eval());  // exact antisymmetry
    }

    // Obstruction gate: residual direction in the kernel of C.
    if (rank < m) {
        const Eigen::MatrixXd a = ctx.a_sym.eval(z);
        const Eigen::MatrixXd v0 = svd.matrixV().rightCols(static_cast<Eigen::Index>(m - rank));
        const Eigen::MatrixXd b = a * v0;
        Eigen::JacobiSVD<Eigen::MatrixXd> bsvd(b, Eigen::ComputeFullV);
        const double viol = bsvd.singularValues().size() ? bsvd.singularValues()[0] : 0.0;
        if (viol > ctx.opts.obstruction_tol) {
            Eigen::VectorXd w = v0 * bsvd.matrixV().col(0);
            w.normalize();
            throw ObstructionError("kernel condition violated at queried point", w, point);
        }
    }

    if (delta_) d += delta_->eval(z);
    return d;
}

RationalMatrix DSolution::at_exact(std::span<const Rational> point) const {
    if (sym_) return sym_->eval_exact(point);

    const auto& ctx = *ctx_;
    const std::size_t m = ctx.cons.count();
    if (m == 0) return RationalMatrix(0, 0);

    const RationalMatrix c = ctx.c_sym.eval_exact(point);
    RationalMatrix d = pseudo_inverse(c);

    const RationalMatrix a = ctx.a_sym.eval_exact(point);
    const RationalMatrix res = a - a * (d * c);
    if (!res.is_zero()) {
        const KernelCheck kc = check_kernel_condition_exact(ctx.j, ctx.cons, point);
        Eigen::VectorXd w = kc.witness ? *kc.witness
                                       : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
        Eigen::VectorXd zp(static_cast<Eigen::Index>(point.size()));
        for (std::size_t i = 0; i < point.size(); ++i)
            zp[static_cast<Eigen::Index>(i)] = point[i].to_double();
        throw ObstructionError("kernel condition violated at queried point", w, zp);
    }

    if (delta_) d = d + delta_->eval_exact(point);
    return d;
}

DSolution DSolution::perturbed(const PolyMatrix& delta) const {
    if (!ctx_) throw std::logic_error("DSolution::perturbed: missing context");
    if (!delta.is_antisymmetric())
        throw AntisymmetryError("perturbation Delta is not antisymmetric");
    const PolyMatrix check = ctx_->a_sym * delta * ctx_->c_sym;
    if (!check.is_zero())
        throw std::invalid_argument("perturbation Delta does not satisfy J Qhat^T Delta C = 0");

    DSolution out = *this;
    if (sym_) {
        out.sym_ = *sym_ + delta;
    } else if (out.delta_) {
        out.delta_ = *out.delta_ + delta;
    } else {
        out.delta_ = delta;
    }
    return out;
}

DSolution solve_D_pointwise(const PoissonStructure& j, const ConstraintSet& cons,
                            SolveOptions opts) {
    require_same_space(j, cons);
    DSolution d;
    d.ctx_ = std::make_shared<const DSolution::PointwiseCtx>(DSolution::PointwiseCtx{
        j, cons, a_matrix(j, cons), compute_C(j, cons), opts});
    d.provenance_ = DProvenance::pseudoinverse;
    d.verified_ = true;  // every successful evaluation passes the obstruction gate
    return d;
}

PolyMatrix residual_forD(const PoissonStructure& j, const ConstraintSet& cons,
                         const PolyMatrix& d) {
    require_same_space(j, cons);
    const std::size_t m = cons.count();
    if (d.rows() != m || d.cols() != m || d.nvars() != j.dim())
        throw std::invalid_argument("residual_forD: D shape mismatch");
    const PolyMatrix a = a_matrix(j, cons);
    const PolyMatrix c = compute_C(j, cons);
    return a - a * (d * c);
}

DSolution verify_user_D(const PoissonStructure& j, const ConstraintSet& cons,
                        const PolyMatrix& d_user) {
    require_same_space(j, cons);
    if (!d_user.is_antisymmetric())
        throw AntisymmetryError("user D is not antisymmetric");
    const PolyMatrix r = residual_forD(j, cons, d_user);
    for (std::size_t i = 0; i < r.rows(); ++i)
        for (std::size_t k = 0; k < r.cols(); ++k)
            if (!r.at(i, k).is_zero())
                throw ResidualError("user D fails the Casimir condition at residual entry (" +
                                        std::to_string(i) + "," + std::to_string(k) + ")",
                                    i, k, r.at(i, k).str(j.space().var_names));

    DSolution d;
    d.sym_ = d_user;
    d.ctx_ = std::make_shared<const DSolution::PointwiseCtx>(DSolution::PointwiseCtx{
        j, cons, a_matrix(j, cons), compute_C(j, cons), SolveOptions{}});
    d.provenance_ = DProvenance::user_supplied;
    d.verified_ = true;
    return d;
}

DSolution wrap_unverified_D(const PoissonStructure& j, const ConstraintSet& cons,
                            const PolyMatrix& d_user) {
    require_same_space(j, cons);
    if (!d_user.is_antisymmetric())
        throw AntisymmetryError("user D is not antisymmetric");
    DSolution d;
    d.sym_ = d_user;
    d.ctx_ = std::make_shared<const DSolution::PointwiseCtx>(DSolution::PointwiseCtx{
        j, cons, a_matrix(j, cons), compute_C(j, cons), SolveOptions{}});
    d.provenance_ = DProvenance::user_supplied;
    d.verified_ = false;
    return d;
}

DiracSystem DiracSystem::assemble(const PoissonStructure& j, const ConstraintSet& cons,
                                  const DSolution& d, bool relaxed) {
    require_same_space(j, cons);
    const std::size_t m = cons.count();
    if (d.symbolic() &&
        (d.matrix().rows() != m || d.matrix().cols() != m || d.matrix().nvars() != j.dim()))
        throw std::invalid_argument("build_dirac_matrix: D shape mismatch");

    DiracSystem sys(j, cons, compute_C(j, cons), d);
    sys.relaxed_ = relaxed;
    sys.a_sym_ = a_matrix(j, cons);
    if (m == 0) {
        // No constraints: the correction term vanishes identically.
        sys.jstar_sym_ = j.matrix();
        sys.p_sym_ = PolyMatrix::identity(j.dim(), j.dim());
        return sys;
    }
    if (d.symbolic()) {
        const PolyMatrix& a = sys.a_sym_;
        sys.jstar_sym_ = j.matrix() + a * d.matrix() * a.transpose();
        sys.p_sym_ = PolyMatrix::identity(j.dim(), j.dim()) - a * d.matrix() * cons.qhat();
        if (!sys.jstar_sym_->is_antisymmetric())
            throw std::logic_error("assembled J* lost antisymmetry");
    }
    return sys;
}

DiracSystem build_dirac_matrix(const PoissonStructure& j, const ConstraintSet& cons,
                               const DSolution& d) {
    if (!d.verified())
        throw std::invalid_argument(
            "build_dirac_matrix refuses unverified D (use the relaxed constructor for "
            "negative tests)");
    return DiracSystem::assemble(j, cons, d, false);
}

DiracSystem build_dirac_matrix_relaxed(const PoissonStructure& j, const ConstraintSet& cons,
                                       const DSolution& d) {
    if (!d.symbolic())
        throw std::invalid_argument("relaxed construction expects a symbolic D");
    return DiracSystem::assemble(j, cons, d, true);
}

const PolyMatrix& DiracSystem::jstar() const {
    if (!jstar_sym_) throw std::logic_error("DiracSystem::jstar: pointwise system");
    return *jstar_sym_;
}

const PolyMatrix& DiracSystem::projector() const {
    if (!p_sym_) throw std::logic_error("DiracSystem::projector: pointwise system");
    return *p_sym_;
}

PoissonStructure DiracSystem::jstar_structure() const {
    return PoissonStructure(j_.space(), jstar());
}

Eigen::MatrixXd DiracSystem::jstar_at(const Eigen::VectorXd& point) const {
    std::vector<double> z(point.data(), point.data() + point.size());
    if (jstar_sym_) return jstar_sym_->eval(z);
    const Eigen::MatrixXd a = a_sym_.eval(z);
    const Eigen::MatrixXd d = d_.at(point);
    return j_.matrix().eval(z) + a * d * a.transpose();
}

Eigen::MatrixXd DiracSystem::projector_at(const Eigen::VectorXd& point) const {
    std::vector<double> z(point.data(), point.data() + point.size());
    if (p_sym_) return p_sym_->eval(z);
    const Eigen::MatrixXd a = a_sym_.eval(z);
    const Eigen::MatrixXd d = d_.at(point);
    const Eigen::MatrixXd q = cons_.qhat().eval(z);
    return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim()),
                                     static_cast<Eigen::Index>(dim())) -
           a * d * q;
}

RationalMatrix DiracSystem::jstar_at_exact(std::span<const Rational> point) const {
    if (jstar_sym_) return jstar_sym_->eval_exact(point);
    const RationalMatrix a = a_sym_.eval_exact(point);
    const RationalMatrix d = d_.at_exact(point);
    return j_.matrix().eval_exact(point) + a * d * a.transpose();
}

RationalMatrix DiracSystem::projector_at_exact(std::span<const Rational> point) const {
    if (p_sym_) return p_sym_->eval_exact(point);
    const RationalMatrix a = a_sym_.eval_exact(point);
    const RationalMatrix d = d_.at_exact(point);
    const RationalMatrix q = cons_.qhat().eval_exact(point);
    return RationalMatrix::identity(dim()) - a * d * q;
}

Eigen::MatrixXd DiracSystem::qhat_at(const Eigen::VectorXd& point) const {
    std::vector<double> z(point.data(), point.data() + point.size());
    return cons_.qhat().eval(z);
}

RationalMatrix DiracSystem::qhat_at_exact(std::span<const Rational> point) const {
    return cons_.qhat().eval_exact(point);
}

namespace {

// All exponent vectors over `nvars` variables with total degree <= deg.
void enumerate_monomials(std::size_t nvars, unsigned deg, ExpVec& cur, std::size_t pos,
                         unsigned used, std::vector<ExpVec>& out) {
    if (pos == nvars) {
        out.push_back(cur);
        return;
    }
    for (unsigned e = 0; e + used <= deg; ++e) {
        cur[pos] = e;
        enumerate_monomials(nvars, deg, cur, pos + 1, used + e, out);
    }
    cur[pos] = 0;
}

} // namespace

std::optional<PolyMatrix> perturbation_delta(const PoissonStructure& j,
                                             const ConstraintSet& cons, unsigned seed,
                                             unsigned degree) {
    require_same_space(j, cons);
    const std::size_t m = cons.count();
    const std::size_t n = j.dim();
    if (m < 2) return std::nullopt;

    std::vector<ExpVec> monos;
    {
        ExpVec cur(n, 0);
        enumerate_monomials(n, degree, cur, 0, 0, monos);
    }

    const PolyMatrix a = a_matrix(j, cons);
    const PolyMatrix c = compute_C(j, cons);

    struct Unknown {
        std::size_t p, q;  // p < q
        std::size_t mono;
    };
    std::vector<Unknown> unknowns;
    std::vector<PolyMatrix> contributions;  // J Qhat^T (x^mu E_pq) C per unknown
    for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = p + 1; q < m; ++q) {
            PolyMatrix base(n, m, n);
            // A E_pq C = A(:,p) C(q,:) - A(:,q) C(p,:)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < m; ++k)
                    base.at(i, k) = a.at(i, p) * c.at(q, k) - a.at(i, q) * c.at(p, k);
            for (std::size_t mu = 0; mu < monos.size(); ++mu) {
                const PolyExpr xmu = PolyExpr::monomial(n, monos[mu], Rational(1));
                PolyMatrix contrib(n, m, n);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t k = 0; k < m; ++k) contrib.at(i, k) = base.at(i, k) * xmu;
                unknowns.push_back({p, q, mu});
                contributions.push_back(std::move(contrib));
            }
        }
    if (unknowns.empty()) return std::nullopt;

    // Row-index every (entry, monomial) pair appearing in any contribution.
    std::map<std::tuple<std::size_t, std::size_t, ExpVec>, std::size_t> row_of;
    for (const auto& contrib : contributions)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < m; ++k)
                for (const auto& [e, coef] : contrib.at(i, k).terms()) {
                    auto key = std::make_tuple(i, k, e);
                    row_of.try_emplace(key, row_of.size());
                }

    RationalMatrix sys(row_of.empty() ? 1 : row_of.size(), unknowns.size());
    for (std::size_t u = 0; u < unknowns.size(); ++u)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < m; ++k)
                for (const auto& [e, coef] : contributions[u].at(i, k).terms())
                    sys.at(row_of.at(std::make_tuple(i, k, e)), u) = coef;

    const RationalMatrix basis = nullspace(sys);
    if (basis.cols() == 0) return std::nullopt;

    std::mt19937_64 rng(seed);
    std::vector<Rational> coeffs(basis.cols());
    for (int attempt = 0; attempt < 16; ++attempt) {
        bool all_zero = true;
        for (std::size_t k = 0; k < basis.cols(); ++k) {
            const long c0 = static_cast<long>(rng() % 7) - 3;
            coeffs[k] = Rational(c0);
            if (c0 != 0) all_zero = false;
        }
        if (all_zero) continue;
        // Combine and reject the unlucky cancellation to zero.
        std::vector<Rational> sol(unknowns.size(), Rational(0));
        bool nonzero = false;
        for (std::size_t u = 0; u < unknowns.size(); ++u) {
            for (std::size_t k = 0; k < basis.cols(); ++k)
                sol[u] += coeffs[k] * basis.at(u, k);
            if (!sol[u].is_zero()) nonzero = true;
        }
        if (!nonzero) continue;
        PolyMatrix delta(m, m, n);
        for (std::size_t u = 0; u < unknowns.size(); ++u) {
            if (sol[u].is_zero()) continue;
            const auto& [p, q, mu] = unknowns[u];
            const PolyExpr term = PolyExpr::monomial(n, monos[mu], sol[u]);
            delta.at(p, q) = delta.at(p, q) + term;
            delta.at(q, p) = delta.at(q, p) - term;
        }
        return delta;
    }
    // Fall back to the first basis vector.
    PolyMatrix delta(m, m, n);
    for (std::size_t u = 0; u < unknowns.size(); ++u) {
        if (basis.at(u, 0).is_zero()) continue;
        const auto& [p, q, mu] = unknowns[u];
        const PolyExpr term = PolyExpr::monomial(n, monos[mu], basis.at(u, 0));
        delta.at(p, q) = delta.at(p, q) + term;
        delta.at(q, p) = delta.at(q, p) - term;
    }
    return delta;
}

std::optional<DSolution> perturb_D(const PoissonStructure& j, const ConstraintSet& cons,
                                   const DSolution& d, unsigned seed, unsigned degree) {
    auto delta = perturbation_delta(j, cons, seed, degree);
    if (!delta) return std::nullopt;
    return d.perturbed(*delta);
}

} // namespace dirackit
