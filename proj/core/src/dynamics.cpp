#include "dirackit/dynamics.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace dirackit {
namespace {

#if defined(__SIZEOF_FLOAT128__)
using real_t = __float128;
#else
using real_t = long double;
#endif

real_t rat_to_real(const Rational& q) {
    // Two-double split keeps ~106 bits of the rational.
    const double hi = q.to_double();
    const double lo = (q - Rational::from_double(hi)).to_double();
    return static_cast<real_t>(hi) + static_cast<real_t>(lo);
}

real_t abs_r(real_t x) { return x < 0 ? -x : x; }

real_t eval_poly(const PolyExpr& p, const std::vector<real_t>& z) {
    real_t acc = 0;
    for (const auto& [e, c] : p.terms()) {
        real_t t = rat_to_real(c);
        for (std::size_t i = 0; i < z.size(); ++i)
            for (std::uint32_t k = 0; k < e[i]; ++k) t *= z[i];
        acc += t;
    }
    return acc;
}

// J*(z) as extended-precision entries. Symbolic systems evaluate the
// polynomial matrix directly; pointwise systems go through the exact
// backend at the double-rounded state (J* identities hold exactly at any
// queried point, so the rounding does not perturb conserved directions).
class JstarEvaluator {
public:
    explicit JstarEvaluator(const DiracSystem& sys) : sys_(sys) {}

    std::vector<real_t> operator()(const std::vector<real_t>& z) {
        const std::size_t n = sys_.dim();
        std::vector<real_t> out(n * n);
        if (sys_.symbolic()) {
            const PolyMatrix& js = sys_.jstar();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) out[i * n + j] = eval_poly(js.at(i, j), z);
            return out;
        }
        std::vector<Rational> zq(n);
        for (std::size_t i = 0; i < n; ++i)
            zq[i] = Rational::from_double(static_cast<double>(z[i]));
        const RationalMatrix js = sys_.jstar_at_exact(zq);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] = rat_to_real(js.at(i, j));
        return out;
    }

private:
    const DiracSystem& sys_;
};

} // namespace

Trajectory integrate(const DiracSystem& sys, const PolyExpr& hamiltonian,
                     const Eigen::VectorXd& z0, const IntegrateOptions& opts) {
    const std::size_t n = sys.dim();
    if (hamiltonian.nvars() != n)
        throw std::invalid_argument("integrate: Hamiltonian over wrong phase space");
    if (!(opts.dt > 0)) throw std::invalid_argument("integrate: dt must be positive");
    if (static_cast<std::size_t>(z0.size()) != n)
        throw std::invalid_argument("integrate: initial state dimension mismatch");
    for (Eigen::Index i = 0; i < z0.size(); ++i)
        if (!std::isfinite(z0[i]))
            throw std::invalid_argument("integrate: initial state is not finite");

    std::vector<PolyExpr> grad_h;
    grad_h.reserve(n);
    for (std::size_t i = 0; i < n; ++i) grad_h.push_back(hamiltonian.diff(i));

    JstarEvaluator jstar(sys);
    auto rhs = [&](const std::vector<real_t>& z) {
        const std::vector<real_t> js = jstar(z);
        std::vector<real_t> g(n), f(n, 0);
        for (std::size_t i = 0; i < n; ++i) g[i] = eval_poly(grad_h[i], z);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) f[i] += js[i * n + j] * g[j];
        return f;
    };

    std::vector<real_t> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = static_cast<real_t>(z0[static_cast<Eigen::Index>(i)]);

    const std::size_t m = sys.constraints().count();
    std::vector<real_t> phi0(m);
    for (std::size_t k = 0; k < m; ++k) phi0[k] = eval_poly(sys.constraints().phis()[k], z);
    const real_t h0 = eval_poly(hamiltonian, z);

    Trajectory traj;
    traj.times.reserve(static_cast<std::size_t>(opts.steps) + 1);

    auto record = [&](double t) {
        traj.times.push_back(t);
        std::vector<double> zd(n);
        for (std::size_t i = 0; i < n; ++i) zd[i] = static_cast<double>(z[i]);
        traj.states.push_back(std::move(zd));
        real_t dphi = 0;
        for (std::size_t k = 0; k < m; ++k)
            dphi = std::max(dphi, abs_r(eval_poly(sys.constraints().phis()[k], z) - phi0[k]));
        traj.drift_phi_max.push_back(static_cast<double>(dphi));
        traj.drift_h.push_back(static_cast<double>(abs_r(eval_poly(hamiltonian, z) - h0)));
    };

    auto finite = [&]() {
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(static_cast<double>(z[i]))) return false;
        return true;
    };

    record(0.0);
    const real_t dt = static_cast<real_t>(opts.dt);
    for (long step = 0; step < opts.steps; ++step) {
        const std::vector<real_t> k1 = rhs(z);
        std::vector<real_t> tmp(n);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + dt / 2 * k1[i];
        const std::vector<real_t> k2 = rhs(tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + dt / 2 * k2[i];
        const std::vector<real_t> k3 = rhs(tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + dt * k3[i];
        const std::vector<real_t> k4 = rhs(tmp);
        for (std::size_t i = 0; i < n; ++i)
            z[i] += dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        if (!finite()) {
            traj.truncated = true;
            traj.diagnostic = "non-finite state after step " + std::to_string(step + 1);
            break;
        }
        record(opts.dt * static_cast<double>(step + 1));
    }
    return traj;
}

void Trajectory::write_csv(std::ostream& out, const std::vector<std::string>& var_names) const {
    out << "t";
    for (const auto& name : var_names) out << "," << name;
    out << ",drift_phi_max,drift_H\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t k = 0; k < times.size(); ++k) {
        out << times[k];
        for (double v : states[k]) out << "," << v;
        out << "," << drift_phi_max[k] << "," << drift_h[k] << "\n";
    }
}

} // namespace dirackit
