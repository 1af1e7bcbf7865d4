#include "dirackit/phase.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace dirackit {

PhaseSpace::PhaseSpace(std::vector<std::string> names) : var_names(std::move(names)) {
    if (var_names.empty()) throw std::invalid_argument("PhaseSpace: need at least one variable");
    std::set<std::string> seen;
    for (const auto& n : var_names)
        if (!seen.insert(n).second)
            throw std::invalid_argument("PhaseSpace: duplicate variable '" + n + "'");
}

PoissonStructure::PoissonStructure(PhaseSpace space, PolyMatrix entries)
    : space_(std::move(space)), j_(std::move(entries)) {
    const std::size_t n = space_.dim();
    if (j_.rows() != n || j_.cols() != n || j_.nvars() != n)
        throw std::invalid_argument("PoissonStructure: matrix shape mismatch");
    if (!j_.is_antisymmetric())
        throw std::invalid_argument("PoissonStructure: matrix is not antisymmetric");
}

PoissonStructure build_structure(const PhaseSpace& space,
                                 const std::map<std::pair<std::size_t, std::size_t>,
                                                std::string>& upper_entries) {
    const std::size_t n = space.dim();
    PolyMatrix j(n, n, n);
    for (const auto& [ij, src] : upper_entries) {
        const auto [i, k] = ij;
        if (i >= k || k >= n)
            throw std::invalid_argument("build_structure: entry (" + std::to_string(i) + "," +
                                        std::to_string(k) + ") is not strictly upper-triangular");
        PolyExpr p(n);
        try {
            p = parse_poly(src, space.var_names);
        } catch (const ParseError& e) {
            throw ParseError(e.kind, e.offset,
                             "entry (" + std::to_string(i) + "," + std::to_string(k) + "): " +
                                 e.what());
        }
        j.at(i, k) = p;
        j.at(k, i) = -p;
    }
    return PoissonStructure(space, std::move(j));
}

ConstraintSet::ConstraintSet(PhaseSpace space, std::vector<PolyExpr> phis)
    : space_(std::move(space)), phis_(std::move(phis)),
      qhat_(phis_.size(), space_.dim(), space_.dim()) {
    const std::size_t n = space_.dim();
    for (std::size_t m = 0; m < phis_.size(); ++m) {
        if (phis_[m].nvars() != n)
            throw std::invalid_argument("ConstraintSet: constraint over wrong variable count");
        for (std::size_t i = 0; i < n; ++i) qhat_.at(m, i) = phis_[m].diff(i);
    }
}

ConstraintSet ConstraintSet::parse(const PhaseSpace& space,
                                   const std::vector<std::string>& phi_srcs) {
    std::vector<PolyExpr> phis;
    phis.reserve(phi_srcs.size());
    for (std::size_t m = 0; m < phi_srcs.size(); ++m) {
        try {
            phis.push_back(parse_poly(phi_srcs[m], space.var_names));
        } catch (const ParseError& e) {
            throw ParseError(e.kind, e.offset,
                             "constraint " + std::to_string(m + 1) + ": " + e.what());
        }
    }
    return ConstraintSet(space, std::move(phis));
}

PolyExpr bracket(const PolyExpr& f, const PolyExpr& g, const PoissonStructure& j) {
    const std::size_t n = j.dim();
    if (f.nvars() != n || g.nvars() != n)
        throw std::invalid_argument("bracket: operand over wrong phase space");
    PolyExpr acc(n);
    std::vector<PolyExpr> df, dg;
    df.reserve(n);
    dg.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        df.push_back(f.diff(i));
        dg.push_back(g.diff(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (df[i].is_zero()) continue;
        for (std::size_t k = 0; k < n; ++k) {
            const PolyExpr& jik = j.matrix().at(i, k);
            if (jik.is_zero() || dg[k].is_zero()) continue;
            acc = acc + df[i] * jik * dg[k];
        }
    }
    return acc;
}

template <class Scalar>
std::size_t JacobiatorTensor<Scalar>::index_of(std::size_t n, std::size_t i, std::size_t j,
                                               std::size_t k) {
    if (!(i < j && j < k && k < n))
        throw std::out_of_range("JacobiatorTensor: need i<j<k<n");
    // rank of (i,j,k) in lexicographic enumeration of combinations
    auto c2 = [](std::size_t a) { return a * (a - 1) / 2; };
    auto c3 = [](std::size_t a) { return a * (a - 1) * (a - 2) / 6; };
    return c3(n) - c3(n - i) + c2(n - i - 1) - c2(n - j) + (k - j - 1);
}

template struct JacobiatorTensor<PolyExpr>;
template struct JacobiatorTensor<double>;
template struct JacobiatorTensor<Rational>;

JacobiatorTensor<PolyExpr> jacobiator(const PoissonStructure& j) {
    const std::size_t n = j.dim();
    const PolyMatrix& m = j.matrix();

    // d_l J_ab, precomputed
    std::vector<PolyMatrix> dj(n, PolyMatrix(n, n, n));
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) dj[l].at(a, b) = m.at(a, b).diff(l);

    JacobiatorTensor<PolyExpr> t;
    t.n = n;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t jj = i + 1; jj < n; ++jj)
            for (std::size_t k = jj + 1; k < n; ++k) {
                PolyExpr acc(n);
                for (std::size_t l = 0; l < n; ++l) {
                    if (!m.at(i, l).is_zero() && !dj[l].at(jj, k).is_zero())
                        acc = acc + m.at(i, l) * dj[l].at(jj, k);
                    if (!m.at(jj, l).is_zero() && !dj[l].at(k, i).is_zero())
                        acc = acc + m.at(jj, l) * dj[l].at(k, i);
                    if (!m.at(k, l).is_zero() && !dj[l].at(i, jj).is_zero())
                        acc = acc + m.at(k, l) * dj[l].at(i, jj);
                }
                t.comps.push_back(std::move(acc));
            }
    return t;
}

JacobiatorTensor<double> jacobiator_fd(const MatrixField& field, std::size_t n,
                                       const Eigen::VectorXd& point, double step) {
    if (!(step > 0.0) || step < 1e-300)
        throw std::invalid_argument("jacobiator_fd: step underflow");
    if (static_cast<std::size_t>(point.size()) != n)
        throw std::invalid_argument("jacobiator_fd: point dimension mismatch");

    const Eigen::MatrixXd m0 = field(point);
    if (!m0.allFinite()) throw std::domain_error("jacobiator_fd: non-finite field value");
    std::vector<Eigen::MatrixXd> d(n);
    for (std::size_t l = 0; l < n; ++l) {
        Eigen::VectorXd zp = point, zm = point;
        zp[static_cast<Eigen::Index>(l)] += step;
        zm[static_cast<Eigen::Index>(l)] -= step;
        const Eigen::MatrixXd mp = field(zp), mm = field(zm);
        if (!mp.allFinite() || !mm.allFinite())
            throw std::domain_error("jacobiator_fd: non-finite field value");
        d[l] = (mp - mm) / (2.0 * step);
    }

    JacobiatorTensor<double> t;
    t.n = n;
    auto e = [](std::size_t v) { return static_cast<Eigen::Index>(v); };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                double acc = 0;
                for (std::size_t l = 0; l < n; ++l)
                    acc += m0(e(i), e(l)) * d[l](e(j), e(k)) +
                           m0(e(j), e(l)) * d[l](e(k), e(i)) +
                           m0(e(k), e(l)) * d[l](e(i), e(j));
                t.comps.push_back(acc);
            }
    return t;
}

JacobiatorTensor<Rational> jacobiator_fd_exact(const ExactMatrixField& field, std::size_t n,
                                               std::span<const Rational> point,
                                               const Rational& step) {
    if (step.is_zero() || step.sign() < 0)
        throw std::invalid_argument("jacobiator_fd_exact: step must be positive");
    if (point.size() != n)
        throw std::invalid_argument("jacobiator_fd_exact: point dimension mismatch");

    const Rational half = Rational(1, 2) / step;
    const RationalMatrix m0 = field(point);
    std::vector<RationalMatrix> d;
    d.reserve(n);
    std::vector<Rational> z(point.begin(), point.end());
    for (std::size_t l = 0; l < n; ++l) {
        const Rational save = z[l];
        z[l] = save + step;
        RationalMatrix mp = field(z);
        z[l] = save - step;
        RationalMatrix mm = field(z);
        z[l] = save;
        d.push_back((mp - mm).scaled(half));
    }

    JacobiatorTensor<Rational> t;
    t.n = n;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                Rational acc(0);
                for (std::size_t l = 0; l < n; ++l) {
                    acc += m0.at(i, l) * d[l].at(j, k);
                    acc += m0.at(j, l) * d[l].at(k, i);
                    acc += m0.at(k, l) * d[l].at(i, j);
                }
                t.comps.push_back(acc);
            }
    return t;
}

bool constraint_count_excessive(std::size_t m, std::size_t n) { return m + 2 >= n; }

} // namespace dirackit
