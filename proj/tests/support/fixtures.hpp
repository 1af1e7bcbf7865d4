#pragma once

// Shared in-code fixtures: the odd-constraint rigid-body example, the
// block counter-example, and the redundancy scenarios.

#include "dirackit/dirac.hpp"
#include "dirackit/phase.hpp"

#include <cmath>
#include <map>
#include <random>
#include <string>

namespace fixtures {

using namespace dirackit;

// 5-dimensional space: so(3) block in (z1,z2,z3) plus a canonical pair.
inline PoissonStructure example1_structure() {
    const PhaseSpace space({"z1", "z2", "z3", "w1", "w2"});
    const std::map<std::pair<std::size_t, std::size_t>, std::string> upper = {
        {{0, 1}, "-z3"}, {{0, 2}, "z2"}, {{1, 2}, "-z1"}, {{3, 4}, "-1"}};
    return build_structure(space, upper);
}

inline ConstraintSet example1_constraints(const PoissonStructure& j) {
    return ConstraintSet::parse(j.space(), {"z1", "z2", "z3"});
}

// The constant matrix printed for this example; pinv(C) at z=(1,0,0).
// It does NOT solve the Casimir condition identically (residual (1-z1) C).
inline PolyMatrix example1_printed_d() {
    PolyMatrix d(3, 3, 5);
    d.at(1, 2) = PolyExpr::constant(5, Rational(1));
    d.at(2, 1) = PolyExpr::constant(5, Rational(-1));
    return d;
}

// Block system diag(C, Jbar) with C = Jbar = [[0,1],[-1,0]], constraints
// (z1, z2), D = C^-1 (1 - lambda) with lambda = 2.
inline PoissonStructure counterexample_structure() {
    const PhaseSpace space({"z1", "z2", "w1", "w2"});
    const std::map<std::pair<std::size_t, std::size_t>, std::string> upper = {{{0, 1}, "1"},
                                                                              {{2, 3}, "1"}};
    return build_structure(space, upper);
}

inline ConstraintSet counterexample_constraints(const PoissonStructure& j) {
    return ConstraintSet::parse(j.space(), {"z1", "z2"});
}

inline PolyMatrix counterexample_d() {  // C^-1 (1-2) = [[0,1],[-1,0]]
    PolyMatrix d(2, 2, 4);
    d.at(0, 1) = PolyExpr::constant(4, Rational(1));
    d.at(1, 0) = PolyExpr::constant(4, Rational(-1));
    return d;
}

// Canonical (q1,p1,q2,p2).
inline PoissonStructure canonical4_structure() {
    const PhaseSpace space({"q1", "p1", "q2", "p2"});
    const std::map<std::pair<std::size_t, std::size_t>, std::string> upper = {{{0, 1}, "1"},
                                                                              {{2, 3}, "1"}};
    return build_structure(space, upper);
}

// First-class scenario: Casimir of the rigid-body block among the
// constraints; C is constant with a zero first row/column.
inline ConstraintSet firstclass_constraints(const PoissonStructure& example1_j) {
    return ConstraintSet::parse(example1_j.space(), {"z1^2 + z2^2 + z3^2", "w1", "w2"});
}

// Valid constant D for the first-class scenario (free blocks set to zero).
inline PolyMatrix firstclass_d() {
    PolyMatrix d(3, 3, 5);
    d.at(1, 2) = PolyExpr::constant(5, Rational(1));
    d.at(2, 1) = PolyExpr::constant(5, Rational(-1));
    return d;
}

// Dependent-constraint scenario: Phi1 = Phi2 * Phi3 on the canonical space.
inline ConstraintSet dependent_constraints(const PoissonStructure& canonical_j) {
    return ConstraintSet::parse(canonical_j.space(), {"q1*p1", "q1", "p1"});
}

// Polynomial D = [[0, -d^T], [d, Ctilde^-1]] with d = (p1, q1).
inline PolyMatrix dependent_d() {
    const PhaseSpace space({"q1", "p1", "q2", "p2"});
    PolyMatrix d(3, 3, 4);
    auto p = [&](const char* s) { return parse_poly(s, space.var_names); };
    d.at(0, 1) = p("-p1");
    d.at(0, 2) = p("-q1");
    d.at(1, 0) = p("p1");
    d.at(1, 2) = p("-1");
    d.at(2, 0) = p("q1");
    d.at(2, 1) = p("1");
    return d;
}

// Second-class pair with quadratic tails: C = (1 + 2ab q2^2) [[0,1],[-1,0]]
// is invertible wherever the scalar factor is nonzero, and the reduced
// bracket is a genuinely rational (non-polynomial) matrix field whose
// finite-difference truncation does not cancel.
inline ConstraintSet quadratic_secondclass_constraints(const PoissonStructure& canonical_j,
                                                       const Rational& a, const Rational& b) {
    const std::string phi1 = "q1 + " + a.str() + "*q2^2";
    const std::string phi2 = "p1 + " + b.str() + "*q2*p2";
    return ConstraintSet::parse(canonical_j.space(), {phi1, phi2});
}

// Broken-Jacobi 3x3 structure: J12 = z2, J13 = 0, J23 = z3 (T_123 = -z3).
inline PoissonStructure broken_structure() {
    const PhaseSpace space({"z1", "z2", "z3"});
    const std::map<std::pair<std::size_t, std::size_t>, std::string> upper = {{{0, 1}, "z2"},
                                                                              {{1, 2}, "z3"}};
    return build_structure(space, upper);
}

// Rigid-body so(3) structure on 3 variables.
inline PoissonStructure so3_structure() {
    const PhaseSpace space({"z1", "z2", "z3"});
    const std::map<std::pair<std::size_t, std::size_t>, std::string> upper = {
        {{0, 1}, "-z3"}, {{0, 2}, "z2"}, {{1, 2}, "-z1"}};
    return build_structure(space, upper);
}

inline std::vector<Eigen::VectorXd> some_points(std::size_t n, std::size_t count,
                                                unsigned seed = 12345) {
    std::mt19937_64 eng(seed);
    std::vector<Eigen::VectorXd> pts;
    for (std::size_t k = 0; k < count; ++k) {
        Eigen::VectorXd z(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
            z[static_cast<Eigen::Index>(i)] =
                std::round((2 * u - 1) * 2.0 * 1048576.0) / 1048576.0;
        }
        pts.push_back(std::move(z));
    }
    return pts;
}

} // namespace fixtures
