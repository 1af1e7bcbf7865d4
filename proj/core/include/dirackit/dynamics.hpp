#pragma once

// Flow integration dz/dt = J*(z) dH/dz with classical RK4, tracking
// constraint and energy drift against the initial state. The integrator
// state is kept in extended precision internally so that drift records
// reflect the method's truncation rather than accumulator roundoff.

#include "dirackit/dirac.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dirackit {

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<double> drift_phi_max;  // max_n |Phi_n(z(t)) - Phi_n(z(0))|
    std::vector<double> drift_h;        // |H(z(t)) - H(z(0))|
    bool truncated = false;
    std::string diagnostic;

    // Header: t,<var_names...>,drift_phi_max,drift_H
    void write_csv(std::ostream& out, const std::vector<std::string>& var_names) const;
};

struct IntegrateOptions {
    double dt = 1e-3;
    long steps = 10000;
};

Trajectory integrate(const DiracSystem& sys, const PolyExpr& hamiltonian,
                     const Eigen::VectorXd& z0, const IntegrateOptions& opts);

} // namespace dirackit
