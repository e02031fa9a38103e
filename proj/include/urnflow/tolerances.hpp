#pragma once

#include <string>
#include <vector>

namespace urnflow {

/// Every numerical threshold used by the solvers and the verification suite.
/// Defaults are the values the checks are calibrated against; the CLI can
/// override any of them by name.
struct Tolerances {
    double simplex_sum = 1e-12;
    double decomposition = 1e-12;
    double domain_slack = 1e-9;
    double equilibrium_residual = 1e-10;
    double stationarity = 1e-8;
    double class_eps = 1e-8;
    double zero_eigenvalue = 1e-9;
    double negative_eigenvalue = 1e-6;
    double dedup = 1e-8;
    double fd_step = 1e-6;
    double fd_gradient = 1e-6;
    double fd_jacobian = 1e-5;
    double jacobi_offdiag = 1e-12;
    double degenerate_point = 1e-14;
    double boundary_floor = 1e-12;
    double lyapunov_monotone = 1e-9;
    double flow_fixed_point = 1e-9;
    double pair_ratio = 1e-12;
    double omega_stationarity = 1e-12;
    double bipartite_jacobian = 1e-12;
    double face_solve = 1e-12;
    int face_max_iterations = 100000;
    int boundary_patience = 100;

    /// Sets a field by its name; returns false for an unknown name or a
    /// non-positive value.
    bool set(const std::string& name, double value);
    std::vector<std::string> names() const;
    double get(const std::string& name) const;
};

}  // namespace urnflow
