#include "urnflow/tolerances.hpp"

#include <stdexcept>
#include <type_traits>
#include <utility>

namespace urnflow {

namespace {

template <typename Fn>
bool visit(Tolerances& t, const std::string& name, Fn&& fn) {
#define URNFLOW_TOL(field) \
    if (name == #field) return fn(t.field);
    URNFLOW_TOL(simplex_sum)
    URNFLOW_TOL(decomposition)
    URNFLOW_TOL(domain_slack)
    URNFLOW_TOL(equilibrium_residual)
    URNFLOW_TOL(stationarity)
    URNFLOW_TOL(class_eps)
    URNFLOW_TOL(zero_eigenvalue)
    URNFLOW_TOL(negative_eigenvalue)
    URNFLOW_TOL(dedup)
    URNFLOW_TOL(fd_step)
    URNFLOW_TOL(fd_gradient)
    URNFLOW_TOL(fd_jacobian)
    URNFLOW_TOL(jacobi_offdiag)
    URNFLOW_TOL(degenerate_point)
    URNFLOW_TOL(boundary_floor)
    URNFLOW_TOL(lyapunov_monotone)
    URNFLOW_TOL(flow_fixed_point)
    URNFLOW_TOL(pair_ratio)
    URNFLOW_TOL(omega_stationarity)
    URNFLOW_TOL(bipartite_jacobian)
    URNFLOW_TOL(face_solve)
    URNFLOW_TOL(face_max_iterations)
    URNFLOW_TOL(boundary_patience)
#undef URNFLOW_TOL
    return false;
}

}  // namespace

bool Tolerances::set(const std::string& name, double value) {
    if (!(value > 0)) return false;
    return visit(*this, name, [value](auto& field) {
        field = static_cast<std::remove_reference_t<decltype(field)>>(value);
        return true;
    });
}

double Tolerances::get(const std::string& name) const {
    double out = 0;
    auto& self = const_cast<Tolerances&>(*this);
    if (!visit(self, name, [&out](auto& field) {
            out = static_cast<double>(field);
            return true;
        }))
        throw std::out_of_range("unknown tolerance " + name);
    return out;
}

std::vector<std::string> Tolerances::names() const {
    return {"simplex_sum",        "decomposition",     "domain_slack",      "equilibrium_residual",
            "stationarity",       "class_eps",         "zero_eigenvalue",   "negative_eigenvalue",
            "dedup",              "fd_step",           "fd_gradient",       "fd_jacobian",
            "jacobi_offdiag",     "degenerate_point",  "boundary_floor",    "lyapunov_monotone",
            "flow_fixed_point",   "pair_ratio",        "omega_stationarity", "bipartite_jacobian",
            "face_solve",         "face_max_iterations", "boundary_patience"};
}

}  // namespace urnflow
