#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "urnflow/graph.hpp"
#include "urnflow/tolerances.hpp"
#include "urnflow/types.hpp"
#include "urnflow/urn.hpp"

namespace urnflow {

// Mean-field side of the urn: the vector field
//
//   F_i(x) = -x_i + (1/N) sum_{j ~ i} x_i / (x_i + x_j),
//
// its Lyapunov function L(x) = -sum x_i + (1/N) sum_{edges} log(x_i + x_j),
// and the semiflow of dx/dt = F(x). On the boundary a term x_i/(x_i + x_j)
// with x_i = 0 < x_j is exactly zero; an edge with x_i = x_j = 0 is outside
// the domain and every evaluation rejects it with Errc::degenerate_pair.

using VectorFieldFn = std::function<Point(const Graph&, const Point&)>;

Point vector_field(const Graph& g, const Point& x);

double lyapunov(const Graph& g, const Point& x);

/// dL/dx_i = -1 + (1/N) sum_{j ~ i} 1 / (x_i + x_j). F_i = x_i * dL/dx_i.
Point lyapunov_grad(const Graph& g, const Point& x);

/// Hessian of L: -(1/N)/(x_i + x_j)^2 off-diagonal on edges, minus the sum of
/// those over neighbours on the diagonal.
Matrix lyapunov_hessian(const Graph& g, const Point& x);

/// H(x) = sum_{i : w_i > 0} w_i log x_i. Throws Errc::domain when x vanishes
/// somewhere on the support of w.
double uniqueness_lyapunov(const Graph& g, const Point& w, const Point& x);

/// Time derivative of H along the flow, -1 + f(x)/N with f = pair_ratio_sum.
double uniqueness_lyapunov_rate(const Graph& g, const Point& w, const Point& x);

/// f(v) = sum_{edges} (w_i + w_j) / (v_i + v_j).
double pair_ratio_sum(const Graph& g, const Point& w, const Point& v);

Matrix jacobian(const Graph& g, const Point& v);

/// Closed-form Jacobian at the two-valued point (p on A, q on B) of an
/// r-regular bipartite graph, returned in the graph's own vertex order.
Matrix jacobian_bipartite(const Graph& g, const GraphClass& cls, double p, double q);

/// Lower bound c on every edge pair sum x_i + x_j that defines the domain
/// for an orbit started at x0: min(1/(2N), half the smallest pair sum of x0).
double domain_constant(const Graph& g, const Point& x0);

/// Largest amount by which x violates the domain (negative coordinates,
/// pair sums below c, or a coordinate sum away from 1). Zero inside.
double domain_violation(const Graph& g, const Point& x, double c);

struct FlowResult {
    Point endpoint;
    double t = 0;
    std::uint64_t steps = 0;
    double max_violation = 0;
    double max_drift = 0;
    double min_delta_lyapunov = 0;
    double lyapunov_start = 0;
    double lyapunov_end = 0;
    double domain_c = 0;
    std::vector<double> times;  // filled when a path is requested
    std::vector<Point> path;
};

/// Fixed-step RK4 for dx/dt = F(x) over [0, t], renormalising onto the
/// simplex after each step. A step that leaves the domain is retried with the
/// step halved, up to 20 times, before Errc::left_domain is raised.
FlowResult flow(const Graph& g, const Point& x0, double t, double dt,
                const Tolerances& tol = {}, bool record_path = false);

/// Integrates the flow from x0 and returns its value at each requested time
/// (ascending, >= 0) using RK4 steps no longer than max_dt.
std::vector<Point> flow_at(const Graph& g, const Point& x0, const std::vector<double>& times,
                           double max_dt, const Tolerances& tol = {});

struct GapSample {
    double t = 0;
    double gap = 0;
    std::uint64_t n = 0;
};

/// For each recorded time t = tau_n whose window [t, t + T] lies inside the
/// trajectory, the largest L1 distance between the recorded process and the
/// flow started at x(t), taken over the recorded times in the window spaced
/// at least `dt` apart. Requires consecutive tau spacing <= T/10.
std::vector<GapSample> shadowing_gap(const Trajectory& traj, const Graph& g, double window,
                                     double dt = 1e-2, const Tolerances& tol = {});

double l1_distance(const Point& a, const Point& b);

}  // namespace urnflow
