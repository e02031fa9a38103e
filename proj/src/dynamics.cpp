#include "urnflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "urnflow/error.hpp"

namespace urnflow {

namespace {

using Index = Eigen::Index;

Index idx(Vertex v) { return static_cast<Index>(v); }

void check_size(const Graph& g, const Point& x) {
    if (x.size() != idx(g.vertex_count()))
        throw Error(Errc::domain, "point has " + std::to_string(x.size()) + " coordinates, graph has " +
                                      std::to_string(g.vertex_count()) + " vertices");
}

double pair_sum(const Point& x, Vertex i, Vertex j) {
    const double s = x[idx(i)] + x[idx(j)];
    if (!(s > 0))
        throw Error(Errc::degenerate_pair,
                    "edge " + std::to_string(i + 1) + " " + std::to_string(j + 1) + " has zero mass");
    return s;
}

double inv_edges(const Graph& g) { return 1.0 / static_cast<double>(g.edge_count()); }

}  // namespace

double l1_distance(const Point& a, const Point& b) { return (a - b).lpNorm<1>(); }

Point vector_field(const Graph& g, const Point& x) {
    check_size(g, x);
    const double c = inv_edges(g);
    Point f = -x;
    for (const auto& e : g.edges()) {
        const double s = pair_sum(x, e.u, e.v);
        f[idx(e.u)] += c * (x[idx(e.u)] / s);
        f[idx(e.v)] += c * (x[idx(e.v)] / s);
    }
    return f;
}

double lyapunov(const Graph& g, const Point& x) {
    check_size(g, x);
    double edge_sum = 0;
    for (const auto& e : g.edges()) edge_sum += std::log(pair_sum(x, e.u, e.v));
    return -x.sum() + inv_edges(g) * edge_sum;
}

Point lyapunov_grad(const Graph& g, const Point& x) {
    check_size(g, x);
    const double c = inv_edges(g);
    Point grad = Point::Constant(x.size(), -1.0);
    for (const auto& e : g.edges()) {
        const double r = c / pair_sum(x, e.u, e.v);
        grad[idx(e.u)] += r;
        grad[idx(e.v)] += r;
    }
    return grad;
}

Matrix lyapunov_hessian(const Graph& g, const Point& x) {
    check_size(g, x);
    const double c = inv_edges(g);
    Matrix h = Matrix::Zero(x.size(), x.size());
    for (const auto& e : g.edges()) {
        const double s = pair_sum(x, e.u, e.v);
        const double w = c / (s * s);
        h(idx(e.u), idx(e.v)) -= w;
        h(idx(e.v), idx(e.u)) -= w;
        h(idx(e.u), idx(e.u)) -= w;
        h(idx(e.v), idx(e.v)) -= w;
    }
    return h;
}

double uniqueness_lyapunov(const Graph& g, const Point& w, const Point& x) {
    check_size(g, x);
    check_size(g, w);
    double h = 0;
    for (Index i = 0; i < w.size(); ++i) {
        if (w[i] <= 0) continue;
        if (!(x[i] > 0))
            throw Error(Errc::domain, "x vanishes at vertex " + std::to_string(i + 1) +
                                          " in the support of w");
        h += w[i] * std::log(x[i]);
    }
    return h;
}

double pair_ratio_sum(const Graph& g, const Point& w, const Point& v) {
    check_size(g, v);
    check_size(g, w);
    double f = 0;
    for (const auto& e : g.edges()) f += (w[idx(e.u)] + w[idx(e.v)]) / pair_sum(v, e.u, e.v);
    return f;
}

double uniqueness_lyapunov_rate(const Graph& g, const Point& w, const Point& x) {
    return -1.0 + pair_ratio_sum(g, w, x) * inv_edges(g);
}

Matrix jacobian(const Graph& g, const Point& v) {
    // dF_i/dv_j = v_i d2L/dv_i dv_j, plus dL/dv_i on the diagonal.
    const Matrix hess = lyapunov_hessian(g, v);
    const Point grad = lyapunov_grad(g, v);
    Matrix j = v.asDiagonal() * hess;
    j.diagonal() += grad;
    return j;
}

Matrix jacobian_bipartite(const Graph& g, const GraphClass& cls, double p, double q) {
    if (!cls.regular_bipartite() || !cls.bipartition || !cls.degree_r)
        throw Error(Errc::not_regular_bipartite, "graph is not regular bipartite");
    const auto m = static_cast<double>(g.vertex_count());
    const auto r = static_cast<double>(*cls.degree_r);
    const double scale = m / (2.0 * r);
    const auto& part = *cls.bipartition;

    std::vector<bool> in_a(g.vertex_count(), false);
    for (Vertex i : part.a) in_a[i] = true;

    // -I + (m/2r) [ rqI  -pM ; -qM^t  rpI ] with rows of A scaled by p and
    // rows of B by q, written back in the graph's own vertex order.
    Matrix j = -Matrix::Identity(idx(g.vertex_count()), idx(g.vertex_count()));
    for (Vertex i = 0; i < g.vertex_count(); ++i) {
        j(idx(i), idx(i)) += scale * r * (in_a[i] ? q : p);
        for (Vertex k : g.neighbors(i)) j(idx(i), idx(k)) -= scale * (in_a[i] ? p : q);
    }
    return j;
}

double domain_constant(const Graph& g, const Point& x0) {
    check_size(g, x0);
    double min_pair = std::numeric_limits<double>::infinity();
    for (const auto& e : g.edges()) min_pair = std::min(min_pair, x0[idx(e.u)] + x0[idx(e.v)]);
    return std::min(0.5 * inv_edges(g), 0.5 * min_pair);
}

double domain_violation(const Graph& g, const Point& x, double c) {
    check_size(g, x);
    double worst = std::abs(x.sum() - 1.0);
    for (Index i = 0; i < x.size(); ++i) worst = std::max(worst, -x[i]);
    for (const auto& e : g.edges()) worst = std::max(worst, c - (x[idx(e.u)] + x[idx(e.v)]));
    return std::max(0.0, worst);
}

namespace {

Point rk4_step(const Graph& g, const Point& x, double h) {
    const Point k1 = vector_field(g, x);
    const Point k2 = vector_field(g, x + 0.5 * h * k1);
    const Point k3 = vector_field(g, x + 0.5 * h * k2);
    const Point k4 = vector_field(g, x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct Integrator {
    const Graph& g;
    double c;
    const Tolerances& tol;
    FlowResult& stats;
    double lyap;

    // Advances x by exactly h, subdividing when a step leaves the domain.
    void advance(Point& x, double h) {
        double remaining = h;
        while (remaining > 0) {
            double trial = remaining;
            Point next;
            bool accepted = false;
            for (int halving = 0; halving <= 20; ++halving) {
                try {
                    next = rk4_step(g, x, trial);
                } catch (const Error& e) {
                    if (e.code() != Errc::degenerate_pair) throw;
                    trial *= 0.5;
                    continue;
                }
                if (domain_violation(g, next, c) - std::abs(next.sum() - 1.0) <= tol.domain_slack) {
                    accepted = true;
                    break;
                }
                trial *= 0.5;
            }
            if (!accepted)
                throw Error(Errc::left_domain, "RK4 step leaves the domain after 20 halvings");

            stats.max_drift = std::max(stats.max_drift, std::abs(next.sum() - 1.0));
            next = next.cwiseMax(0.0);
            next /= next.sum();
            stats.max_violation = std::max(stats.max_violation, domain_violation(g, next, c));
            const double l = lyapunov(g, next);
            stats.min_delta_lyapunov = std::min(stats.min_delta_lyapunov, l - lyap);
            lyap = l;
            x = std::move(next);
            ++stats.steps;
            remaining -= trial;
            if (remaining < 1e-15 * h) remaining = 0;
        }
    }
};

void check_start(const Graph& g, const Point& x0, double c, const Tolerances& tol) {
    check_size(g, x0);
    if (!(c > 0) || domain_violation(g, x0, c) > tol.domain_slack)
        throw Error(Errc::domain, "starting point is outside the domain");
}

}  // namespace

FlowResult flow(const Graph& g, const Point& x0, double t, double dt, const Tolerances& tol,
                bool record_path) {
    if (!(dt > 0) || !(t >= 0)) throw Error(Errc::domain, "flow needs t >= 0 and dt > 0");
    FlowResult out;
    out.domain_c = domain_constant(g, x0);
    check_start(g, x0, out.domain_c, tol);
    out.lyapunov_start = lyapunov(g, x0);
    out.min_delta_lyapunov = std::numeric_limits<double>::infinity();

    Integrator integ{g, out.domain_c, tol, out, out.lyapunov_start};
    Point x = x0;
    if (record_path) {
        out.times.push_back(0);
        out.path.push_back(x);
    }
    const auto full_steps = static_cast<std::uint64_t>(std::floor(t / dt + 1e-9));
    double elapsed = 0;
    for (std::uint64_t k = 0; k <= full_steps; ++k) {
        const double h = k < full_steps ? dt : t - static_cast<double>(full_steps) * dt;
        if (h <= 1e-15 * std::max(1.0, t)) continue;
        integ.advance(x, h);
        elapsed = k < full_steps ? static_cast<double>(k + 1) * dt : t;
        if (record_path) {
            out.times.push_back(elapsed);
            out.path.push_back(x);
        }
    }
    if (out.steps == 0) out.min_delta_lyapunov = 0;
    out.endpoint = std::move(x);
    out.t = t;
    out.lyapunov_end = integ.lyap;
    return out;
}

std::vector<Point> flow_at(const Graph& g, const Point& x0, const std::vector<double>& times,
                           double max_dt, const Tolerances& tol) {
    FlowResult stats;
    stats.domain_c = domain_constant(g, x0);
    check_start(g, x0, stats.domain_c, tol);
    Integrator integ{g, stats.domain_c, tol, stats, lyapunov(g, x0)};
    std::vector<Point> out;
    out.reserve(times.size());
    Point x = x0;
    double now = 0;
    for (double target : times) {
        if (target < now) throw Error(Errc::domain, "flow_at times must be ascending");
        while (target - now > 1e-15) {
            const bool last = target - now <= max_dt;
            integ.advance(x, last ? target - now : max_dt);
            now = last ? target : now + max_dt;
        }
        out.push_back(x);
    }
    return out;
}

std::vector<GapSample> shadowing_gap(const Trajectory& traj, const Graph& g, double window,
                                     double dt, const Tolerances& tol) {
    const std::size_t n = traj.tau.size();
    if (n != traj.points.size()) throw Error(Errc::sparse_trajectory, "malformed trajectory");
    for (std::size_t k = 1; k < n; ++k)
        if (traj.tau[k] - traj.tau[k - 1] > window / 10.0)
            throw Error(Errc::sparse_trajectory,
                        "tau spacing " + std::to_string(traj.tau[k] - traj.tau[k - 1]) +
                            " exceeds window/10 at sample " + std::to_string(k));

    std::vector<GapSample> out;
    if (n == 0) return out;
    const double end = traj.tau.back();
    for (std::size_t start = 0; start < n && traj.tau[start] + window <= end; ++start) {
        const double t0 = traj.tau[start];
        std::vector<std::size_t> probes;
        double last = t0;
        for (std::size_t k = start + 1; k < n && traj.tau[k] <= t0 + window; ++k) {
            if (traj.tau[k] - last >= dt) {
                probes.push_back(k);
                last = traj.tau[k];
            }
        }
        std::vector<double> offsets;
        offsets.reserve(probes.size());
        for (auto k : probes) offsets.push_back(traj.tau[k] - t0);
        const auto flowed = flow_at(g, traj.points[start], offsets, dt, tol);

        double gap = 0;
        for (std::size_t p = 0; p < probes.size(); ++p)
            gap = std::max(gap, l1_distance(traj.points[probes[p]], flowed[p]));
        out.push_back({t0, gap, traj.steps.empty() ? start : traj.steps[start]});
    }
    return out;
}

}  // namespace urnflow
