#include "urnflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "urnflow/equilibria.hpp"
#include "urnflow/error.hpp"
#include "urnflow/urn.hpp"

namespace urnflow {

bool VerifyReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

Point random_simplex_point(std::size_t m, std::mt19937_64& rng) {
    std::exponential_distribution<double> expo(1.0);
    Point x(static_cast<Eigen::Index>(m));
    for (auto& v : x) v = expo(rng);
    return x / x.sum();
}

Point random_interior_point(std::size_t m, std::mt19937_64& rng, double floor_weight) {
    const Point uniform = Point::Constant(static_cast<Eigen::Index>(m), 1.0 / static_cast<double>(m));
    return (1.0 - floor_weight) * random_simplex_point(m, rng) + floor_weight * uniform;
}

double gradient_fd_error(const Graph& g, const Point& x, double h) {
    const Point grad = lyapunov_grad(g, x);
    double worst = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Point up = x, down = x;
        up[i] += h;
        down[i] -= h;
        const double fd = (lyapunov(g, up) - lyapunov(g, down)) / (2 * h);
        worst = std::max(worst, std::abs(fd - grad[i]));
    }
    return worst;
}

double jacobian_fd_error(const Graph& g, const Point& x, double h, const VectorFieldFn& field) {
    const Matrix jac = jacobian(g, x);
    double worst = 0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        Point up = x, down = x;
        up[j] += h;
        down[j] -= h;
        const Point col = (field(g, up) - field(g, down)) / (2 * h);
        worst = std::max(worst, (col - jac.col(j)).cwiseAbs().maxCoeff());
    }
    return worst;
}

namespace {

class Suite {
public:
    Suite(const Graph& g, const VerifyOptions& opt)
        : g_(g), opt_(opt), tol_(opt.tol), cls_(classify_graph(g)), rng_(opt.seed) {
        field_ = opt.field ? opt.field : VectorFieldFn(vector_field);
    }

    VerifyReport run() {
        report_.graph = g_.name();
        report_.level = opt_.level == VerifyLevel::full ? "full" : "quick";
        guarded("decomposition_identity", [&] { decomposition(); });
        guarded("field_conservation", [&] { conservation(); });
        guarded("field_gradient_identity", [&] { field_gradient_identity(); });
        guarded("gradient_finite_difference", [&] { gradient_fd(); });
        guarded("jacobian_finite_difference", [&] { jacobian_fd(); });
        guarded("equilibria", [&] { equilibria(); });
        guarded("lyapunov_monotone", [&] { lyapunov_monotone(); });
        if (cls_.regular_bipartite()) guarded("omega", [&] { omega(); });
        if (opt_.level == VerifyLevel::full) guarded("monte_carlo", [&] { monte_carlo_check(); });
        return std::move(report_);
    }

private:
    void add(std::string name, bool pass, double value, double threshold, std::string detail = {}) {
        report_.checks.push_back({std::move(name), pass, value, threshold, std::move(detail)});
    }

    template <typename Fn>
    void guarded(const std::string& name, Fn&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            add(name, false, std::numeric_limits<double>::quiet_NaN(), 0, e.what());
        }
    }

    void decomposition() {
        double worst = 0;
        StepObserver obs = [&](const UrnState& before, const UrnState& after) {
            const Point x0 = proportions(before);
            const Point x1 = proportions(after);
            const double gamma = step_gamma(g_.edge_count(), before.initial_total, before.n);
            const Point u = noise_term(before, after, g_);
            worst = std::max(worst, (x1 - x0 - gamma * (field_(g_, x0) + u)).lpNorm<1>());
        };
        urnflow::run(g_, unit_counts(g_), 2000, opt_.seed, 0, obs);
        add("decomposition_identity", worst <= tol_.decomposition, worst, tol_.decomposition);
    }

    void conservation() {
        double worst = 0;
        for (int k = 0; k < 1000; ++k) {
            const Point x = random_simplex_point(g_.vertex_count(), rng_);
            worst = std::max(worst, std::abs(field_(g_, x).sum()));
        }
        add("field_conservation", worst <= tol_.simplex_sum, worst, tol_.simplex_sum);
    }

    void field_gradient_identity() {
        double worst = 0;
        for (int k = 0; k < 1000; ++k) {
            const Point x = random_simplex_point(g_.vertex_count(), rng_);
            const Point lhs = field_(g_, x);
            const Point rhs = x.cwiseProduct(lyapunov_grad(g_, x));
            worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
        }
        add("field_gradient_identity", worst <= tol_.simplex_sum, worst, tol_.simplex_sum);
    }

    void gradient_fd() {
        double worst = 0;
        for (int k = 0; k < 100; ++k)
            worst = std::max(worst, gradient_fd_error(g_, random_interior_point(g_.vertex_count(), rng_),
                                                      tol_.fd_step));
        add("gradient_finite_difference", worst <= tol_.fd_gradient, worst, tol_.fd_gradient);
    }

    void jacobian_fd() {
        double worst = 0;
        for (int k = 0; k < 100; ++k)
            worst = std::max(worst, jacobian_fd_error(g_, random_interior_point(g_.vertex_count(), rng_),
                                                      tol_.fd_step, field_));
        add("jacobian_finite_difference", worst <= tol_.fd_jacobian, worst, tol_.fd_jacobian);
    }

    void equilibria() {
        const auto eqs = find_equilibria(g_, tol_);
        double residual = 0, stationarity = 0, eigen_gap = 0;
        int disagreements = 0, non_unstable = 0;
        for (const auto& e : eqs) {
            residual = std::max(residual, vector_field(g_, e.point).lpNorm<1>());
            const Point grad = lyapunov_grad(g_, e.point);
            for (Vertex i : e.support)
                stationarity = std::max(stationarity, std::abs(grad[static_cast<Eigen::Index>(i)]));
            if (!e.classification.consistent) ++disagreements;
            if (e.classification.stability == Stability::non_unstable) ++non_unstable;

            // Block spectrum against a general eigensolver on the full Jacobian.
            Eigen::EigenSolver<Matrix> solver(jacobian(g_, e.point), false);
            std::vector<double> general;
            for (const auto& z : solver.eigenvalues()) {
                eigen_gap = std::max(eigen_gap, std::abs(z.imag()));
                general.push_back(z.real());
            }
            std::sort(general.begin(), general.end());
            for (std::size_t k = 0; k < general.size(); ++k)
                eigen_gap = std::max(eigen_gap, std::abs(general[k] - e.classification.spectrum[k]));
        }
        add("equilibrium_residuals", residual <= tol_.equilibrium_residual, residual,
            tol_.equilibrium_residual, fmt::format("{} equilibria", eqs.size()));
        add("support_stationarity", stationarity <= tol_.stationarity, stationarity, tol_.stationarity);
        add("sign_test_spectrum_agreement", disagreements == 0, disagreements, 0);
        add("spectrum_vs_general_eigensolver", eigen_gap <= 1e-8, eigen_gap, 1e-8);

        if (!cls_.balanced_bipartite()) {
            add("unique_non_unstable", non_unstable == 1, non_unstable, 1);
            const Equilibrium* w = nullptr;
            for (const auto& e : eqs)
                if (e.classification.stability == Stability::non_unstable) w = &e;
            if (w && non_unstable == 1) {
                double worst = std::numeric_limits<double>::infinity();
                for (int k = 0; k < 10000; ++k) {
                    const Point v = random_simplex_point(g_.vertex_count(), rng_);
                    worst = std::min(worst, pair_ratio_sum(g_, w->point, v) -
                                                static_cast<double>(g_.edge_count()));
                }
                add("pair_ratio_lower_bound", worst >= -tol_.pair_ratio, worst, -tol_.pair_ratio);
            }
        } else {
            int intervals = 0;
            double worst = 0;
            for (const auto& e : eqs)
                if (e.interval) {
                    ++intervals;
                    worst = std::max(worst, e.interval->max_sample_residual);
                }
            add("interior_interval", worst <= tol_.equilibrium_residual, worst, tol_.equilibrium_residual,
                intervals ? "interval of interior equilibria" : "no interior equilibrium");
        }
    }

    void lyapunov_monotone() {
        const int runs = opt_.level == VerifyLevel::full ? 50 : 5;
        double worst = std::numeric_limits<double>::infinity();
        for (int k = 0; k < runs; ++k) {
            const Point x0 = random_interior_point(g_.vertex_count(), rng_, 0.05);
            const FlowResult res = flow(g_, x0, 50.0, 1e-2, tol_);
            worst = std::min(worst, res.min_delta_lyapunov);
        }
        add("lyapunov_monotone", worst >= -tol_.lyapunov_monotone, worst, -tol_.lyapunov_monotone);
    }

    void omega() {
        const OmegaSegment seg = omega_segment(g_, cls_);
        const auto signs = bipartite_sign_vector(g_, cls_);
        const Point l = Eigen::Map<const Point>(signs.data(), static_cast<Eigen::Index>(signs.size()));
        double stationarity = 0, kernel = 0, agreement = 0;
        bool spectra_ok = true;
        for (int k = 0; k < 20; ++k) {
            const double p = seg.p_plus_q * (k + 1) / 21.0;
            const Point v = seg.at(p);
            stationarity = std::max(stationarity, vector_field(g_, v).lpNorm<1>());
            const Matrix jb = jacobian_bipartite(g_, cls_, p, seg.p_plus_q - p);
            kernel = std::max(kernel, (jb * l).cwiseAbs().maxCoeff());
            agreement = std::max(agreement, (jb - jacobian(g_, v)).cwiseAbs().maxCoeff());
            const auto eig = spectrum(g_, v, tol_);
            int zeros = 0;
            for (double e : eig) {
                if (std::abs(e) <= tol_.zero_eigenvalue)
                    ++zeros;
                else if (e > -tol_.negative_eigenvalue)
                    spectra_ok = false;
            }
            if (zeros != 1) spectra_ok = false;
        }
        add("omega_stationarity", stationarity <= tol_.omega_stationarity, stationarity,
            tol_.omega_stationarity);
        add("omega_kernel_direction", kernel <= tol_.bipartite_jacobian, kernel, tol_.bipartite_jacobian);
        add("bipartite_jacobian_agreement", agreement <= tol_.bipartite_jacobian, agreement,
            tol_.bipartite_jacobian);
        add("omega_interior_spectra", spectra_ok, spectra_ok ? 1 : 0, 1,
            "simple zero eigenvalue, others strictly negative");
    }

    void monte_carlo_check() {
        const LimitResult limit = limit_object(g_, tol_);
        EnsembleOptions eo;
        eo.checkpoints = {1000, 10000};
        eo.distance = [&](const Point& x) { return distance_to_limit(g_, cls_, limit, x); };
        const auto summary = monte_carlo(g_, unit_counts(g_), 100000, 100, opt_.seed, eo);
        std::vector<double> medians;
        for (std::size_t c = 0; c < summary.checkpoints.size(); ++c) {
            std::vector<double> col;
            for (const auto& series : summary.distance_series) col.push_back(series[c]);
            std::sort(col.begin(), col.end());
            medians.push_back(0.5 * (col[col.size() / 2 - 1] + col[col.size() / 2]));
        }
        bool decreasing = true;
        for (std::size_t c = 1; c < medians.size(); ++c) decreasing = decreasing && medians[c] < medians[c - 1];
        const std::string name = limit.kind == LimitKind::omega_segment ? "d(x(n),Omega) decreasing"
                                                                        : "distance to limit decreasing";
        std::string detail = fmt::format("median distance at n=1e3,1e4,1e5: {:.3g}, {:.3g}, {:.3g}",
                                         medians[0], medians[1], medians[2]);
        // No convergence result exists for balanced bipartite graphs that are
        // not regular, so the trend is reported but cannot fail the suite.
        const bool asserted = !(cls_.balanced_bipartite() && !cls_.regular_bipartite());
        if (!asserted) detail += " (reported only)";
        add(name, decreasing || !asserted, medians.back(), medians.front(), std::move(detail));
    }

    const Graph& g_;
    const VerifyOptions& opt_;
    const Tolerances& tol_;
    GraphClass cls_;
    std::mt19937_64 rng_;
    VectorFieldFn field_;
    VerifyReport report_;
};

}  // namespace

VerifyReport run_verify(const Graph& g, const VerifyOptions& options) { return Suite(g, options).run(); }

Json to_json(const VerifyReport& report) {
    Json j;
    j["graph"] = report.graph;
    j["level"] = report.level;
    Json checks = Json::array();
    for (const auto& c : report.checks) {
        Json cj;
        cj["name"] = c.name;
        cj["status"] = c.pass ? "pass" : "fail";
        cj["value"] = c.value;
        cj["threshold"] = c.threshold;
        if (!c.detail.empty()) cj["detail"] = c.detail;
        checks.push_back(std::move(cj));
    }
    j["checks"] = std::move(checks);
    j["overall"] = report.pass() ? "pass" : "fail";
    return j;
}

}  // namespace urnflow
