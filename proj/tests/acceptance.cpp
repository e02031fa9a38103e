// Acceptance suite: one pass/fail line per criterion. Exit status is the
// number of failing criteria (0 when all pass).

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "oracles.hpp"
#include "urnflow/dynamics.hpp"
#include "urnflow/equilibria.hpp"
#include "urnflow/io.hpp"
#include "urnflow/urn.hpp"
#include "urnflow/verify.hpp"

using namespace urnflow;
using namespace urnflow::testing;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Verdict {
    bool pass;
    std::string detail;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double stddev(const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

EnsembleSummary ensemble_to_limit(const Graph& g, std::uint64_t runs, std::uint64_t steps,
                                  std::vector<std::uint64_t> checkpoints = {}) {
    const GraphClass cls = classify_graph(g);
    const LimitResult limit = limit_object(g);
    EnsembleOptions eo;
    eo.checkpoints = std::move(checkpoints);
    eo.distance = [&](const Point& x) { return distance_to_limit(g, cls, limit, x); };
    return monte_carlo(g, unit_counts(g), steps, runs, kSeed, eo);
}

// Criterion 1 is shared with 11 and 14, so its ensembles are kept.
struct RegularRuns {
    std::vector<Graph> graphs;
    std::vector<EnsembleSummary> ensembles;
    double seconds = 0;
};

RegularRuns& regular_runs() {
    static RegularRuns r = [] {
        RegularRuns out;
        out.graphs = {corpus_graph("K3"), corpus_graph("C5")};
        const auto t0 = std::chrono::steady_clock::now();
        for (const auto& g : out.graphs) out.ensembles.push_back(ensemble_to_limit(g, 100, 100000));
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }();
    return r;
}

Verdict regular_non_bipartite_convergence() {
    auto& r = regular_runs();
    bool pass = r.seconds < 10.0;
    std::string detail;
    for (std::size_t k = 0; k < r.graphs.size(); ++k) {
        const auto& d = r.ensembles[k].distances;
        const auto close = std::count_if(d.begin(), d.end(), [](double x) { return x <= 0.02; });
        pass = pass && close >= 95;
        detail += fmt::format("{}: {}/100 within 0.02 (median {:.4f}); ", r.graphs[k].name(), close, median(d));
    }
    detail += fmt::format("time {:.2f}s (< 10s)", r.seconds);
    return {pass, detail};
}

Verdict star_absorption() {
    bool pass = true;
    std::string detail;
    for (const char* name : {"K1_3", "K1_5"}) {
        const Graph g = corpus_graph(name);
        const auto s = ensemble_to_limit(g, 100, 100000, {1000, 10000});
        std::vector<double> med;
        for (std::size_t c = 0; c < s.checkpoints.size(); ++c) {
            std::vector<double> col;
            for (const auto& row : s.distance_series) col.push_back(row[c]);
            med.push_back(median(col));
        }
        const bool dec = med[1] < med[0] && med[2] < med[1];
        pass = pass && dec;
        detail += fmt::format("{} medians {:.4g} > {:.4g} > {:.4g}; ", name, med[0], med[1], med[2]);
    }
    return {pass, detail};
}

Verdict regular_bipartite_segment() {
    bool pass = true;
    std::string detail;
    for (const char* name : {"C4", "K33"}) {
        const Graph g = corpus_graph(name);
        const GraphClass cls = classify_graph(g);
        const auto s = ensemble_to_limit(g, 500, 100000);
        std::vector<double> p;
        double worst = 0;
        for (const auto& x : s.final_points) {
            const OmegaProjection proj = project_to_omega(g, cls, x);
            worst = std::max(worst, proj.distance);
            p.push_back(proj.p);
        }
        const double sd = stddev(p);
        pass = pass && worst < 0.05 && sd > 0.01;
        detail += fmt::format("{}: max d {:.4f} (< 0.05), sd(p) {:.4f} (> 0.01); ", name, worst, sd);
    }
    return {pass, detail};
}

Verdict classical_urn() {
    const Graph g = corpus_graph("K2");
    const auto s = monte_carlo(g, {1, 1}, 10000, 2000, kSeed);
    std::vector<double> x1;
    for (const auto& x : s.final_points) x1.push_back(x[0]);
    const double ks = ks_uniform(x1);
    bool pass = ks < 0.05;
    std::string detail = fmt::format("KS {:.4f} (< 0.05)", ks);

    const std::uint64_t runs = 100000;
    double worst_z = 0;
    for (int n = 1; n <= 6; ++n) {
        const auto law = exact_law(g, {1, 1}, n);
        const auto e = monte_carlo(g, {1, 1}, static_cast<std::uint64_t>(n), runs, kSeed + 100 + n);
        std::map<std::uint64_t, std::uint64_t> hits;
        for (const auto& x : e.final_points) ++hits[static_cast<std::uint64_t>(std::llround(x[0] * (2 + n)))];
        for (const auto& [c, prob] : law) {
            const double freq = static_cast<double>(hits[c[0]]) / static_cast<double>(runs);
            worst_z = std::max(worst_z, std::abs(freq - prob) / std::sqrt(prob * (1 - prob) / runs));
        }
    }
    pass = pass && worst_z <= 3.0;
    detail += fmt::format("; exact law n<=6: worst {:.2f} SE (<= 3)", worst_z);
    return {pass, detail};
}

Verdict unique_non_unstable() {
    bool pass = true;
    double worst_residual = 0;
    std::string bad;
    const auto graphs = corpus_not_balanced_bipartite();
    for (const auto& g : graphs) {
        int count = 0;
        for (const auto& e : find_equilibria(g)) {
            count += e.classification.stability == Stability::non_unstable;
            worst_residual = std::max(worst_residual, field_oracle(g, e.point).lpNorm<1>());
        }
        if (count != 1) {
            pass = false;
            bad += fmt::format(" {}({})", g.name(), count);
        }
    }
    pass = pass && worst_residual <= 1e-10;
    return {pass, fmt::format("{} graphs, worst residual {:.2e} (<= 1e-10){}", graphs.size(), worst_residual,
                              bad.empty() ? "" : "; wrong count:" + bad)};
}

Verdict sign_test_agreement() {
    std::size_t total = 0, agree = 0;
    for (const auto& g : corpus()) {
        for (const auto& e : find_equilibria(g)) {
            ++total;
            bool positive_sign = false;
            for (const auto& s : e.classification.sign_test) positive_sign = positive_sign || s.value > 1e-8;
            const auto& eig = e.classification.spectrum;
            const bool positive_eigen = !eig.empty() && eig.back() > 1e-8;
            agree += positive_sign == positive_eigen &&
                     (e.classification.stability == Stability::unstable) == positive_sign;
        }
    }
    return {agree == total, fmt::format("{}/{} equilibria agree", agree, total)};
}

Verdict pair_ratio_bound() {
    std::mt19937_64 rng(kSeed);
    bool pass = true;
    double worst = 1e300;
    std::size_t near_equalities = 0;
    for (const auto& g : corpus_not_balanced_bipartite()) {
        const Point w = limit_object(g).point->point;
        const double n = static_cast<double>(g.edge_count());
        auto check = [&](const Point& v) {
            const double gap = pair_ratio_sum(g, w, v) - n;
            worst = std::min(worst, gap);
            if (gap < -1e-12) pass = false;
            if (gap <= 1e-8) {
                ++near_equalities;
                if ((v - w).lpNorm<1>() > 1e-4) pass = false;
            }
        };
        for (int k = 0; k < 10000; ++k) check(random_simplex_point(g.vertex_count(), rng));
        check(w);
    }
    return {pass, fmt::format("min f - N = {:.3e} (>= -1e-12); {} near-equalities, all at w", worst,
                              near_equalities)};
}

Verdict omega_spectra() {
    bool pass = true;
    std::string detail;
    for (const char* name : {"C4", "C6", "K33"}) {
        const Graph g = corpus_graph(name);
        const OmegaSegment seg = omega_segment(g, classify_graph(g));
        int good = 0;
        for (int k = 1; k <= 20; ++k) {
            const auto eig = spectrum(g, seg.at(seg.p_plus_q * k / 21.0));
            int zeros = 0, negative = 0;
            for (double l : eig) {
                zeros += std::abs(l) <= 1e-9;
                negative += l <= -1e-6;
            }
            good += zeros == 1 && negative == static_cast<int>(eig.size()) - 1;
        }
        pass = pass && good == 20;
        detail += fmt::format("{} {}/20; ", name, good);
    }
    const Graph c4 = corpus_graph("C4");
    const OmegaSegment seg = omega_segment(c4, classify_graph(c4));
    for (const Point* end : {&seg.endpoint_a, &seg.endpoint_b}) {
        int zeros = 0;
        for (double l : spectrum(c4, *end)) zeros += std::abs(l) <= 1e-9;
        pass = pass && zeros >= 2;
        detail += fmt::format("C4 endpoint {} zeros {}; ", end == &seg.endpoint_a ? "A" : "B", zeros);
    }
    return {pass, detail};
}

Verdict numerical_calculus() {
    std::mt19937_64 rng(kSeed);
    double grad_err = 0, jac_err = 0;
    for (const auto& g : corpus()) {
        for (int k = 0; k < 100; ++k) {
            const Point x = random_interior_point(g.vertex_count(), rng);
            grad_err = std::max(grad_err, (lyapunov_grad(g, x) - fd_gradient(g, x, 1e-6)).lpNorm<Eigen::Infinity>());
            jac_err = std::max(jac_err, (jacobian(g, x) - fd_jacobian(g, x, 1e-6)).lpNorm<Eigen::Infinity>());
        }
    }
    auto closed_form = [](const std::string& name, const Point& v, std::vector<double> want) {
        const auto got = general_eigenvalues(jacobian(corpus_graph(name), v));
        double err = 0;
        for (std::size_t i = 0; i < want.size(); ++i) err = std::max(err, std::abs(got[i] - want[i]));
        return err;
    };
    const double k3 = closed_form("K3", Point::Constant(3, 1.0 / 3.0), {-1.0, -0.25, -0.25});
    const double c4 = closed_form("C4", Point::Constant(4, 0.25), {-1.0, -0.5, -0.5, 0.0});
    const bool pass = grad_err <= 1e-6 && jac_err <= 1e-5 && k3 <= 1e-9 && c4 <= 1e-9;
    return {pass, fmt::format("grad {:.2e} (<= 1e-6), jac {:.2e} (<= 1e-5), K3 {:.1e}, C4 {:.1e} (<= 1e-9)",
                              grad_err, jac_err, k3, c4)};
}

Verdict lyapunov_monotone() {
    std::mt19937_64 rng(kSeed);
    double worst_step = 1e300;
    std::size_t flat = 0, total = 0;
    for (const auto& g : corpus()) {
        for (int k = 0; k < 50; ++k) {
            const Point x0 = random_interior_point(g.vertex_count(), rng);
            const FlowResult r = flow(g, x0, 50.0, 1e-2);
            worst_step = std::min(worst_step, r.min_delta_lyapunov);
            ++total;
            const bool at_equilibrium = field_oracle(g, x0).lpNorm<1>() <= 1e-10;
            if (!at_equilibrium && !(r.lyapunov_end > r.lyapunov_start)) ++flat;
        }
    }
    return {worst_step >= -1e-9 && flat == 0,
            fmt::format("{} flows, min step dL {:.2e} (>= -1e-9), {} without net increase", total, worst_step,
                        flat)};
}

Verdict decomposition_identity() {
    auto& r = regular_runs();
    double worst = 0;
    std::uint64_t steps = 0;
    bool same_runs = true;
    for (std::size_t k = 0; k < r.graphs.size(); ++k) {
        const Graph& g = r.graphs[k];
        const auto& ens = r.ensembles[k];
        StepObserver obs = [&](const UrnState& a, const UrnState& b) {
            const Point xa = proportions(a), xb = proportions(b);
            const double gamma = 1.0 / (static_cast<double>(a.initial_total) / static_cast<double>(g.edge_count()) +
                                        static_cast<double>(a.n) + 1.0);
            Point u = Point::Zero(xa.size());
            for (Eigen::Index i = 0; i < xa.size(); ++i)
                u[i] = static_cast<double>(b.counts[static_cast<std::size_t>(i)] - a.counts[static_cast<std::size_t>(i)]);
            for (const auto& e : g.edges()) {
                const double s = xa[ix(e.u)] + xa[ix(e.v)];
                u[ix(e.u)] -= xa[ix(e.u)] / s;
                u[ix(e.v)] -= xa[ix(e.v)] / s;
            }
            u /= static_cast<double>(g.edge_count());
            worst = std::max(worst, (xb - xa - gamma * (field_oracle(g, xa) + u)).lpNorm<1>());
            ++steps;
        };
        for (std::uint64_t run_k = 0; run_k < ens.runs; ++run_k) {
            const auto traj = run(g, unit_counts(g), ens.steps, derive_stream_seed(kSeed, run_k),
                                  ens.steps, obs);
            same_runs = same_runs && traj.points.back() == ens.final_points[run_k];
        }
    }
    return {worst <= 1e-12 && same_runs,
            fmt::format("{} steps, worst residual {:.2e} (<= 1e-12){}", steps, worst,
                        same_runs ? "" : "; replayed runs differ from the ensemble")};
}

Verdict interval_dichotomy() {
    const Graph p4 = corpus_graph("P4");
    const bool p4_empty = !interior_interval(p4, classify_graph(p4));
    bool pass = p4_empty;
    std::string detail = fmt::format("P4 {}; ", p4_empty ? "empty" : "NOT empty");
    for (const char* name : {"C4", "K2"}) {
        const Graph g = corpus_graph(name);
        const auto iv = interior_interval(g, classify_graph(g));
        double worst = 0;
        if (iv)
            for (int k = 0; k < 50; ++k)
                worst = std::max(worst, field_oracle(g, iv->at(iv->eta_min + (iv->eta_max - iv->eta_min) *
                                                                                 (k + 0.5) / 50.0))
                                            .lpNorm<1>());
        const bool ok = iv && worst <= 1e-10;
        pass = pass && ok;
        detail += iv ? fmt::format("{} eta in ({:.4f}, {:.4f}) max residual {:.1e}; ", name, iv->eta_min,
                                   iv->eta_max, worst)
                     : fmt::format("{} missing; ", name);
    }
    return {pass, detail};
}

Verdict grid_oracle() {
    bool pass = true;
    std::string detail;
    for (const char* name : {"K3", "P3"}) {
        const Graph g = corpus_graph(name);
        const auto eqs = find_equilibria(g);
        const auto grid = simplex_grid_scan(g, 200);
        // Grid points with small residual must sit near a returned equilibrium.
        std::size_t flagged = 0, orphans = 0;
        for (const auto& gp : grid) {
            if (gp.residual > 1e-3) continue;
            ++flagged;
            double best = 1e300;
            for (const auto& e : eqs) best = std::min(best, l1_distance(gp.x, e.point));
            orphans += best > 0.02;
        }
        // Each returned equilibrium must sit near a grid-local minimum of the residual.
        std::size_t unmatched = 0;
        for (const auto& e : eqs) {
            double best = 1e300;
            for (const auto& gp : grid)
                if (gp.local_min) best = std::min(best, l1_distance(gp.x, e.point));
            unmatched += best > 0.02;
        }
        pass = pass && orphans == 0 && unmatched == 0;
        detail += fmt::format("{}: {} equilibria, {} low-residual grid points, {} orphans, {} unmatched; ", name,
                              eqs.size(), flagged, orphans, unmatched);
    }
    return {pass, detail};
}

Verdict determinism() {
    auto& r = regular_runs();
    bool pass = true;
    for (std::size_t k = 0; k < r.graphs.size(); ++k) {
        const std::string first = dump_json(to_json(r.ensembles[k]));
        const std::string again = dump_json(to_json(ensemble_to_limit(r.graphs[k], 100, 100000)));
        pass = pass && first == again;
    }
    return {pass, pass ? "ensemble JSON byte-identical on rerun" : "ensemble JSON differs on rerun"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"regular non-bipartite graphs converge to the uniform point", regular_non_bipartite_convergence},
        {"stars absorb into the centre", star_absorption},
        {"regular bipartite graphs converge to a random point of the segment", regular_bipartite_segment},
        {"two-colour urn matches the uniform limit and the exact law", classical_urn},
        {"exactly one non-unstable equilibrium off balanced bipartite graphs", unique_non_unstable},
        {"sign test agrees with the spectrum", sign_test_agreement},
        {"pair-ratio sum lower bound", pair_ratio_bound},
        {"spectra along the segment", omega_spectra},
        {"gradient, Jacobian and closed-form spectra", numerical_calculus},
        {"Lyapunov function increases along the flow", lyapunov_monotone},
        {"stochastic approximation step identity", decomposition_identity},
        {"interior interval exists or is empty", interval_dichotomy},
        {"grid residual scan matches the equilibria", grid_oracle},
        {"ensemble output is deterministic", determinism},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v{false, ""};
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !v.pass;
        fmt::print("[{}] {:2d}. {}: {} ({:.1f}s)\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, v.detail,
                   secs);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed;
}
