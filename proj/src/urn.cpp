#include "urnflow/urn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "urnflow/error.hpp"

namespace urnflow {

UrnState init_state(const Graph& g, const std::vector<std::uint64_t>& initial_counts) {
    if (initial_counts.size() != g.vertex_count())
        throw Error(Errc::invalid_initial, "expected " + std::to_string(g.vertex_count()) +
                                               " initial counts, got " +
                                               std::to_string(initial_counts.size()));
    UrnState s;
    s.counts = initial_counts;
    s.balls_per_step = g.edge_count();
    for (std::size_t i = 0; i < initial_counts.size(); ++i) {
        if (initial_counts[i] < 1)
            throw Error(Errc::invalid_initial, "vertex " + std::to_string(i + 1) + " has no balls");
        if (s.initial_total > std::numeric_limits<std::uint64_t>::max() - initial_counts[i])
            throw Error(Errc::overflow, "initial ball total overflows");
        s.initial_total += initial_counts[i];
    }
    return s;
}

std::vector<std::uint64_t> unit_counts(const Graph& g) {
    return std::vector<std::uint64_t>(g.vertex_count(), 1);
}

void advance(UrnState& s, const Graph& g, RandomStream& rng, std::vector<std::uint64_t>& scratch) {
    if (s.total() > std::numeric_limits<std::uint64_t>::max() - s.balls_per_step)
        throw Error(Errc::overflow, "ball total would overflow at step " + std::to_string(s.n + 1));
    scratch = s.counts;
    for (const auto& e : g.edges()) {
        const std::uint64_t bi = scratch[e.u];
        const std::uint64_t bj = scratch[e.v];
        if (rng.bernoulli(bi, bi + bj))
            ++s.counts[e.u];
        else
            ++s.counts[e.v];
    }
    ++s.n;
}

UrnState step(const UrnState& s, const Graph& g, RandomStream& rng) {
    UrnState next = s;
    std::vector<std::uint64_t> scratch;
    advance(next, g, rng, scratch);
    return next;
}

Point proportions(const UrnState& s) {
    const double total = static_cast<double>(s.total());
    Point x(static_cast<Eigen::Index>(s.counts.size()));
    for (std::size_t i = 0; i < s.counts.size(); ++i)
        x[static_cast<Eigen::Index>(i)] = static_cast<double>(s.counts[i]) / total;
    return x;
}

double step_gamma(std::uint64_t edge_count, std::uint64_t initial_total, std::uint64_t n) {
    const double per_step = static_cast<double>(edge_count);
    return 1.0 / (static_cast<double>(initial_total) / per_step + static_cast<double>(n) + 1.0);
}

Schedule step_schedule(const Graph& g, std::uint64_t initial_total, std::uint64_t n) {
    Schedule out;
    for (std::uint64_t k = 0; k < n; ++k) out.tau += step_gamma(g.edge_count(), initial_total, k);
    out.gamma = step_gamma(g.edge_count(), initial_total, n);
    return out;
}

Point noise_term(const UrnState& before, const UrnState& after, const Graph& g) {
    const std::size_t m = g.vertex_count();
    if (after.n != before.n + 1 || after.counts.size() != m || before.counts.size() != m ||
        after.initial_total != before.initial_total)
        throw Error(Errc::not_successor, "states are not one step apart");
    std::uint64_t added = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (after.counts[i] < before.counts[i] || after.counts[i] - before.counts[i] > g.degree(i))
            throw Error(Errc::not_successor, "count change at vertex " + std::to_string(i + 1) +
                                                 " is not reachable in one step");
        added += after.counts[i] - before.counts[i];
    }
    if (added != g.edge_count()) throw Error(Errc::not_successor, "ball total did not grow by N");

    // The per-edge indicators enter u_i only through their sum over j ~ i,
    // which is the number of balls vertex i received.
    const Point x = proportions(before);
    const double inv_n = 1.0 / static_cast<double>(g.edge_count());
    Point u(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const double xi = x[static_cast<Eigen::Index>(i)];
        double expected = 0;
        for (Vertex j : g.neighbors(i)) expected += xi / (xi + x[static_cast<Eigen::Index>(j)]);
        const double received = static_cast<double>(after.counts[i] - before.counts[i]);
        u[static_cast<Eigen::Index>(i)] = inv_n * (received - expected);
    }
    return u;
}

std::uint64_t default_sample_stride(std::uint64_t steps) {
    constexpr std::uint64_t max_points = 10000;
    return std::max<std::uint64_t>(1, (steps + max_points - 1) / max_points);
}

namespace {

struct SimulationRequest {
    std::uint64_t steps = 0;
    std::uint64_t seed = 0;
    std::uint64_t sample_stride = 0;  // 0: no trajectory
    const StepObserver* observer = nullptr;
    const std::vector<std::uint64_t>* checkpoints = nullptr;
};

struct SimulationOutput {
    Trajectory trajectory;
    std::vector<Point> checkpoints;
};

SimulationOutput simulate(const Graph& g, const std::vector<std::uint64_t>& initial_counts,
                          const SimulationRequest& req) {
    UrnState s = init_state(g, initial_counts);
    const std::uint64_t per_step = g.edge_count();
    if (req.steps > 0 &&
        (std::numeric_limits<std::uint64_t>::max() - s.initial_total) / per_step < req.steps)
        throw Error(Errc::overflow, "ball total would overflow within " + std::to_string(req.steps) +
                                        " steps");

    SimulationOutput out;
    Trajectory& traj = out.trajectory;
    traj.graph = g.name();
    traj.seed = req.seed;
    RandomStream rng(req.seed);
    std::vector<std::uint64_t> scratch;
    double tau = 0;
    const bool recording = req.sample_stride > 0;
    const std::vector<std::uint64_t> none;
    const auto& checkpoints = req.checkpoints ? *req.checkpoints : none;
    std::size_t next_checkpoint = 0;

    auto record = [&] {
        if (recording && (s.n % req.sample_stride == 0 || s.n == req.steps)) {
            traj.steps.push_back(s.n);
            traj.points.push_back(proportions(s));
            traj.gamma.push_back(step_gamma(per_step, s.initial_total, s.n));
            traj.tau.push_back(tau);
        }
        while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == s.n) {
            out.checkpoints.push_back(proportions(s));
            ++next_checkpoint;
        }
    };

    record();
    UrnState before;
    const bool observing = req.observer && *req.observer;
    for (std::uint64_t k = 0; k < req.steps; ++k) {
        const double gamma = step_gamma(per_step, s.initial_total, s.n);
        if (observing) before = s;
        advance(s, g, rng, scratch);
        tau += gamma;
        if (observing) (*req.observer)(before, s);
        record();
    }
    traj.final_state = std::move(s);
    return out;
}

}  // namespace

Trajectory run(const Graph& g, const std::vector<std::uint64_t>& initial_counts, std::uint64_t steps,
               std::uint64_t seed, std::uint64_t sample_stride, const StepObserver& observer) {
    SimulationRequest req;
    req.steps = steps;
    req.seed = seed;
    req.sample_stride = sample_stride ? sample_stride : default_sample_stride(steps);
    req.observer = &observer;
    return simulate(g, initial_counts, req).trajectory;
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("URNFLOW_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

EnsembleSummary monte_carlo(const Graph& g, const std::vector<std::uint64_t>& initial_counts,
                            std::uint64_t steps, std::uint64_t runs, std::uint64_t master_seed,
                            const EnsembleOptions& options) {
    if (runs < 1) throw Error(Errc::validation, "runs must be at least 1");
    const UrnState start = init_state(g, initial_counts);
    if ((std::numeric_limits<std::uint64_t>::max() - start.initial_total) / g.edge_count() < steps)
        throw Error(Errc::overflow, "ball total would overflow");

    EnsembleSummary out;
    out.graph = g.name();
    out.runs = runs;
    out.steps = steps;
    out.seed = master_seed;
    for (auto c : options.checkpoints) {
        if (c > steps) throw Error(Errc::validation, "checkpoint beyond the last step");
        if (c < steps && (out.checkpoints.empty() || c > out.checkpoints.back()))
            out.checkpoints.push_back(c);
    }
    out.checkpoints.push_back(steps);

    out.checkpoint_points.resize(runs);
    if (options.record_trajectories) out.trajectories.resize(runs);
    const std::uint64_t stride =
        options.sample_stride ? options.sample_stride : default_sample_stride(steps);
    const unsigned threads = static_cast<unsigned>(
        std::min<std::uint64_t>(runs, options.threads ? options.threads : default_thread_count()));

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::uint64_t k; (k = next.fetch_add(1)) < runs && !failed;) {
            try {
                SimulationRequest req;
                req.steps = steps;
                req.seed = derive_stream_seed(master_seed, k);
                req.sample_stride = options.record_trajectories ? stride : 0;
                req.checkpoints = &out.checkpoints;
                auto res = simulate(g, initial_counts, req);
                out.checkpoint_points[k] = std::move(res.checkpoints);
                if (options.record_trajectories) out.trajectories[k] = std::move(res.trajectory);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    out.final_points.reserve(runs);
    for (const auto& pts : out.checkpoint_points) out.final_points.push_back(pts.back());

    if (options.distance) {
        out.distance_series.resize(runs);
        for (std::uint64_t k = 0; k < runs; ++k) {
            for (const auto& p : out.checkpoint_points[k])
                out.distance_series[k].push_back(options.distance(p));
            out.distances.push_back(out.distance_series[k].back());
        }
        double sum = 0;
        for (double d : out.distances) {
            sum += d;
            out.stats.max = std::max(out.stats.max, d);
        }
        out.stats.mean = sum / static_cast<double>(runs);
        out.stats.median = median_of(out.distances);
    }

    if (options.omega_coordinate && options.histogram_bins > 0) {
        out.omega_min = options.omega_min;
        out.omega_max = options.omega_max;
        out.omega_histogram.assign(options.histogram_bins, 0);
        const double width = (options.omega_max - options.omega_min) /
                             static_cast<double>(options.histogram_bins);
        for (const auto& p : out.final_points) {
            double c = options.omega_coordinate(p);
            out.omega_coordinates.push_back(c);
            auto bin = static_cast<long long>(std::floor((c - options.omega_min) / width));
            bin = std::clamp<long long>(bin, 0, static_cast<long long>(options.histogram_bins) - 1);
            ++out.omega_histogram[static_cast<std::size_t>(bin)];
        }
    }
    return out;
}

}  // namespace urnflow
