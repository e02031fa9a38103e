#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "urnflow/graph.hpp"
#include "urnflow/rng.hpp"
#include "urnflow/types.hpp"

namespace urnflow {

/// Ball counts of the urn after `n` steps. Each step adds one ball per edge,
/// so the total is always initial_total + n * balls_per_step.
struct UrnState {
    std::vector<std::uint64_t> counts;
    std::uint64_t n = 0;
    std::uint64_t initial_total = 0;
    std::uint64_t balls_per_step = 0;

    std::uint64_t total() const noexcept { return initial_total + n * balls_per_step; }
};

UrnState init_state(const Graph& g, const std::vector<std::uint64_t>& initial_counts);

/// All-ones initial configuration.
std::vector<std::uint64_t> unit_counts(const Graph& g);

/// One step of the process. Every edge draw uses the counts at step start.
UrnState step(const UrnState& s, const Graph& g, RandomStream& rng);

/// In-place variant of step(); `scratch` avoids reallocating the snapshot.
void advance(UrnState& s, const Graph& g, RandomStream& rng, std::vector<std::uint64_t>& scratch);

Point proportions(const UrnState& s);

struct Schedule {
    double gamma = 0;
    double tau = 0;
};

/// gamma_n = 1 / (N0/N + n + 1) and tau_n = sum_{k<n} gamma_k, summed in
/// increasing k so the result matches what run() accumulates.
Schedule step_schedule(const Graph& g, std::uint64_t initial_total, std::uint64_t n);

/// gamma_n only, for a graph with N edges.
double step_gamma(std::uint64_t edge_count, std::uint64_t initial_total, std::uint64_t n);

/// Martingale increment u(n) between consecutive states.
Point noise_term(const UrnState& before, const UrnState& after, const Graph& g);

struct Trajectory {
    std::string graph;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> steps;
    std::vector<Point> points;
    std::vector<double> gamma;
    std::vector<double> tau;
    UrnState final_state;
};

using StepObserver = std::function<void(const UrnState& before, const UrnState& after)>;

/// Stride that keeps a trajectory at or under 10^4 recorded points.
std::uint64_t default_sample_stride(std::uint64_t steps);

/// Simulates `steps` steps, recording every `sample_stride`-th state (0 picks
/// the default) and always the final one. The observer, when set, sees every
/// step.
Trajectory run(const Graph& g, const std::vector<std::uint64_t>& initial_counts, std::uint64_t steps,
               std::uint64_t seed, std::uint64_t sample_stride = 0, const StepObserver& observer = {});

struct EnsembleOptions {
    /// Steps at which each run's state is additionally recorded (sorted,
    /// each <= steps). The final step is always recorded.
    std::vector<std::uint64_t> checkpoints;
    /// Distance of a point to the predicted limit object.
    std::function<double(const Point&)> distance;
    /// Coordinate of a point along the limit segment, when there is one.
    std::function<double(const Point&)> omega_coordinate;
    double omega_min = 0;
    double omega_max = 1;
    std::size_t histogram_bins = 20;
    /// 0 means URNFLOW_THREADS or hardware concurrency.
    unsigned threads = 0;
    /// Keep each run's full trajectory (sampled every `sample_stride` steps,
    /// 0 picks the default).
    bool record_trajectories = false;
    std::uint64_t sample_stride = 0;
};

struct EnsembleStats {
    double mean = 0;
    double median = 0;
    double max = 0;
};

struct EnsembleSummary {
    std::string graph;
    std::uint64_t runs = 0;
    std::uint64_t steps = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> checkpoints;           // includes the final step last
    std::vector<std::vector<Point>> checkpoint_points;  // [run][checkpoint]
    std::vector<Point> final_points;
    std::vector<double> distances;                       // final distances, empty without a metric
    std::vector<std::vector<double>> distance_series;   // [run][checkpoint]
    EnsembleStats stats;
    std::vector<double> omega_coordinates;
    std::vector<std::uint64_t> omega_histogram;
    double omega_min = 0;
    double omega_max = 0;
    std::vector<Trajectory> trajectories;  // only with record_trajectories
};

/// Thread count from URNFLOW_THREADS, defaulting to hardware concurrency.
unsigned default_thread_count();

/// Runs `runs` independent simulations; run k uses derive_stream_seed(seed, k).
EnsembleSummary monte_carlo(const Graph& g, const std::vector<std::uint64_t>& initial_counts,
                            std::uint64_t steps, std::uint64_t runs, std::uint64_t master_seed,
                            const EnsembleOptions& options = {});

}  // namespace urnflow
