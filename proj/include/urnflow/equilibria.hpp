#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "urnflow/error.hpp"
#include "urnflow/graph.hpp"
#include "urnflow/tolerances.hpp"
#include "urnflow/types.hpp"

namespace urnflow {

using Support = std::vector<Vertex>;

enum class Stability { unstable, non_unstable };

const char* stability_name(Stability s) noexcept;

/// One-parameter family u(eta) = base + eta * direction of interior
/// equilibria of a balanced bipartite graph, eta in (eta_min, eta_max).
struct InteriorInterval {
    Point base;
    Point direction;  // +1 on A, -1 on B
    double eta_min = 0;
    double eta_max = 0;
    double max_sample_residual = 0;

    Point at(double eta) const { return base + eta * direction; }
};

struct SignEntry {
    Vertex vertex;
    double value;  // dL/dv at a zero coordinate
};

struct Classification {
    Stability stability = Stability::non_unstable;
    std::vector<SignEntry> sign_test;
    std::vector<double> spectrum;  // ascending
    bool consistent = true;        // sign test agrees with the spectrum
};

struct Equilibrium {
    Point point;
    Support support;
    Support zero_set;
    double residual = 0;  // |F|_1
    Classification classification;
    std::optional<InteriorInterval> interval;
};

Support support_of(const Point& v);

/// Supports S whose complement is an independent set, in lexicographic order.
/// Throws Errc::too_large for more than 24 vertices.
std::vector<Support> enumerate_faces(const Graph& g);

/// Critical point of L restricted to the relative interior of the face with
/// support S, or nullopt when the maximising iteration exits to the face's
/// boundary. A damped multiplicative fixed-point iteration started at the
/// face's barycenter, finished with Newton steps on the stationarity system.
std::optional<Point> face_critical_point(const Graph& g, const Support& s, const Tolerances& tol = {});

/// Eigenvalues of JF(v). The zero coordinates contribute dL/dv_i directly;
/// the block on the support is conjugated to a symmetric matrix by
/// diag(sqrt(v)) and diagonalised by Jacobi rotations.
std::vector<double> spectrum(const Graph& g, const Point& v, const Tolerances& tol = {});

/// Sign test on the zero set, cross-checked against the spectrum. Throws
/// Errc::inconsistent_classification when the two disagree.
Classification classify_equilibrium(const Graph& g, const Point& v, const Tolerances& tol = {});

/// As classify_equilibrium, but records disagreement in `consistent`.
Classification classification_of(const Graph& g, const Point& v, const Tolerances& tol = {});

/// Union of face critical points, verified, classified and deduplicated.
/// Balanced bipartite graphs with an interior equilibrium report the interval
/// on the full-support entry. Ordered by support size descending, then
/// lexicographically by support.
std::vector<Equilibrium> find_equilibria(const Graph& g, const Tolerances& tol = {});

struct OmegaSegment {
    double p_plus_q = 0;
    Support part_a;
    Support part_b;
    Point endpoint_a;  // p = 2/m: all mass on A
    Point endpoint_b;  // p = 0: all mass on B
    Point midpoint;

    Point at(double p) const;
};

OmegaSegment omega_segment(const Graph& g, const GraphClass& cls);

/// Empty when the full face has no interior critical point.
std::optional<InteriorInterval> interior_interval(const Graph& g, const GraphClass& cls,
                                                  const Tolerances& tol = {});

struct OmegaProjection {
    Point nearest;
    double p = 0;
    double distance = 0;
};

/// Nearest point to x on {base + eta * direction : eta in [lo, hi]} in L1,
/// returned with its eta.
std::pair<double, double> nearest_on_line(const Point& x, const Point& base, const Point& direction,
                                          double lo, double hi);

/// Nearest point of the segment in L1, by exact minimisation of the convex
/// piecewise-linear distance over its breakpoints.
OmegaProjection project_to_omega(const Graph& g, const GraphClass& cls, const Point& x);

enum class LimitKind { unique_point, omega_segment, interior_interval, finite_set };

const char* limit_kind_name(LimitKind k) noexcept;

struct LimitResult {
    LimitKind kind = LimitKind::unique_point;
    std::optional<Equilibrium> point;
    std::optional<OmegaSegment> omega;
    std::optional<InteriorInterval> interval;
    std::vector<Equilibrium> candidates;  // non-unstable equilibria found
    std::string note;
};

class UniquenessViolation : public Error {
public:
    UniquenessViolation(const std::string& what, std::vector<Equilibrium> candidates)
        : Error(Errc::uniqueness_violation, what), candidates_(std::move(candidates)) {}

    const std::vector<Equilibrium>& candidates() const noexcept { return candidates_; }

private:
    std::vector<Equilibrium> candidates_;
};

/// Predicted almost-sure limit object. Throws Errc::uniqueness_violation when
/// a graph that is not balanced bipartite has other than exactly one
/// non-unstable equilibrium.
LimitResult limit_object(const Graph& g, const Tolerances& tol = {});

/// L1 distance from x to the limit object (to the point, the segment, or the
/// nearest member of the interval or finite set).
double distance_to_limit(const Graph& g, const GraphClass& cls, const LimitResult& limit,
                         const Point& x);

}  // namespace urnflow
