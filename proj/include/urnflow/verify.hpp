#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "urnflow/dynamics.hpp"
#include "urnflow/graph.hpp"
#include "urnflow/io.hpp"
#include "urnflow/tolerances.hpp"

namespace urnflow {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0;
    double threshold = 0;
    std::string detail;
};

struct VerifyReport {
    std::string graph;
    std::string level;
    std::vector<CheckResult> checks;

    bool pass() const;
};

enum class VerifyLevel { quick, full };

struct VerifyOptions {
    VerifyLevel level = VerifyLevel::quick;
    std::uint64_t seed = 1;
    Tolerances tol;
    /// Vector field under test; the default is the real one. Replacing it
    /// lets a test confirm that the suite notices a broken field.
    VectorFieldFn field;
};

VerifyReport run_verify(const Graph& g, const VerifyOptions& options = {});

Json to_json(const VerifyReport& report);

// Sampling helpers shared by the suite and the tests.

/// Uniform point of the open simplex (flat Dirichlet).
Point random_simplex_point(std::size_t m, std::mt19937_64& rng);

/// Simplex point pulled toward the barycenter, so every coordinate is at
/// least `floor_weight / m`.
Point random_interior_point(std::size_t m, std::mt19937_64& rng, double floor_weight = 0.2);

/// Largest absolute entry error of the analytic gradient of L against central
/// differences with step h.
double gradient_fd_error(const Graph& g, const Point& x, double h);

/// Largest absolute entry error of jacobian() against central differences of
/// the given vector field with step h.
double jacobian_fd_error(const Graph& g, const Point& x, double h, const VectorFieldFn& field);

}  // namespace urnflow
