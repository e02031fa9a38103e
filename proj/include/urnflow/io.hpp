#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "urnflow/dynamics.hpp"
#include "urnflow/equilibria.hpp"
#include "urnflow/graph.hpp"
#include "urnflow/urn.hpp"

namespace urnflow {

using Json = nlohmann::ordered_json;

/// Shortest representation that reads back to the same double; always carries
/// a '.' or an exponent so a float stays a float when read back.
std::string format_double(double v);

/// Serialises with format_double for every float. Parsing the output and
/// serialising again reproduces it byte for byte.
std::string dump_json(const Json& doc, int indent = 2);

// All vertex ids in emitted documents are 1-based.
Json point_json(const Point& x);
Json support_json(const Support& s);
Json to_json(const Graph& g, const GraphClass& cls);
Json to_json(const Equilibrium& eq);
Json to_json(const std::vector<Equilibrium>& eqs);
Json to_json(const OmegaSegment& seg);
Json to_json(const InteriorInterval& iv);
Json to_json(const LimitResult& limit);
Json to_json(const EnsembleSummary& summary);
Json to_json(const FlowResult& result);

/// Header "n,tau,x_1,...,x_m".
std::string trajectory_csv(const Trajectory& traj);

/// Header "t,gap".
std::string gap_csv(const std::vector<GapSample>& gaps);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace urnflow
