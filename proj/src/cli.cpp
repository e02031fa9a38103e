#include "urnflow/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "urnflow/dynamics.hpp"
#include "urnflow/equilibria.hpp"
#include "urnflow/error.hpp"
#include "urnflow/io.hpp"
#include "urnflow/urn.hpp"
#include "urnflow/verify.hpp"

namespace urnflow {

namespace {

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::parse:
        case Errc::validation:
        case Errc::invalid_initial:
        case Errc::not_regular_bipartite:
        case Errc::not_balanced_bipartite:
            return exit_parse;
        case Errc::uniqueness_violation:
        case Errc::inconsistent_classification:
        case Errc::no_convergence:
        case Errc::degenerate_point:
            return exit_theory;
        case Errc::io:
            return exit_io;
        case Errc::overflow:
        case Errc::not_successor:
        case Errc::degenerate_pair:
        case Errc::domain:
        case Errc::left_domain:
        case Errc::sparse_trajectory:
        case Errc::too_large:
            return exit_domain;
    }
    return exit_domain;
}

std::vector<double> parse_reals(const std::string& text) {
    std::vector<double> out;
    std::string token;
    std::stringstream ss(text);
    while (std::getline(ss, token, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(token, &used));
            if (token.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw Error(Errc::domain, "cannot parse \"" + token + "\" as a number");
        }
    }
    return out;
}

std::vector<std::uint64_t> parse_counts(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::string token;
    std::stringstream ss(text);
    while (std::getline(ss, token, ',')) {
        long long v = 0;
        try {
            std::size_t used = 0;
            v = std::stoll(token, &used);
            if (token.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw Error(Errc::parse, "cannot parse \"" + token + "\" as a ball count");
        }
        if (v < 1) throw Error(Errc::invalid_initial, "initial counts must be at least 1");
        out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

/// Settings shared by every command, merged from --config and flags.
struct ExperimentConfig {
    std::string graph_path;
    std::vector<std::uint64_t> initial_counts;
    std::uint64_t steps = 100000;
    std::uint64_t runs = 1;
    std::uint64_t seed = 1;
    std::uint64_t sample_stride = 0;
    std::string output_dir = "urnflow_out";
    unsigned threads = 0;
    Tolerances tol;
};

void apply_tolerance(Tolerances& tol, const std::string& name, double value) {
    if (!tol.set(name, value))
        throw Error(Errc::parse, "unknown tolerance or non-positive value: " + name);
}

void load_config(const std::string& path, ExperimentConfig& cfg) {
    Json doc;
    try {
        doc = Json::parse(read_file(path));
    } catch (const Json::exception& e) {
        throw Error(Errc::parse, "config " + path + ": " + e.what());
    }
    try {
        if (doc.contains("graph")) cfg.graph_path = doc["graph"].get<std::string>();
        if (doc.contains("initial_counts"))
            cfg.initial_counts = doc["initial_counts"].get<std::vector<std::uint64_t>>();
        if (doc.contains("steps")) cfg.steps = doc["steps"].get<std::uint64_t>();
        if (doc.contains("runs")) cfg.runs = doc["runs"].get<std::uint64_t>();
        if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("sample_stride")) cfg.sample_stride = doc["sample_stride"].get<std::uint64_t>();
        if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();
        if (doc.contains("threads")) cfg.threads = doc["threads"].get<unsigned>();
        if (doc.contains("tolerances"))
            for (const auto& [k, v] : doc["tolerances"].items()) apply_tolerance(cfg.tol, k, v.get<double>());
    } catch (const Json::exception& e) {
        throw Error(Errc::parse, "config " + path + ": " + e.what());
    }
}

class Cli {
public:
    Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    int main(const std::vector<std::string>& args) {
        CLI::App app{"Generalized Polya urn on graphs: simulation and mean-field analysis", "urnflow"};
        app.require_subcommand(1);
        app.fallthrough();
        app.add_option("--config", config_path_, "JSON experiment configuration");
        app.add_option("--tol", tol_overrides_, "Tolerance override name=value (repeatable)");

        auto* classify = app.add_subcommand("classify", "Print the graph class as JSON");
        classify->add_option("graph", graph_path_, "Graph file")->required();

        auto* equilibria = app.add_subcommand("equilibria", "Enumerate and classify equilibria");
        equilibria->add_option("graph", graph_path_, "Graph file")->required();
        auto* as_json = equilibria->add_flag("--json", "JSON report (default)");
        auto* as_table = equilibria->add_flag("--table", "Plain-text table");
        as_json->excludes(as_table);

        auto* limit = app.add_subcommand("limit", "Predicted limit object as JSON");
        limit->add_option("graph", graph_path_, "Graph file")->required();

        auto* simulate = app.add_subcommand("simulate", "Run an ensemble of urn simulations");
        simulate->add_option("graph", graph_path_, "Graph file");
        simulate->add_option("--init", init_text_, "Comma-separated initial ball counts");
        simulate->add_option("--steps", steps_, "Steps per run");
        simulate->add_option("--runs", runs_, "Number of runs")->check(CLI::PositiveNumber);
        simulate->add_option("--seed", seed_, "Master seed");
        simulate->add_option("--stride", stride_, "Trajectory sample stride (0 = default)");
        simulate->add_option("--out", out_dir_, "Output directory");
        simulate->add_option("--threads", threads_, "Worker threads (default URNFLOW_THREADS)");
        simulate->add_flag("--no-trajectories", no_trajectories_, "Write only the ensemble summary");

        auto* ode = app.add_subcommand("ode", "Integrate the mean-field ODE");
        ode->add_option("graph", graph_path_, "Graph file")->required();
        ode->add_option("--x0", x0_text_, "Comma-separated starting point")->required();
        ode->add_option("--t", horizon_, "Integration time");
        ode->add_option("--dt", dt_, "RK4 step");

        auto* verify = app.add_subcommand("verify", "Run the invariant suite on a graph");
        verify->add_option("graph", graph_path_, "Graph file")->required();
        verify->add_option("--level", level_, "quick or full")
            ->check(CLI::IsMember({"quick", "full"}));
        verify->add_option("--seed", seed_, "Seed for sampling and simulation");

        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::CallForHelp&) {
            out_ << app.help();
            return exit_ok;
        } catch (const CLI::ParseError& e) {
            err_ << e.what() << "\n" << app.help();
            return exit_parse;
        }

        try {
            build_config();
            if (*classify) return cmd_classify();
            if (*equilibria) return cmd_equilibria(as_table->count() > 0);
            if (*limit) return cmd_limit();
            if (*simulate) return cmd_simulate(!no_trajectories_);
            if (*ode) return cmd_ode();
            if (*verify) return cmd_verify();
        } catch (const UniquenessViolation& e) {
            err_ << "error: " << e.what() << "\n";
            out_ << dump_json(Json{{"error", e.what()}, {"candidates", to_json(e.candidates())}});
            return exit_theory;
        } catch (const Error& e) {
            err_ << "error: " << e.what() << "\n";
            return exit_code_for(e.code());
        } catch (const std::filesystem::filesystem_error& e) {
            err_ << "error: " << e.what() << "\n";
            return exit_io;
        }
        return exit_parse;
    }

private:
    void build_config() {
        if (!config_path_.empty()) load_config(config_path_, cfg_);
        if (!graph_path_.empty()) cfg_.graph_path = graph_path_;
        if (cfg_.graph_path.empty()) throw Error(Errc::parse, "no graph file given");
        if (init_text_) cfg_.initial_counts = parse_counts(*init_text_);
        if (steps_) cfg_.steps = *steps_;
        if (runs_) cfg_.runs = *runs_;
        if (seed_) cfg_.seed = *seed_;
        if (stride_) cfg_.sample_stride = *stride_;
        if (out_dir_) cfg_.output_dir = *out_dir_;
        if (threads_) cfg_.threads = *threads_;
        for (const auto& item : tol_overrides_) {
            auto eq = item.find('=');
            if (eq == std::string::npos) throw Error(Errc::parse, "--tol expects name=value");
            double value = 0;
            try {
                value = std::stod(item.substr(eq + 1));
            } catch (const std::exception&) {
                throw Error(Errc::parse, "--tol value is not a number: " + item);
            }
            apply_tolerance(cfg_.tol, item.substr(0, eq), value);
        }
    }

    Graph graph() const { return load_graph(cfg_.graph_path); }

    int cmd_classify() {
        const Graph g = graph();
        out_ << dump_json(to_json(g, classify_graph(g)));
        return exit_ok;
    }

    static bool contradicts(const std::vector<Equilibrium>& eqs, const GraphClass& cls) {
        int non_unstable = 0;
        for (const auto& e : eqs) {
            if (!e.classification.consistent) return true;
            if (e.classification.stability == Stability::non_unstable) ++non_unstable;
        }
        return !cls.balanced_bipartite() && non_unstable != 1;
    }

    int cmd_equilibria(bool table) {
        const Graph g = graph();
        const GraphClass cls = classify_graph(g);
        const auto eqs = find_equilibria(g, cfg_.tol);
        if (table) {
            out_ << fmt::format("{:<18} {:<14} {:>10}  {}\n", "support", "class", "residual", "point");
            for (const auto& e : eqs) {
                std::string support, point;
                for (Vertex v : e.support) support += (support.empty() ? "" : ",") + std::to_string(v + 1);
                for (Eigen::Index i = 0; i < e.point.size(); ++i)
                    point += (i ? " " : "") + fmt::format("{:.6f}", e.point[i]);
                out_ << fmt::format("{:<18} {:<14} {:>10.3e}  ({}){}\n", "{" + support + "}",
                                    stability_name(e.classification.stability), e.residual, point,
                                    e.interval ? fmt::format("  interval eta in ({:.6f}, {:.6f})",
                                                             e.interval->eta_min, e.interval->eta_max)
                                               : "");
            }
        } else {
            out_ << dump_json(to_json(eqs));
        }
        if (contradicts(eqs, cls)) {
            err_ << "error: equilibria contradict the uniqueness or classification guarantees\n";
            return exit_theory;
        }
        return exit_ok;
    }

    int cmd_limit() {
        const Graph g = graph();
        out_ << dump_json(to_json(limit_object(g, cfg_.tol)));
        return exit_ok;
    }

    int cmd_simulate(bool trajectories) {
        const Graph g = graph();
        const GraphClass cls = classify_graph(g);
        auto init = cfg_.initial_counts.empty() ? unit_counts(g) : cfg_.initial_counts;
        const LimitResult limit = limit_object(g, cfg_.tol);

        EnsembleOptions eo;
        for (std::uint64_t c = 10; c < cfg_.steps; c *= 10) eo.checkpoints.push_back(c);
        eo.distance = [&](const Point& x) { return distance_to_limit(g, cls, limit, x); };
        if (limit.kind == LimitKind::omega_segment) {
            const auto& part_a = cls.bipartition->a;
            eo.omega_coordinate = [&part_a](const Point& x) {
                double sum = 0;
                for (Vertex i : part_a) sum += x[static_cast<Eigen::Index>(i)];
                return sum / static_cast<double>(part_a.size());
            };
            eo.omega_min = 0;
            eo.omega_max = limit.omega->p_plus_q;
        }
        eo.threads = cfg_.threads;
        eo.record_trajectories = trajectories;
        eo.sample_stride = cfg_.sample_stride;

        const auto summary = monte_carlo(g, init, cfg_.steps, cfg_.runs, cfg_.seed, eo);

        namespace fs = std::filesystem;
        fs::create_directories(cfg_.output_dir);
        Json doc = to_json(summary);
        doc["limit"] = to_json(limit);
        const std::string ensemble_path = (fs::path(cfg_.output_dir) / "ensemble.json").string();
        write_file(ensemble_path, dump_json(doc));
        if (trajectories) {
            for (std::size_t k = 0; k < summary.trajectories.size(); ++k)
                write_file((fs::path(cfg_.output_dir) / fmt::format("run_{:05d}.csv", k)).string(),
                           trajectory_csv(summary.trajectories[k]));
        }
        out_ << dump_json(Json{{"ensemble", ensemble_path},
                               {"runs", summary.runs},
                               {"trajectories", trajectories ? summary.trajectories.size() : 0},
                               {"stats", doc["stats"]}});
        return exit_ok;
    }

    int cmd_ode() {
        const Graph g = graph();
        const auto coords = parse_reals(x0_text_);
        if (coords.size() != g.vertex_count())
            throw Error(Errc::domain, fmt::format("x0 has {} coordinates, graph has {} vertices",
                                                  coords.size(), g.vertex_count()));
        const Point x0 = Eigen::Map<const Point>(coords.data(), static_cast<Eigen::Index>(coords.size()));
        for (const auto& e : g.edges())
            if (!(x0[static_cast<Eigen::Index>(e.u)] + x0[static_cast<Eigen::Index>(e.v)] > 0))
                throw Error(Errc::domain, "x0 gives an edge zero mass");
        const FlowResult res = flow(g, x0, horizon_, dt_, cfg_.tol);
        Json doc = to_json(res);
        doc["lyapunov_monotone"] = res.min_delta_lyapunov >= -cfg_.tol.lyapunov_monotone;
        out_ << dump_json(doc);
        return exit_ok;
    }

    int cmd_verify() {
        const Graph g = graph();
        VerifyOptions opt;
        opt.level = level_ == "full" ? VerifyLevel::full : VerifyLevel::quick;
        opt.seed = cfg_.seed;
        opt.tol = cfg_.tol;
        const VerifyReport report = run_verify(g, opt);
        out_ << dump_json(to_json(report));
        return report.pass() ? exit_ok : exit_verify_failed;
    }

    std::ostream& out_;
    std::ostream& err_;
    ExperimentConfig cfg_;

    std::string config_path_;
    std::vector<std::string> tol_overrides_;
    std::string graph_path_;
    std::optional<std::string> init_text_;
    std::optional<std::uint64_t> steps_, runs_, seed_, stride_;
    std::optional<std::string> out_dir_;
    std::optional<unsigned> threads_;
    bool no_trajectories_ = false;
    std::string x0_text_;
    double horizon_ = 50.0;
    double dt_ = 1e-2;
    std::string level_ = "quick";
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return Cli(out, err).main(args);
}

}  // namespace urnflow
