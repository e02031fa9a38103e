#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "corpus.hpp"
#include "urnflow/cli.hpp"
#include "urnflow/io.hpp"

using namespace urnflow;
using urnflow::testing::corpus_path;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("urnflow_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string str(const std::string& leaf = {}) const { return (path_ / leaf).string(); }

private:
    fs::path path_;
};

}  // namespace

TEST(Cli, ClassifyEmitsJson) {
    const Outcome r = cli({"classify", corpus_path("K33")});
    ASSERT_EQ(r.code, exit_ok) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["bipartite"], true);
    EXPECT_EQ(j["regular"], true);
    EXPECT_EQ(j["r"], 3);
    EXPECT_EQ(j["A"], Json::parse("[1,2,3]"));
}

TEST(Cli, EquilibriaJsonAndTable) {
    const Outcome j = cli({"equilibria", corpus_path("K1_3"), "--json"});
    ASSERT_EQ(j.code, exit_ok) << j.err;
    const Json doc = Json::parse(j.out);
    ASSERT_EQ(doc.size(), 2u);
    EXPECT_EQ(doc[1]["support"], Json::parse("[1]"));
    EXPECT_EQ(doc[1]["classification"], "non-unstable");
    const Outcome t = cli({"equilibria", corpus_path("K1_3"), "--table"});
    ASSERT_EQ(t.code, exit_ok);
    EXPECT_NE(t.out.find("non-unstable"), std::string::npos);
    EXPECT_NE(cli({"equilibria", corpus_path("K3"), "--json", "--table"}).code, exit_ok);
}

TEST(Cli, LimitKinds) {
    EXPECT_EQ(Json::parse(cli({"limit", corpus_path("K3")}).out)["kind"], "UniquePoint");
    EXPECT_EQ(Json::parse(cli({"limit", corpus_path("C6")}).out)["kind"], "OmegaSegment");
    EXPECT_EQ(Json::parse(cli({"limit", corpus_path("P4")}).out)["kind"], "FiniteSet");
}

TEST(Cli, ExitCodes) {
    TempDir tmp;
    write_file(tmp.str("bad.txt"), "1 2\n2 x\n");
    write_file(tmp.str("loop.txt"), "1 1\n1 2\n");
    EXPECT_EQ(cli({"classify", tmp.str("bad.txt")}).code, exit_parse);
    EXPECT_EQ(cli({"classify", tmp.str("loop.txt")}).code, exit_parse);
    EXPECT_EQ(cli({"classify", tmp.str("missing.txt")}).code, exit_io);
    EXPECT_EQ(cli({"nonsense"}).code, exit_parse);
    EXPECT_EQ(cli({}).code, exit_parse);
    EXPECT_EQ(cli({"ode", corpus_path("K3"), "--x0", "0.5,0.3,0.3"}).code, exit_domain);
    EXPECT_EQ(cli({"ode", corpus_path("K3"), "--x0", "0.5,0.5"}).code, exit_domain);
    EXPECT_EQ(cli({"simulate", corpus_path("K3"), "--init", "1,0,1", "--out", tmp.str("x")}).code,
              exit_parse);
    EXPECT_EQ(cli({"--tol", "no_such=1", "classify", corpus_path("K3")}).code, exit_parse);
    const Outcome broken = cli({"--tol", "class_eps=10", "limit", corpus_path("K3")});
    EXPECT_EQ(broken.code, exit_theory);
    EXPECT_EQ(Json::parse(broken.out)["candidates"].size(), 4u);
    EXPECT_EQ(cli({"--help"}).code, exit_ok);
}

TEST(Cli, OdeReportsAudit) {
    const Outcome r = cli({"ode", corpus_path("K3"), "--x0", "0.6,0.3,0.1", "--t", "10", "--dt", "0.01"});
    ASSERT_EQ(r.code, exit_ok) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["lyapunov_monotone"], true);
    EXPECT_EQ(j["steps"], 1000);
    EXPECT_GT(j["L_end"].get<double>(), j["L_start"].get<double>());
}

TEST(Cli, SimulateWritesReproducibleOutputs) {
    TempDir tmp;
    const Outcome a = cli({"simulate", corpus_path("C4"), "--runs", "6", "--steps", "2000", "--seed", "5",
                           "--out", tmp.str("a"), "--threads", "1"});
    const Outcome b = cli({"simulate", corpus_path("C4"), "--runs", "6", "--steps", "2000", "--seed", "5",
                           "--out", tmp.str("b"), "--threads", "3"});
    ASSERT_EQ(a.code, exit_ok) << a.err;
    ASSERT_EQ(b.code, exit_ok) << b.err;
    const std::string ja = read_file(tmp.str("a/ensemble.json"));
    EXPECT_EQ(ja, read_file(tmp.str("b/ensemble.json")));
    EXPECT_EQ(read_file(tmp.str("a/run_00003.csv")), read_file(tmp.str("b/run_00003.csv")));
    const Json doc = Json::parse(ja);
    EXPECT_EQ(doc["runs"], 6);
    EXPECT_EQ(doc["limit"]["kind"], "OmegaSegment");
    EXPECT_EQ(doc["omega"]["histogram"].size(), 20u);
    EXPECT_EQ(doc["checkpoints"], Json::parse("[10, 100, 1000, 2000]"));
    // Re-parsing and re-emitting must reproduce the bytes.
    EXPECT_EQ(dump_json(Json::parse(ja)), ja);
    const std::string csv = read_file(tmp.str("a/run_00000.csv"));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,tau,x_1,x_2,x_3,x_4");
}

TEST(Cli, ConfigFileAndOverrides) {
    TempDir tmp;
    Json cfg;
    cfg["graph"] = corpus_path("K1_2");
    cfg["runs"] = 3;
    cfg["steps"] = 500;
    cfg["seed"] = 11;
    cfg["output_dir"] = tmp.str("cfg");
    cfg["initial_counts"] = Json::parse("[2, 1, 1]");
    write_file(tmp.str("cfg.json"), cfg.dump());
    const Outcome r = cli({"--config", tmp.str("cfg.json"), "simulate", "--no-trajectories", "--runs", "4"});
    ASSERT_EQ(r.code, exit_ok) << r.err;
    const Json doc = Json::parse(read_file(tmp.str("cfg/ensemble.json")));
    EXPECT_EQ(doc["runs"], 4);
    EXPECT_EQ(doc["steps"], 500);
    EXPECT_EQ(doc["seed"], 11);
    EXPECT_FALSE(fs::exists(tmp.str("cfg/run_00000.csv")));
    write_file(tmp.str("broken.json"), "{\"steps\": ");
    EXPECT_EQ(cli({"--config", tmp.str("broken.json"), "simulate", corpus_path("K3")}).code, exit_parse);
}

TEST(Cli, VerifyExitStatus) {
    const Outcome r = cli({"verify", corpus_path("C5"), "--level", "quick"});
    EXPECT_EQ(r.code, exit_ok) << r.out;
    EXPECT_EQ(Json::parse(r.out)["overall"], "pass");
    // An impossible tolerance makes a check fail, which is exit status 1.
    EXPECT_EQ(cli({"--tol", "decomposition=1e-300", "verify", corpus_path("C5")}).code, exit_verify_failed);
}
