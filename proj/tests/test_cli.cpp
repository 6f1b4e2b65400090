#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "battery.hpp"
#include "cli_helpers.hpp"
#include "dincl/io/formats.hpp"
#include "dincl/io/number_format.hpp"

using namespace dincl;
using clitest::run;

TEST_CASE("simulate: relay ends within 2h of the surface")
{
    const auto out = clitest::scratch("sim_relay");
    const auto r = run({"--config", battery::path("relay"), "--out", out.string(), "simulate", "--x0", "1",
                        "--horizon", "2", "--svg"});
    REQUIRE(r.code == 0);
    const Trajectory tr = io::parse_trajectory_csv(clitest::slurp(out / "trajectory.csv"));
    const io::TrajectoryMeta meta = io::parse_meta(clitest::slurp(out / "trajectory.meta"));
    CHECK(std::abs(tr.final_state()[0]) <= 2.0 * meta.h);
    CHECK(meta.strategy == "sliding");
    CHECK(std::filesystem::exists(out / "trajectory.svg"));
    const auto manifest = nlohmann::json::parse(clitest::slurp(out / "manifest.json"));
    CHECK(manifest["command"] == "simulate");
    CHECK(manifest["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
    CHECK(manifest["outputs"].size() == 4);
    CHECK(manifest["wall_time_seconds"].is_number());
}

TEST_CASE("simulate: constant field writes an exact linear table")
{
    const auto out = clitest::scratch("sim_const");
    REQUIRE(run({"--config", battery::path("constant"), "--out", out.string(), "simulate", "--x0", "-1",
                 "--horizon", "1", "--k", "8"})
                .code == 0);
    const io::CsvTable t = io::parse_csv(clitest::slurp(out / "trajectory.csv"));
    REQUIRE(t.rows.size() == 9);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double time = io::parse_double(t.rows[i][0], "t");
        CHECK(time == static_cast<double>(i) / 8.0);
        CHECK(io::parse_double(t.rows[i][1], "x") == -1.0 + time);
    }
}

TEST_CASE("configuration and input errors exit with 2")
{
    const auto dir = clitest::scratch("bad_cfg");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "bad.json") << R"({"dimension": 1, "domain": {"lo": [-1], "hi": [1]},
        "regions": [{"id": 0, "field": ["sin(x1"]}]})";
    const auto r = run({"--config", (dir / "bad.json").string(), "--out", (dir / "o").string(), "simulate", "--x0",
                        "0", "--horizon", "1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("regions[0].field[0]") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir / "o"));

    CHECK(run({"--config", battery::path("relay"), "--out", (dir / "o").string(), "simulate", "--x0", "7",
               "--horizon", "1"})
              .code == 2);
    CHECK(run({"--config", battery::path("relay"), "simulate", "--x0", "0"}).code == 2);
    CHECK(run({"--config", battery::path("relay"), "frobnicate"}).code == 2);
    CHECK(run({"--out", (dir / "o").string(), "simulate", "--x0", "0", "--horizon", "1"}).code == 2);
    CHECK(run({"--config", battery::path("relay"), "--out", (dir / "o").string(), "reach", "--times", "0,0.5",
               "--defect", "0.5:0.5"})
              .code == 2);
}

TEST_CASE("check: usc probe at the relay switching point, and points outside the domain")
{
    const auto dir = clitest::scratch("check");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "pts.csv") << "x1\n0\n0.5\n";
    const auto r = run({"--config", battery::path("relay"), "--out", (dir / "o").string(), "check", "--points",
                        (dir / "pts.csv").string()});
    REQUIRE(r.code == 0);
    const io::CsvTable t = io::parse_csv(clitest::slurp(dir / "o" / "check.csv"));
    REQUIRE(t.rows.size() == 2);
    CHECK(t.header[3] == "usc_delta_eps0.1");
    CHECK(io::parse_double(t.rows[0][3], "delta") > 0.0);
    CHECK(io::parse_double(t.rows[1][3], "delta") == 0.1);
    CHECK(t.rows[0][1] == "1");
    CHECK(t.rows[0][2] == "1");

    std::ofstream(dir / "far.csv") << "x1\n3\n";
    CHECK(run({"--config", battery::path("relay"), "--out", (dir / "o2").string(), "check", "--points",
               (dir / "far.csv").string()})
              .code == 2);
}

TEST_CASE("funnel: bang-bang endpoints span the reachable interval")
{
    const auto out = clitest::scratch("funnel_bb");
    REQUIRE(run({"--config", battery::path("bangbang"), "--out", out.string(), "funnel", "--x0", "0", "--horizon",
                 "1", "--runs", "64", "--k", "100"})
                .code == 0);
    const io::CsvTable t = io::parse_csv(clitest::slurp(out / "funnel_endpoints.csv"));
    REQUIRE(t.rows.size() == 64);
    double lo = 1e9;
    double hi = -1e9;
    for (const auto& row : t.rows) {
        const double x = io::parse_double(row[3], "x");
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    CHECK(lo == doctest::Approx(-1.0));
    CHECK(hi == doctest::Approx(1.0));
    CHECK(std::filesystem::exists(out / "funnel.svg"));
}

TEST_CASE("funnel: a single-valued field gives identical runs")
{
    const auto out = clitest::scratch("funnel_decay");
    REQUIRE(run({"--config", battery::path("decay"), "--out", out.string(), "funnel", "--x0", "0.7", "--horizon",
                 "1", "--runs", "10", "--k", "50"})
                .code == 0);
    const io::CsvTable t = io::parse_csv(clitest::slurp(out / "funnel_endpoints.csv"));
    for (const auto& row : t.rows) {
        CHECK(row[3] == t.rows.front()[3]);
    }
}

TEST_CASE("funnel: relay runs agree until the surface and then stay near it")
{
    const auto out = clitest::scratch("funnel_relay");
    REQUIRE(run({"--config", battery::path("relay"), "--out", out.string(), "funnel", "--x0", "1", "--horizon", "2",
                 "--runs", "16", "--k", "200"})
                .code == 0);
    const io::CsvTable t = io::parse_csv(clitest::slurp(out / "funnel.csv"));
    const double h = 0.01;
    for (const auto& row : t.rows) {
        const double time = io::parse_double(row[2], "t");
        const double x = io::parse_double(row[3], "x");
        if (time <= 1.0 - h) {
            CHECK(x == doctest::Approx(1.0 - time).epsilon(1e-12));
        } else {
            CHECK(std::abs(x) <= 2.0 * h + 1e-12);
        }
    }
}

TEST_CASE("reach: identity file at t = 0, defect table, under-sampling")
{
    const auto out = clitest::scratch("reach");
    REQUIRE(run({"--config", battery::path("relay"), "--out", out.string(), "reach", "--times", "0,0.5,1",
                 "--defect", "0.5:0.5"})
                .code == 0);
    const io::RelationFile zero = io::parse_relation(clitest::slurp(out / "relation_l0_t0.txt"));
    CHECK(zero.relation == identity_relation(zero.relation.grid()));
    const io::CsvTable d = io::parse_csv(clitest::slurp(out / "defects.csv"));
    REQUIRE(d.rows.size() == 1);
    CHECK(io::parse_double(d.rows[0][3], "fwd") <= io::parse_double(d.rows[0][8], "bound"));

    // One vertex selection per node only sees one extreme of the bang-bang hull.
    const auto thin = clitest::scratch("reach_thin");
    REQUIRE(run({"--config", battery::path("bangbang"), "--out", thin.string(), "reach", "--times", "0,0.5,1",
                 "--budget", "1", "--strategies", "vertex:0", "--defect", "0.5:0.5"})
                .code == 0);
    const io::RelationFile half = io::parse_relation(clitest::slurp(thin / "relation_l0_t0.5.txt"));
    CHECK(half.relation.image(20) == std::vector<CellIndex>{10});
    const auto rich = clitest::scratch("reach_rich");
    REQUIRE(run({"--config", battery::path("bangbang"), "--out", rich.string(), "reach", "--times", "0,0.5,1",
                 "--defect", "0.5:0.5"})
                .code == 0);
    const io::RelationFile full = io::parse_relation(clitest::slurp(rich / "relation_l0_t0.5.txt"));
    CHECK(relation_distance(half.relation, full.relation) >= 0.5);
}

TEST_CASE("outputs are byte-identical across runs and thread counts")
{
    struct Case {
        const char* config;
        std::vector<std::string> args;
    };
    const std::vector<Case> cases{
        {"sliding2d", {"simulate", "--x0", "-0.5,0.6", "--horizon", "1", "--svg", "--strategy", "random:3"}},
        {"crossed", {"funnel", "--x0", "0.7,-0.2", "--horizon", "1", "--runs", "12", "--k", "60"}},
        {"relay", {"reach", "--times", "0,0.5,1", "--defect", "0.5:0.5", "--levels", "2", "--budget", "5"}},
    };
    for (const Case& c : cases) {
        std::map<std::string, std::string> first;
        for (const char* threads : {"1", "4", "1"}) {
            const auto out = clitest::scratch(std::string("repro_") + c.config + threads);
            std::vector<std::string> args{"--config", battery::path(c.config), "--out", out.string(),
                                          "--deterministic", "--seed", "11", "--threads", threads};
            args.insert(args.end(), c.args.begin(), c.args.end());
            REQUIRE(run(args).code == 0);
            const auto files = clitest::outputs(out);
            if (first.empty()) {
                first = files;
            } else {
                CHECK(files == first);
            }
            CHECK(nlohmann::json::parse(clitest::slurp(out / "manifest.json"))["wall_time_seconds"].is_null());
        }
    }
}
