// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <fmt/core.h>

#include "scratch.hpp"
#include "wsn/error.hpp"
#include "wsn/text.hpp"
#include "wsn/workflow.hpp"

using namespace wsn;
using namespace wsn::workflow;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = WSN_FIXTURE_DIR;

Options fixture_options(const ScratchDir& dir, const std::string& out = "out")
{
    Options o;
    o.geometry = kFixtures / "launcher_geometry.txt";
    o.sensors = kFixtures / "launcher_sensors.csv";
    o.config = dir.write("config.json", R"({"sweep": {"restarts": 8, "n_rf_max": 8}})");
    o.out_dir = dir / out;
    return o;
}

std::vector<std::string> listing(const fs::path& dir)
{
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir))
        names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected wsn::Error");
    return ErrorCode::IoFailure;
}

int run_cli(const std::string& args)
{
    const std::string cmd = fmt::format("\"{}\" {} > /dev/null 2>&1", WSNPLAN_EXE, args);
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("run_segment splits the fixture into eight segments")
{
    ScratchDir dir("wf-seg");
    const auto segments = run_segment(fixture_options(dir));
    std::vector<std::string> ids;
    std::vector<std::size_t> sizes;
    for (const auto& [id, members] : segments) {
        ids.push_back(id);
        sizes.push_back(members.size());
    }
    CHECK(ids == std::vector<std::string>{"1a", "1b", "2a", "2b", "3a", "3b", "4", "5"});
    CHECK(sizes == std::vector<std::size_t>{9, 26, 15, 8, 15, 7, 35, 44});
    CHECK(fs::exists(dir / "out" / "segments.csv"));

    auto o = fixture_options(dir);
    o.segments = {"9z"};
    CHECK(code_of([&] { run_segment(o); }) == ErrorCode::UnknownStageLabel);
}

TEST_CASE("pipeline equals optimize, gains and budget run separately")
{
    ScratchDir dir("wf-compose");
    auto whole = fixture_options(dir, "whole");
    const auto report = run_pipeline(whole);
    CHECK(report.segments.size() == 8);
    REQUIRE(report.total_dbm.has_value());
    CHECK(exit_status(report) == Exit::Success);

    auto staged = fixture_options(dir, "staged");
    run_optimize(staged);
    run_gains(staged);
    run_budget(staged);

    const auto names = listing(whole.out_dir);
    CHECK(names == listing(staged.out_dir));
    for (const auto& name : names)
        CHECK_MESSAGE(text::read_file(whole.out_dir / name) == text::read_file(staged.out_dir / name), name);
    for (const char* name : {"topology.json", "gains.json", "report.json", "summary.csv", "budget.csv",
                             "sweep_5.csv", "gains_5.csv", "cem_5.json", "hubs_5.csv", "kits_5.csv"})
        CHECK_MESSAGE(std::count(names.begin(), names.end(), name) == 1, name);
}

TEST_CASE("stages refuse to run without their inputs")
{
    ScratchDir dir("wf-missing");
    auto o = fixture_options(dir);
    CHECK(code_of([&] { run_budget(o); }) == ErrorCode::MissingUpstreamArtifact);
    CHECK(code_of([&] { run_gains(o); }) == ErrorCode::MissingUpstreamArtifact);
    o.segments = {"5"};
    run_optimize(o);
    CHECK(code_of([&] { run_budget(o); }) == ErrorCode::MissingUpstreamArtifact);
    o.model = propagation::Model::Imported;
    CHECK(code_of([&] { run_gains(o); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("same seed, same artifacts; the seed flag changes them")
{
    ScratchDir dir("wf-seed");
    auto a = fixture_options(dir, "a");
    auto b = fixture_options(dir, "b");
    auto c = fixture_options(dir, "c");
    a.segments = b.segments = c.segments = {"3a", "5"};
    a.seed = b.seed = 42;
    c.seed = 43;
    b.jobs = 3;
    run_optimize(a);
    run_optimize(b);
    run_optimize(c);
    CHECK(text::read_file(a.out_dir / "topology.json") == text::read_file(b.out_dir / "topology.json"));
    CHECK(text::read_file(a.out_dir / "topology.json") != text::read_file(c.out_dir / "topology.json"));
}

TEST_CASE("segment seeds do not depend on which segments run")
{
    CHECK(segment_seed(1, "5") == segment_seed(1, "5"));
    CHECK(segment_seed(1, "5") != segment_seed(1, "4"));
    CHECK(segment_seed(1, "5") != segment_seed(2, "5"));

    ScratchDir dir("wf-filter");
    auto all = fixture_options(dir, "all");
    auto one = fixture_options(dir, "one");
    one.segments = {"2b"};
    run_optimize(all);
    run_optimize(one);
    CHECK(text::read_file(all.out_dir / "sweep_2b.csv") == text::read_file(one.out_dir / "sweep_2b.csv"));
}

TEST_CASE("imported gains replace the computed ones")
{
    ScratchDir dir("wf-import");
    auto o = fixture_options(dir);
    o.segments = {"5"};
    const auto computed = run_pipeline(o);

    fs::create_directories(dir / "solver");
    fs::copy_file(o.out_dir / "gains_5.csv", dir / "solver" / "gains_5.csv");
    o.model = propagation::Model::Imported;
    o.import_gains = dir / "solver";
    run_gains(o);
    const auto imported = run_budget(o);
    REQUIRE(imported.total_dbm.has_value());
    CHECK(*imported.total_dbm == doctest::Approx(*computed.total_dbm).epsilon(1e-9));
    CHECK(imported.segments[0].gains_provenance == "import:gains_5.csv");
}

TEST_CASE("command line exit codes")
{
    ScratchDir dir("wf-cli");
    const auto cfg = dir.write("config.json", R"({"sweep": {"restarts": 8, "n_rf_max": 8}})");
    const std::string common = fmt::format("--geometry \"{}\" --config \"{}\"",
                                           (kFixtures / "launcher_geometry.txt").string(), cfg.string());
    const std::string sensors = fmt::format("--sensors \"{}\"", (kFixtures / "launcher_sensors.csv").string());
    const auto out = dir / "out";

    CHECK(run_cli(fmt::format("pipeline {} {} --segment 5 --out \"{}\"", common, sensors, out.string())) == 0);
    CHECK(run_cli(fmt::format("pipeline {} --sensors \"{}\" --out \"{}\"", common, (dir / "none.csv").string(),
                              out.string())) == 1);
    CHECK(run_cli(fmt::format("budget --out \"{}\"", (dir / "empty").string())) == 1);
    CHECK(run_cli("pipeline --bogus") == 1);

    // Links at -130 dB need 21 dBm, above the 17 dBm limit.
    const auto rows = text::read_csv(out / "gains_5.csv");
    REQUIRE(rows.size() >= 3);
    std::string weak;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto row = rows[i];
        for (std::size_t j = 1; i > 0 && j < row.size(); ++j)
            if (j != i)
                row[j] = "-130";
        for (std::size_t j = 0; j < row.size(); ++j)
            weak += (j ? "," : "") + row[j];
        weak += "\n";
    }
    fs::create_directories(dir / "solver");
    text::write_file(dir / "solver" / "gains_5.csv", weak);
    CHECK(run_cli(fmt::format("gains {} --model import --import-gains \"{}\" --out \"{}\"", common,
                              (dir / "solver").string(), out.string())) == 0);
    CHECK(run_cli(fmt::format("budget --out \"{}\"", out.string())) == 2);
    CHECK(text::read_file(out / "summary.csv").find(",no\n") != std::string::npos);
}
