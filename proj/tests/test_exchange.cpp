// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <map>

#include "scratch.hpp"
#include "wsn/error.hpp"
#include "wsn/exchange.hpp"
#include "wsn/text.hpp"
#include "wsn/units.hpp"

using namespace wsn;
using namespace wsn::exchange;

namespace {

const std::filesystem::path kFixtures = WSN_FIXTURE_DIR;

template <class F>
Error caught(F&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected wsn::Error");
    return Error(ErrorCode::IoFailure, "");
}

// Two kits on one HUB plus a lone kit on a dropped HUB.
SegmentReport sample_segment()
{
    SegmentReport s;
    auto& t = s.topology;
    t.segment_id = "5";
    t.sensor_ids = {"a", "b", "c"};
    t.sensor_positions = {{28.0, 0.4, 0.0}, {28.0, -0.4, 0.0}, {30.5, 0.0, 0.4}};
    t.kit_positions = {{28.0, 0.4, 0.0}, {28.0, -0.4, 0.0}, {30.5, 0.0, 0.4}};
    t.sensor_to_kit = {0, 1, 2};
    t.hub_positions = {{28.0, 0.0, 0.0}, {30.5, 0.0, 0.4}};
    t.hub_dropped = {false, true};
    t.kit_to_hub = {0, 0, std::nullopt};
    t.n_rf = 3;
    t.n_hub = 2;
    t.total_mass = 5.720;
    s.sweep_log = {{2, 1, 4.5, 0}, {3, 1, 5.7, 0}, {3, 2, 5.72, 1}};

    power::PowerBudget b;
    b.segment_id = "5";
    b.entries = {{"kit-0", power::Role::Kit, units::dbm_to_watts(6.675521), {"hub-0"}, "hub-0"},
                 {"kit-1", power::Role::Kit, units::dbm_to_watts(-1.66156), {"hub-0"}, "hub-0"},
                 {"hub-0", power::Role::Hub, units::dbm_to_watts(6.675521), {"kit-0", "kit-1"}, "kit-0"}};
    for (const auto& e : b.entries)
        b.total += e.required_tx_power;
    s.diagnostics = power::check_feasibility(b, power::RfDeviceSpec{});
    s.budget = b;
    s.gains_provenance = "friis";
    return s;
}

} // namespace

TEST_CASE("load_sensors")
{
    ScratchDir dir("sensors");
    SUBCASE("columns in any order, millimetres to metres")
    {
        const auto p = dir.write("s.csv", "stage,id,z_mm,y_mm,x_mm\n1,A,3,2,1000\n\n# note\n2,B,-5,0,2500.5\n");
        const auto s = load_sensors(p);
        REQUIRE(s.size() == 2);
        CHECK(s[0].id == "A");
        CHECK(s[0].stage == "1");
        CHECK(s[0].position.x == doctest::Approx(1.0));
        CHECK(s[0].position.y == doctest::Approx(0.002));
        CHECK(s[0].position.z == doctest::Approx(0.003));
        CHECK(s[1].position.x == doctest::Approx(2.5005));
    }
    SUBCASE("duplicate id")
    {
        const auto p = dir.write("s.csv", "id,x_mm,y_mm,z_mm,stage\nA,0,0,0,1\nA,1,0,0,1\n");
        CHECK(caught([&] { load_sensors(p); }).code() == ErrorCode::DuplicateId);
    }
    SUBCASE("missing column")
    {
        const auto p = dir.write("s.csv", "id,x_mm,y_mm,stage\nA,0,0,1\n");
        const auto e = caught([&] { load_sensors(p); });
        CHECK(e.code() == ErrorCode::MissingColumn);
        CHECK(e.field() == "z_mm");
    }
    SUBCASE("non-numeric coordinate")
    {
        const auto p = dir.write("s.csv", "id,x_mm,y_mm,z_mm,stage\nA,0,abc,0,1\n");
        const auto e = caught([&] { load_sensors(p); });
        CHECK(e.code() == ErrorCode::NonNumericCoordinate);
        CHECK(e.value() == "abc");
    }
    SUBCASE("missing file")
    {
        CHECK(caught([&] { load_sensors(dir / "nope.csv"); }).code() == ErrorCode::FileNotFound);
    }
}

TEST_CASE("the launcher fixture has 159 sensors on five stages")
{
    const auto s = load_sensors(kFixtures / "launcher_sensors.csv");
    CHECK(s.size() == 159);
    std::map<std::string, int> per_stage;
    for (const auto& x : s)
        ++per_stage[x.stage];
    CHECK(per_stage == std::map<std::string, int>{{"1", 35}, {"2", 23}, {"3", 22}, {"4", 35}, {"5", 44}});
}

TEST_CASE("sensor files round trip to the micrometre")
{
    ScratchDir dir("sensors-rt");
    const auto s = load_sensors(kFixtures / "launcher_sensors.csv");
    write_sensors(s, dir / "copy.csv");
    const auto back = load_sensors(dir / "copy.csv");
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(back[i].id == s[i].id);
        CHECK(back[i].stage == s[i].stage);
        CHECK(distance(back[i].position, s[i].position) < 1e-9);
    }
}

TEST_CASE("parse_config")
{
    SUBCASE("empty text and empty object give the defaults")
    {
        for (const char* text : {"", "{}", "  \n"}) {
            const auto c = parse_config(text);
            CHECK(c.weights.kit_mass == 1.280);
            CHECK(c.weights.hub_mass == 1.880);
            CHECK(c.weights.cable_mass_per_meter == 0.014);
            CHECK(c.rf.sensitivity_dbm == -109.0);
            CHECK(c.frequency.center == 850e6);
            CHECK(c.friis.gamma == 2.0);
            CHECK_FALSE(c.friis.l0.has_value());
            CHECK(c.sweep.restarts == 1000);
            CHECK(c.sweep.n_hub_max == 3);
            CHECK(c.model == propagation::Model::Friis);
        }
    }
    SUBCASE("centre frequency outside the band")
    {
        const auto e = caught([] { parse_config(R"({"frequency": {"center_mhz": 1000}})"); });
        CHECK(e.code() == ErrorCode::InvariantViolation);
        CHECK(e.field() == "frequency.center_mhz");
    }
    SUBCASE("zero kit mass")
    {
        const auto e = caught([] { parse_config(R"({"weights": {"kit_mass_kg": 0}})"); });
        CHECK(e.code() == ErrorCode::InvariantViolation);
        CHECK(e.field() == "weights.kit_mass_kg");
    }
    SUBCASE("unknown key")
    {
        const auto e = caught([] { parse_config(R"({"weights": {"kit_mass": 1.0}})"); });
        CHECK(e.code() == ErrorCode::SchemaViolation);
        CHECK(e.field() == "weights.kit_mass");
    }
    SUBCASE("wrong type")
    {
        CHECK(caught([] { parse_config(R"({"sweep": {"restarts": "many"}})"); }).code() ==
              ErrorCode::SchemaViolation);
        CHECK(caught([] { parse_config("[1, 2]"); }).code() == ErrorCode::SchemaViolation);
        CHECK(caught([] { parse_config("{"); }).code() == ErrorCode::SchemaViolation);
    }
    SUBCASE("values are taken over")
    {
        const auto c = parse_config(R"({"friis": {"l0_db": 40, "gamma": 2.5},
            "multipath": {"reflection_coefficient": [-0.5, 0.25]},
            "sweep": {"n_rf_max": 6, "seed": 7}, "model": "image", "median": "coordinate",
            "peer_scope": "segment", "backbone_points_mm": {"4": [25000, 0, 0]}})");
        CHECK(*c.friis.l0 == doctest::Approx(1e4));
        CHECK(c.friis.gamma == 2.5);
        CHECK(c.multipath.wall_reflection_coefficient == std::complex<double>(-0.5, 0.25));
        CHECK(*c.sweep.n_rf_max == 6);
        CHECK(c.sweep.seed == 7);
        CHECK(c.model == propagation::Model::ImageSource);
        CHECK(c.median == clustering::MedianKind::Coordinate);
        CHECK(c.peer_scope == power::PeerScope::Segment);
        CHECK(c.backbone_points.at("4").x == doctest::Approx(25.0));
    }
}

TEST_CASE("config_to_json is accepted back unchanged")
{
    const auto c = parse_config(R"({"friis": {"l0_db": 40}, "multipath": {"max_reflection_order": 3},
        "sweep": {"n_rf_min": 3, "restarts": 17}, "backbone_points_mm": {"2": [12000, 100, 0]}})");
    const auto dumped = config_to_json(c).dump();
    CHECK(config_to_json(parse_config(dumped)).dump() == dumped);
    CHECK(config_to_json(parse_config("")).dump() == config_to_json(DesignConfig{}).dump());
}

TEST_CASE("load_config from disk")
{
    ScratchDir dir("config");
    CHECK(caught([&] { load_config(dir / "absent.json"); }).code() == ErrorCode::FileNotFound);
    const auto p = dir.write("c.json", R"({"sweep": {"restarts": 5}})");
    CHECK(load_config(p).sweep.restarts == 5);
}

TEST_CASE("load_geometry")
{
    const auto g = load_geometry(kFixtures / "launcher_geometry.txt");
    CHECK(g.profile.control_points().size() == 5);
    REQUIRE(g.profile.cap().has_value());
    CHECK(g.profile.x_end() == doctest::Approx(32.5));
    REQUIRE(g.stages.size() == 5);
    CHECK(g.stages[0].label == "1");
    CHECK(g.stages[0].split);
    CHECK_FALSE(g.stages[4].split);
    CHECK(g.stages[1].x_lo == doctest::Approx(10.0));

    ScratchDir dir("geometry");
    const auto bad = dir.write("g.txt", "point,0,1000\npoint,1000,900\nwall,1,2\n");
    CHECK(caught([&] { load_geometry(bad); }).code() == ErrorCode::SchemaViolation);
    const auto back = dir.write("g.txt", "point,1000,1000\npoint,0,900\n");
    CHECK(caught([&] { load_geometry(back); }).code() == ErrorCode::NonMonotonicAxis);
}

TEST_CASE("report tables")
{
    RunReport r;
    r.segments.push_back(sample_segment());
    r.total_dbm = 9.993141;

    const auto hubs = hub_table_csv(r.segments[0]);
    CHECK(hubs == "Id,X_mm,Y_mm,Z_mm,Power_dBm\n0,28000.000,0.000,0.000,6.675521\n");

    const auto kit_rows = kit_table_csv(r.segments[0]);
    const auto kits = text::split_csv_line(kit_rows.substr(0, kit_rows.find('\n')));
    CHECK(kits == std::vector<std::string>{"Id", "X_mm", "Y_mm", "Z_mm", "Power_dBm", "Hub"});
    CHECK(kit_rows.find("1,28000.000,-400.000,0.000,-1.661560,0\n") != std::string::npos);
    CHECK(kit_rows.find("2,30500.000,0.000,400.000,,wired\n") != std::string::npos);

    const auto summary = summary_csv(r);
    CHECK(summary.find("5,3,3,2,1,1,5.720,") != std::string::npos);
    CHECK(summary.find("total,,,,,,,,9.993141,yes\n") != std::string::npos);
}

TEST_CASE("write_report")
{
    SUBCASE("no segments: summary and report only")
    {
        ScratchDir dir("report-empty");
        write_report(RunReport{}, dir.path());
        std::vector<std::string> names;
        for (const auto& e : std::filesystem::directory_iterator(dir.path()))
            names.push_back(e.path().filename().string());
        std::sort(names.begin(), names.end());
        CHECK(names == std::vector<std::string>{"report.json", "summary.csv"});
    }
    SUBCASE("writing twice gives identical bytes")
    {
        ScratchDir a("report-a"), b("report-b");
        RunReport r;
        r.segments.push_back(sample_segment());
        r.total_dbm = 9.993141;
        write_report(r, a.path());
        write_report(r, b.path());
        for (const char* name : {"hubs_5.csv", "kits_5.csv", "budget.csv", "summary.csv", "report.json"})
            CHECK(text::read_file(a / name) == text::read_file(b / name));
        CHECK(text::read_file(a / "budget.csv").find("TOTAL,,,,,,9.993141,,,,yes\n") != std::string::npos);
    }
}

TEST_CASE("topology artifact round trip")
{
    ScratchDir dir("artifact");
    RunReport r;
    r.seed = 99;
    r.config = parse_config(R"({"sweep": {"restarts": 3}})");
    auto s = sample_segment();
    s.topology.backbone = Vec3{31.0, 0.1, 0.0};
    s.clustering_runs = 5;
    s.closed_form_runs = 6;
    r.segments.push_back(s);
    write_topology_artifact(r, dir / "topology.json");
    const auto back = read_topology_artifact(dir / "topology.json");
    CHECK(back.seed == 99);
    CHECK(back.config.sweep.restarts == 3);
    REQUIRE(back.segments.size() == 1);
    const auto& t = back.segments[0].topology;
    CHECK(t.kit_positions == s.topology.kit_positions);
    CHECK(t.hub_positions == s.topology.hub_positions);
    CHECK(t.kit_to_hub == s.topology.kit_to_hub);
    CHECK(t.hub_dropped == s.topology.hub_dropped);
    CHECK(t.total_mass == s.topology.total_mass);
    CHECK(*t.backbone == *s.topology.backbone);
    CHECK(back.segments[0].sweep_log.size() == 3);
    CHECK(back.segments[0].clustering_runs == 5);

    write_topology_artifact(back, dir / "again.json");
    CHECK(text::read_file(dir / "again.json") == text::read_file(dir / "topology.json"));
    CHECK(caught([&] { read_topology_artifact(dir / "missing.json"); }).code() ==
          ErrorCode::MissingUpstreamArtifact);
}
