// SPDX-License-Identifier: Apache-2.0

#include "wsn/exchange.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <fmt/core.h>

#include "wsn/error.hpp"
#include "wsn/text.hpp"
#include "wsn/units.hpp"

namespace wsn::exchange {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kTopologyFormat = "wsn-topology/1";

std::string mm(double meters) { return fmt::format("{:.3f}", units::m_to_mm(meters)); }
std::string dbm(double watts) { return fmt::format("{:.6f}", units::watts_to_dbm(watts)); }

double parse_mm(const std::string& cell, const std::string& field)
{
    const auto v = text::parse_double(cell);
    if (!v || !std::isfinite(*v))
        throw Error(ErrorCode::NonNumericCoordinate, "coordinate is not a number", field, cell);
    return units::mm_to_m(*v);
}

} // namespace

bool RunReport::feasible() const
{
    for (const auto& s : segments)
        for (const auto& d : s.diagnostics)
            if (!d.feasible)
                return false;
    return true;
}

std::vector<topology::Sensor> load_sensors(const std::filesystem::path& path)
{
    const auto rows = text::read_csv(path);
    if (rows.empty())
        throw Error(ErrorCode::MissingColumn, "sensor file has no header", "id", path.string());

    const auto& header = rows.front();
    auto column = [&](const char* name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw Error(ErrorCode::MissingColumn, "sensor file lacks a required column", name, path.string());
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_id = column("id");
    const std::size_t c_x = column("x_mm");
    const std::size_t c_y = column("y_mm");
    const std::size_t c_z = column("z_mm");
    const std::size_t c_stage = column("stage");

    std::vector<topology::Sensor> sensors;
    std::set<std::string> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string where = fmt::format("{}:{}", path.filename().string(), r + 1);
        if (row.size() != header.size())
            throw Error(ErrorCode::MissingColumn, "row length differs from header", where,
                        std::to_string(row.size()));
        topology::Sensor s;
        s.id = row[c_id];
        if (s.id.empty())
            throw Error(ErrorCode::MissingColumn, "empty sensor id", where + ".id");
        if (!seen.insert(s.id).second)
            throw Error(ErrorCode::DuplicateId, "sensor id appears twice", where + ".id", s.id);
        s.position = {parse_mm(row[c_x], where + ".x_mm"), parse_mm(row[c_y], where + ".y_mm"),
                      parse_mm(row[c_z], where + ".z_mm")};
        s.stage = row[c_stage];
        sensors.push_back(std::move(s));
    }
    return sensors;
}

void write_sensors(const std::vector<topology::Sensor>& sensors, const std::filesystem::path& path)
{
    std::string out = "id,x_mm,y_mm,z_mm,stage\n";
    for (const auto& s : sensors)
        out += fmt::format("{},{:.6f},{:.6f},{:.6f},{}\n", s.id, units::m_to_mm(s.position.x),
                           units::m_to_mm(s.position.y), units::m_to_mm(s.position.z), s.stage);
    text::write_file(path, out);
}

GeometryInput load_geometry(const std::filesystem::path& path)
{
    const auto rows = text::read_csv(path);
    std::vector<geometry::ControlPoint> points;
    std::optional<geometry::Cap> cap;
    std::vector<geometry::StageDefinition> stages;
    std::set<std::string> labels;

    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string where = fmt::format("{}:{}", path.filename().string(), r + 1);
        auto number = [&](std::size_t i) {
            const auto v = text::parse_double(row[i]);
            if (!v)
                throw Error(ErrorCode::SchemaViolation, "expected a number", where, row[i]);
            return *v;
        };
        const std::string& kind = row.front();
        if (kind == "point" && row.size() == 3) {
            points.push_back({units::mm_to_m(number(1)), units::mm_to_m(number(2))});
        } else if (kind == "cap" && row.size() == 3) {
            if (cap)
                throw Error(ErrorCode::SchemaViolation, "more than one cap record", where);
            cap = geometry::Cap{units::mm_to_m(number(1)), units::mm_to_m(number(2))};
        } else if (kind == "stage" && row.size() == 5) {
            geometry::StageDefinition s;
            s.label = row[1];
            s.x_lo = units::mm_to_m(number(2));
            s.x_hi = units::mm_to_m(number(3));
            if (row[4] == "1" || row[4] == "yes" || row[4] == "true")
                s.split = true;
            else if (row[4] == "0" || row[4] == "no" || row[4] == "false")
                s.split = false;
            else
                throw Error(ErrorCode::SchemaViolation, "split flag must be 0 or 1", where, row[4]);
            if (!(s.x_lo < s.x_hi))
                throw Error(ErrorCode::InvariantViolation, "stage interval is empty", where, s.label);
            if (!labels.insert(s.label).second)
                throw Error(ErrorCode::DuplicateId, "stage declared twice", where, s.label);
            stages.push_back(std::move(s));
        } else {
            throw Error(ErrorCode::SchemaViolation, "unrecognised geometry record", where, kind);
        }
    }

    return {geometry::build_profile(std::move(points), cap), std::move(stages)};
}

void write_sweep_log(const SegmentReport& segment, const std::filesystem::path& path)
{
    std::string out = "segment,n_rf,n_hub,mass_kg,dropped_hubs\n";
    for (const auto& c : segment.sweep_log)
        out += fmt::format("{},{},{},{:.3f},{}\n", segment.topology.segment_id, c.n_rf, c.n_hub, c.mass,
                           c.dropped_hubs);
    text::write_file(path, out);
}

namespace {

ordered_json point_json(const Vec3& p) { return ordered_json::array({p.x, p.y, p.z}); }

Vec3 point_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

} // namespace

void write_topology_artifact(const RunReport& report, const std::filesystem::path& path)
{
    ordered_json doc;
    doc["format"] = kTopologyFormat;
    doc["units"] = "m";
    doc["seed"] = report.seed;
    ordered_json segments = ordered_json::array();
    for (const auto& s : report.segments) {
        const auto& t = s.topology;
        ordered_json seg;
        seg["segment"] = t.segment_id;
        seg["n_rf"] = t.n_rf;
        seg["n_hub"] = t.n_hub;
        seg["mass_kg"] = t.total_mass;
        seg["clustering_runs"] = s.clustering_runs;
        seg["closed_form_runs"] = s.closed_form_runs;
        seg["backbone"] = t.backbone ? point_json(*t.backbone) : ordered_json(nullptr);
        ordered_json sensors = ordered_json::array();
        for (std::size_t i = 0; i < t.sensor_ids.size(); ++i)
            sensors.push_back({{"id", t.sensor_ids[i]}, {"position", point_json(t.sensor_positions[i])},
                               {"kit", t.sensor_to_kit[i]}});
        seg["sensors"] = sensors;
        ordered_json kits = ordered_json::array();
        for (std::size_t k = 0; k < t.kit_positions.size(); ++k)
            kits.push_back({{"position", point_json(t.kit_positions[k])},
                            {"hub", t.kit_to_hub[k] ? ordered_json(*t.kit_to_hub[k]) : ordered_json(nullptr)}});
        seg["kits"] = kits;
        ordered_json hubs = ordered_json::array();
        for (std::size_t h = 0; h < t.hub_positions.size(); ++h)
            hubs.push_back({{"position", point_json(t.hub_positions[h])}, {"dropped", bool(t.hub_dropped[h])}});
        seg["hubs"] = hubs;
        ordered_json log = ordered_json::array();
        for (const auto& c : s.sweep_log)
            log.push_back({c.n_rf, c.n_hub, c.mass, c.dropped_hubs});
        seg["sweep"] = log;
        segments.push_back(seg);
    }
    doc["segments"] = segments;
    doc["config"] = config_to_json(report.config);
    text::write_file(path, doc.dump(1) + "\n");
}

RunReport read_topology_artifact(const std::filesystem::path& path)
{
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
        throw Error(ErrorCode::MissingUpstreamArtifact, "topology artifact not found; run optimize first", "path",
                    path.string());
    RunReport report;
    try {
        const json doc = json::parse(text::read_file(path));
        if (doc.at("format").get<std::string>() != kTopologyFormat)
            throw Error(ErrorCode::SchemaViolation, "unsupported topology artifact", "format",
                        doc.at("format").dump());
        report.seed = doc.at("seed").get<std::uint64_t>();
        report.config = parse_config(doc.at("config").dump());
        for (const auto& seg : doc.at("segments")) {
            SegmentReport s;
            auto& t = s.topology;
            t.segment_id = seg.at("segment").get<std::string>();
            t.n_rf = seg.at("n_rf").get<std::size_t>();
            t.n_hub = seg.at("n_hub").get<std::size_t>();
            t.total_mass = seg.at("mass_kg").get<double>();
            s.clustering_runs = seg.at("clustering_runs").get<std::size_t>();
            s.closed_form_runs = seg.at("closed_form_runs").get<std::size_t>();
            if (!seg.at("backbone").is_null())
                t.backbone = point_from(seg.at("backbone"));
            for (const auto& sensor : seg.at("sensors")) {
                t.sensor_ids.push_back(sensor.at("id").get<std::string>());
                t.sensor_positions.push_back(point_from(sensor.at("position")));
                t.sensor_to_kit.push_back(sensor.at("kit").get<std::size_t>());
            }
            for (const auto& kit : seg.at("kits")) {
                t.kit_positions.push_back(point_from(kit.at("position")));
                if (kit.at("hub").is_null())
                    t.kit_to_hub.emplace_back(std::nullopt);
                else
                    t.kit_to_hub.emplace_back(kit.at("hub").get<std::size_t>());
            }
            for (const auto& hub : seg.at("hubs")) {
                t.hub_positions.push_back(point_from(hub.at("position")));
                t.hub_dropped.push_back(hub.at("dropped").get<bool>());
            }
            for (const auto& c : seg.at("sweep"))
                s.sweep_log.push_back({c.at(0).get<std::size_t>(), c.at(1).get<std::size_t>(), c.at(2).get<double>(),
                                       c.at(3).get<std::size_t>()});
            report.segments.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaViolation, std::string("malformed topology artifact: ") + e.what(), "path",
                    path.string());
    }
    return report;
}

std::string hub_table_csv(const SegmentReport& segment)
{
    const auto& t = segment.topology;
    std::string out = "Id,X_mm,Y_mm,Z_mm,Power_dBm\n";
    for (std::size_t h = 0; h < t.hub_positions.size(); ++h) {
        if (t.hub_dropped[h])
            continue;
        const auto& p = t.hub_positions[h];
        std::string power;
        if (segment.budget)
            if (const auto* e = segment.budget->find(fmt::format("hub-{}", h)))
                power = dbm(e->required_tx_power);
        out += fmt::format("{},{},{},{},{}\n", h, mm(p.x), mm(p.y), mm(p.z), power);
    }
    return out;
}

std::string kit_table_csv(const SegmentReport& segment)
{
    const auto& t = segment.topology;
    std::string out = "Id,X_mm,Y_mm,Z_mm,Power_dBm,Hub\n";
    for (std::size_t k = 0; k < t.kit_positions.size(); ++k) {
        const auto& p = t.kit_positions[k];
        std::string power;
        if (segment.budget)
            if (const auto* e = segment.budget->find(fmt::format("kit-{}", k)))
                power = dbm(e->required_tx_power);
        const std::string hub = t.kit_to_hub[k] ? std::to_string(*t.kit_to_hub[k]) : std::string("wired");
        out += fmt::format("{},{},{},{},{},{}\n", k, mm(p.x), mm(p.y), mm(p.z), power, hub);
    }
    return out;
}

std::string summary_csv(const RunReport& report)
{
    std::string out = "segment,n_s,n_rf,n_hub,live_hubs,wired_kits,mass_kg,cable_m,segment_power_dbm,feasible\n";
    for (const auto& s : report.segments) {
        const auto& t = s.topology;
        const std::string power = s.budget ? dbm(s.budget->total) : std::string();
        const bool feasible = std::all_of(s.diagnostics.begin(), s.diagnostics.end(),
                                          [](const auto& d) { return d.feasible; });
        out += fmt::format("{},{},{},{},{},{},{:.3f},{:.3f},{},{}\n", t.segment_id, t.sensor_ids.size(), t.n_rf,
                           t.n_hub, t.live_hub_count(), t.wired_kit_count(), t.total_mass, topology::cable_length(t),
                           power, feasible ? "yes" : "no");
    }
    out += fmt::format("total,,,,,,,,{},{}\n", report.total_dbm ? fmt::format("{:.6f}", *report.total_dbm) : "",
                       report.feasible() ? "yes" : "no");
    return out;
}

namespace {

std::string budget_csv(const RunReport& report)
{
    std::string out = "segment,id,role,x_mm,y_mm,z_mm,power_dbm,hub_id,worst_peer,headroom_db,feasible\n";
    for (const auto& s : report.segments) {
        if (!s.budget)
            continue;
        const auto& t = s.topology;
        for (std::size_t i = 0; i < s.budget->entries.size(); ++i) {
            const auto& e = s.budget->entries[i];
            const bool hub = e.role == power::Role::Hub;
            const std::size_t index = std::stoul(e.device_id.substr(4));
            const Vec3 p = hub ? t.hub_positions[index] : t.kit_positions[index];
            const std::string hub_id = hub ? std::to_string(index) : std::to_string(*t.kit_to_hub[index]);
            const auto& d = s.diagnostics.at(i);
            out += fmt::format("{},{},{},{},{},{},{},{},{},{:.6f},{}\n", t.segment_id, e.device_id,
                               hub ? "hub" : "kit", mm(p.x), mm(p.y), mm(p.z), dbm(e.required_tx_power), hub_id,
                               e.worst_peer, d.headroom_db, d.feasible ? "yes" : "no");
        }
    }
    if (report.total_dbm)
        out += fmt::format("TOTAL,,,,,,{:.6f},,,,{}\n", *report.total_dbm, report.feasible() ? "yes" : "no");
    return out;
}

ordered_json report_json(const RunReport& report)
{
    ordered_json doc;
    doc["format"] = "wsn-report/1";
    doc["seed"] = report.seed;
    doc["total_dbm"] = report.total_dbm ? ordered_json(*report.total_dbm) : ordered_json(nullptr);
    doc["feasible"] = report.feasible();
    ordered_json segments = ordered_json::array();
    for (const auto& s : report.segments) {
        const auto& t = s.topology;
        ordered_json seg;
        seg["segment"] = t.segment_id;
        seg["n_s"] = t.sensor_ids.size();
        seg["n_rf"] = t.n_rf;
        seg["n_hub"] = t.n_hub;
        seg["live_hubs"] = t.live_hub_count();
        seg["mass_kg"] = t.total_mass;
        seg["backbone_unmodeled"] = t.backbone_unmodeled();
        seg["clustering_runs"] = s.clustering_runs;
        seg["closed_form_runs"] = s.closed_form_runs;
        if (s.bounds)
            seg["bounds_mm"] = {units::m_to_mm(s.bounds->x_lo_margin), units::m_to_mm(s.bounds->x_hi_margin)};
        seg["gains"] = s.gains_provenance;
        if (s.budget)
            seg["segment_power_dbm"] = units::watts_to_dbm(s.budget->total);
        segments.push_back(seg);
    }
    doc["segments"] = segments;
    doc["warnings"] = report.warnings;
    doc["config"] = config_to_json(report.config);
    return doc;
}

} // namespace

void write_report(const RunReport& report, const std::filesystem::path& out_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw Error(ErrorCode::IoFailure, "cannot create output directory", "path", out_dir.string());

    for (const auto& s : report.segments) {
        const auto& id = s.topology.segment_id;
        text::write_file(out_dir / fmt::format("hubs_{}.csv", id), hub_table_csv(s));
        text::write_file(out_dir / fmt::format("kits_{}.csv", id), kit_table_csv(s));
    }
    if (!report.segments.empty())
        text::write_file(out_dir / "budget.csv", budget_csv(report));
    text::write_file(out_dir / "summary.csv", summary_csv(report));
    text::write_file(out_dir / "report.json", report_json(report).dump(2) + "\n");
}

} // namespace wsn::exchange
