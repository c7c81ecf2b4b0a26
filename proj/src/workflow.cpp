// SPDX-License-Identifier: Apache-2.0

#include "wsn/workflow.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "wsn/error.hpp"
#include "wsn/random.hpp"
#include "wsn/text.hpp"
#include "wsn/units.hpp"

namespace wsn::workflow {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <typename... Args>
void log(const Options& o, fmt::format_string<Args...> f, Args&&... args)
{
    if (o.log)
        fmt::print(*o.log, "{}\n", fmt::format(f, std::forward<Args>(args)...));
}

std::filesystem::path topology_path(const Options& o) { return o.out_dir / "topology.json"; }
std::filesystem::path manifest_path(const Options& o) { return o.out_dir / "gains.json"; }

void ensure_out_dir(const Options& o)
{
    std::error_code ec;
    std::filesystem::create_directories(o.out_dir, ec);
    if (ec)
        throw Error(ErrorCode::IoFailure, "cannot create output directory", "out", o.out_dir.string());
}

exchange::DesignConfig resolve_config(const Options& o, const exchange::DesignConfig* upstream = nullptr)
{
    exchange::DesignConfig c;
    if (o.config)
        c = exchange::load_config(*o.config);
    else if (upstream)
        c = *upstream;
    else
        c = exchange::parse_config("");
    if (o.seed)
        c.sweep.seed = *o.seed;
    if (o.model)
        c.model = *o.model;
    return c;
}

std::uint64_t fnv1a(const std::string& s) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

geometry::SegmentBounds bounds_of(const topology::SegmentTopology& t, const geometry::FrequencyPlan& plan)
{
    std::vector<double> xs;
    for (const auto& p : propagation::wireless_device_positions(t))
        xs.push_back(p.x);
    return geometry::segment_bounds(xs, plan.wavelength(), t.segment_id);
}

std::string gains_file(const std::string& segment) { return fmt::format("gains_{}.csv", segment); }

} // namespace

std::uint64_t segment_seed(std::uint64_t seed, const std::string& segment_id) noexcept
{
    return derive_seed(seed, {fnv1a(segment_id)});
}

std::vector<std::pair<std::string, std::vector<topology::Sensor>>> run_segment(const Options& o)
{
    const auto geo = exchange::load_geometry(o.geometry);
    const auto sensors = exchange::load_sensors(o.sensors);

    auto stages = geo.stages;
    if (stages.empty()) {
        // No stage records: one unsplit segment per sensor stage label.
        for (const auto& s : sensors) {
            auto it = std::find_if(stages.begin(), stages.end(), [&](const auto& d) { return d.label == s.stage; });
            if (it == stages.end())
                stages.push_back({s.stage, s.position.x, s.position.x, false});
            else {
                it->x_lo = std::min(it->x_lo, s.position.x);
                it->x_hi = std::max(it->x_hi, s.position.x);
            }
        }
    }

    std::vector<geometry::StagedPoint> staged;
    for (const auto& s : sensors)
        staged.push_back({s.stage, s.position.x});
    const auto parts = geometry::partition_stages(staged, stages);

    std::vector<std::pair<std::string, std::vector<topology::Sensor>>> out;
    for (const auto& part : parts) {
        if (!o.segments.empty() &&
            std::find(o.segments.begin(), o.segments.end(), part.segment_id) == o.segments.end())
            continue;
        std::vector<topology::Sensor> members;
        for (auto i : part.members)
            members.push_back(sensors[i]);
        out.emplace_back(part.segment_id, std::move(members));
    }
    for (const auto& id : o.segments)
        if (std::none_of(out.begin(), out.end(), [&](const auto& s) { return s.first == id; }))
            throw Error(ErrorCode::UnknownStageLabel, "segment filter names no segment", "segment", id);

    ensure_out_dir(o);
    std::string csv = "segment,n_s,x_min_mm,x_max_mm\n";
    for (const auto& [id, members] : out) {
        double lo = members.front().position.x;
        double hi = lo;
        for (const auto& s : members) {
            lo = std::min(lo, s.position.x);
            hi = std::max(hi, s.position.x);
        }
        csv += fmt::format("{},{},{:.3f},{:.3f}\n", id, members.size(), units::m_to_mm(lo), units::m_to_mm(hi));
    }
    text::write_file(o.out_dir / "segments.csv", csv);
    log(o, "segment: {} sensors in {} segments", sensors.size(), out.size());
    return out;
}

exchange::RunReport run_optimize(const Options& o)
{
    exchange::RunReport report;
    report.config = resolve_config(o);
    report.seed = report.config.sweep.seed;
    const auto segments = run_segment(o);

    for (const auto& [id, sensors] : segments) {
        auto range = report.config.sweep;
        range.seed = segment_seed(report.seed, id);
        topology::SweepOptions opts;
        opts.median = report.config.median;
        opts.jobs = o.jobs;
        if (auto it = report.config.backbone_points.find(id); it != report.config.backbone_points.end())
            opts.backbone = it->second;

        topology::SweepResult sweep;
        try {
            sweep = topology::sweep_segment(id, sensors, range, report.config.weights, opts);
        } catch (const Error& e) {
            throw e.in(fmt::format("optimize segment {}", id));
        }

        exchange::SegmentReport s;
        s.topology = std::move(sweep.best);
        s.sweep_log = std::move(sweep.log);
        s.clustering_runs = sweep.clustering_runs;
        s.closed_form_runs = sweep.closed_form_runs;
        log(o, "optimize: segment {} N_s={} -> N_RF={} N_HUB={} mass {:.3f} kg ({} clusterings)", id,
            sensors.size(), s.topology.n_rf, s.topology.n_hub, s.topology.total_mass, s.clustering_runs);
        if (s.topology.backbone_unmodeled())
            report.warnings.push_back(fmt::format("segment {}: cabled kit without backbone point, cable not counted", id));
        exchange::write_sweep_log(s, o.out_dir / fmt::format("sweep_{}.csv", id));
        report.segments.push_back(std::move(s));
    }

    exchange::write_topology_artifact(report, topology_path(o));
    return report;
}

exchange::RunReport run_gains(const Options& o)
{
    auto report = exchange::read_topology_artifact(topology_path(o));
    report.config = resolve_config(o, &report.config);
    report.config.sweep.seed = report.seed;
    const auto& cfg = report.config;
    const auto geo = exchange::load_geometry(o.geometry);

    if (cfg.model == propagation::Model::Imported && !o.import_gains)
        throw Error(ErrorCode::InvalidArgument, "model 'import' needs --import-gains", "import-gains");

    propagation::ModelInputs inputs;
    inputs.model = cfg.model;
    inputs.friis = cfg.friis;
    inputs.multipath = cfg.multipath;
    inputs.profile = &geo.profile;

    ordered_json manifest;
    manifest["format"] = "wsn-gains/1";
    manifest["model"] = propagation::to_string(cfg.model);
    ordered_json entries = ordered_json::array();

    for (auto& s : report.segments) {
        const auto& t = s.topology;
        const auto& id = t.segment_id;
        s.bounds = bounds_of(t, cfg.frequency);
        const std::string cem_name = fmt::format("cem_{}.json", id);
        propagation::export_cem_project(*s.bounds, geo.profile, t, cfg.frequency, o.out_dir / cem_name);

        try {
            if (cfg.model == propagation::Model::Imported) {
                const auto source = *o.import_gains / gains_file(id);
                const auto ids = propagation::wireless_device_ids(t);
                s.gains = propagation::import_matrix(source, std::span<const std::string>(ids));
                s.gains->segment_id = id;
                s.gains->frequency = cfg.frequency.center;
                s.gains_provenance = "import:" + source.filename().string();
            } else {
                s.gains = propagation::assemble_matrix(t, cfg.frequency, inputs);
                s.gains_provenance = propagation::to_string(cfg.model);
            }
        } catch (const Error& e) {
            throw e.in(fmt::format("gains segment {}", id));
        }
        for (const auto& w : s.gains->warnings) {
            log(o, "gains: warning: {}", w);
            report.warnings.push_back(w);
        }
        propagation::write_matrix(*s.gains, o.out_dir / gains_file(id));
        entries.push_back({{"segment", id},
                           {"file", gains_file(id)},
                           {"provenance", s.gains_provenance},
                           {"cem_project", cem_name},
                           {"warnings", s.gains->warnings}});
        log(o, "gains: segment {} {} devices via {}", id, s.gains->size(), s.gains_provenance);
    }
    manifest["segments"] = entries;
    text::write_file(manifest_path(o), manifest.dump(2) + "\n");
    return report;
}

exchange::RunReport run_budget(const Options& o)
{
    auto report = exchange::read_topology_artifact(topology_path(o));
    report.config = resolve_config(o, &report.config);
    report.config.sweep.seed = report.seed;
    const auto& cfg = report.config;

    std::error_code ec;
    if (!std::filesystem::is_regular_file(manifest_path(o), ec))
        throw Error(ErrorCode::MissingUpstreamArtifact, "gain manifest not found; run gains first", "path",
                    manifest_path(o).string());
    json manifest;
    try {
        manifest = json::parse(text::read_file(manifest_path(o)));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaViolation, std::string("malformed gain manifest: ") + e.what(), "path",
                    manifest_path(o).string());
    }

    for (const auto& t : report.segments)
        if (t.topology.backbone_unmodeled())
            report.warnings.push_back(
                fmt::format("segment {}: cabled kit without backbone point, cable not counted", t.topology.segment_id));

    const double p_min = units::dbm_to_watts(cfg.rf.sensitivity_dbm);
    std::vector<power::PowerBudget> budgets;
    for (auto& s : report.segments) {
        const auto& t = s.topology;
        const auto& id = t.segment_id;
        const json* entry = nullptr;
        for (const auto& e : manifest.at("segments"))
            if (e.at("segment").get<std::string>() == id)
                entry = &e;
        const auto path = o.out_dir / gains_file(id);
        if (!entry || !std::filesystem::is_regular_file(path, ec))
            throw Error(ErrorCode::MissingUpstreamArtifact, "gain matrix missing; run gains first", "segment", id);
        s.gains_provenance = entry->at("provenance").get<std::string>();
        for (const auto& w : entry->at("warnings"))
            report.warnings.push_back(w.get<std::string>());

        const auto ids = propagation::wireless_device_ids(t);
        s.gains = propagation::import_matrix(path, std::span<const std::string>(ids));
        s.gains->segment_id = id;
        s.gains->frequency = cfg.frequency.center;
        s.bounds = bounds_of(t, cfg.frequency);
        try {
            s.budget = power::compute_budget(t, *s.gains, p_min, cfg.peer_scope);
        } catch (const Error& e) {
            throw e.in(fmt::format("budget segment {}", id));
        }
        s.diagnostics = power::check_feasibility(*s.budget, cfg.rf);
        for (const auto& d : s.diagnostics)
            if (!d.feasible)
                log(o, "budget: INFEASIBLE segment {} device {} needs {:.6f} dBm (limit {:.3f} dBm)", id, d.device_id,
                    d.required_dbm, cfg.rf.max_tx_power_dbm);
        budgets.push_back(*s.budget);
    }

    if (!budgets.empty())
        report.total_dbm = power::total_emitted_power_dbm(budgets);
    exchange::write_report(report, o.out_dir);
    if (report.total_dbm)
        log(o, "budget: total emitted power {:.6f} dBm", *report.total_dbm);
    return report;
}

exchange::RunReport run_pipeline(const Options& o)
{
    run_optimize(o);
    run_gains(o);
    return run_budget(o);
}

Exit exit_status(const exchange::RunReport& report)
{
    return report.feasible() ? Exit::Success : Exit::Infeasible;
}

} // namespace wsn::workflow
