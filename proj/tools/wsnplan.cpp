// SPDX-License-Identifier: Apache-2.0

// wsnplan: wireless sensor network planning for launcher segments.
//
//   wsnplan pipeline --geometry G --sensors S --out DIR [--config C] [--seed N]
//   wsnplan segment|optimize|gains|budget ...   (stage-wise, same flags)
//
// Exit status: 0 success, 1 input error, 2 infeasible power budget.

#include <iostream>
#include <sstream>

#include <fmt/core.h>

#include "CLI11.hpp"

#include "wsn/error.hpp"
#include "wsn/text.hpp"
#include "wsn/workflow.hpp"

namespace {

struct Flags {
    std::string geometry;
    std::string sensors;
    std::string config;
    std::string out = "wsn_out";
    std::uint64_t seed = 0;
    std::string model;
    std::string import_gains;
    std::string segment;
    std::size_t jobs = 1;
};

void add_flags(CLI::App* cmd, Flags& f, bool needs_geometry, bool needs_sensors)
{
    auto* g = cmd->add_option("--geometry", f.geometry, "launcher geometry file (point/cap/stage records)");
    if (needs_geometry)
        g->required();
    auto* s = cmd->add_option("--sensors", f.sensors, "sensor CSV: id,x_mm,y_mm,z_mm,stage");
    if (needs_sensors)
        s->required();
    cmd->add_option("--config", f.config, "design configuration (JSON); defaults when omitted");
    cmd->add_option("--out", f.out, "output directory")->capture_default_str();
    cmd->add_option("--seed", f.seed, "sweep seed; overrides sweep.seed of the config");
    cmd->add_option("--model", f.model, "propagation model")->check(CLI::IsMember({"friis", "image", "import"}));
    cmd->add_option("--import-gains", f.import_gains, "directory holding gains_<segment>.csv from an external solver");
    cmd->add_option("--segment", f.segment, "comma-separated segment ids to process");
    cmd->add_option("--jobs", f.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

wsn::workflow::Options to_options(const Flags& f, const CLI::App* cmd)
{
    wsn::workflow::Options o;
    o.geometry = f.geometry;
    o.sensors = f.sensors;
    if (!f.config.empty())
        o.config = f.config;
    o.out_dir = f.out;
    if (cmd->count("--seed") > 0)
        o.seed = f.seed;
    if (!f.model.empty())
        o.model = wsn::propagation::model_from_string(f.model);
    if (!f.import_gains.empty()) {
        o.import_gains = f.import_gains;
        if (!o.model)
            o.model = wsn::propagation::Model::Imported;
    }
    if (!f.segment.empty())
        for (auto& id : wsn::text::split_csv_line(f.segment))
            if (!id.empty())
                o.segments.push_back(id);
    o.jobs = f.jobs;
    o.log = &std::cerr;
    return o;
}

void print_summary(const wsn::exchange::RunReport& report)
{
    for (const auto& s : report.segments)
        fmt::print("{} N_RF={} N_HUB={} live_hubs={} mass_kg={:.3f}\n", s.topology.segment_id, s.topology.n_rf,
                   s.topology.n_hub, s.topology.live_hub_count(), s.topology.total_mass);
    if (report.total_dbm)
        fmt::print("total_dbm {:.6f}\n", *report.total_dbm);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Wireless sensor network planning for launcher segments"};
    app.require_subcommand(1);

    Flags f;
    auto* segment = app.add_subcommand("segment", "partition sensors into isolated segments");
    auto* optimize = app.add_subcommand("optimize", "segment + mass-optimal topology sweep");
    auto* gains = app.add_subcommand("gains", "link gain matrices and external solver projects");
    auto* budget = app.add_subcommand("budget", "power budget, feasibility and reports");
    auto* pipeline = app.add_subcommand("pipeline", "optimize, gains and budget in one run");
    add_flags(segment, f, true, true);
    add_flags(optimize, f, true, true);
    add_flags(gains, f, true, false);
    add_flags(budget, f, false, false);
    add_flags(pipeline, f, true, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(wsn::workflow::Exit::InputError);
    }

    try {
        if (segment->parsed()) {
            for (const auto& [id, members] : wsn::workflow::run_segment(to_options(f, segment)))
                fmt::print("{} N_s={}\n", id, members.size());
            return 0;
        }
        if (optimize->parsed()) {
            print_summary(wsn::workflow::run_optimize(to_options(f, optimize)));
            return 0;
        }
        if (gains->parsed()) {
            wsn::workflow::run_gains(to_options(f, gains));
            return 0;
        }
        const auto* cmd = budget->parsed() ? budget : pipeline;
        const auto options = to_options(f, cmd);
        const auto report = budget->parsed() ? wsn::workflow::run_budget(options) : wsn::workflow::run_pipeline(options);
        print_summary(report);
        return static_cast<int>(wsn::workflow::exit_status(report));
    } catch (const wsn::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(wsn::workflow::Exit::InputError);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(wsn::workflow::Exit::InputError);
    }
}
