// SPDX-License-Identifier: Apache-2.0

#include <initializer_list>
#include <string_view>

#include <fmt/core.h>

#include "wsn/error.hpp"
#include "wsn/exchange.hpp"
#include "wsn/text.hpp"
#include "wsn/units.hpp"

namespace wsn::exchange {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join(const std::string& path, std::string_view key)
{
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void expect_object(const json& node, const std::string& path)
{
    if (!node.is_object())
        throw Error(ErrorCode::SchemaViolation, "expected an object", path.empty() ? "<root>" : path, node.dump());
}

void only_keys(const json& node, const std::string& path, std::initializer_list<std::string_view> keys)
{
    for (const auto& [key, value] : node.items()) {
        bool known = false;
        for (auto k : keys)
            known = known || key == k;
        if (!known)
            throw Error(ErrorCode::SchemaViolation, "unknown key", join(path, key), value.dump());
    }
}

void read(const json& node, const std::string& path, std::string_view key, double& out)
{
    auto it = node.find(std::string(key));
    if (it == node.end())
        return;
    if (!it->is_number())
        throw Error(ErrorCode::SchemaViolation, "expected a number", join(path, key), it->dump());
    out = it->get<double>();
}

void read(const json& node, const std::string& path, std::string_view key, std::size_t& out)
{
    auto it = node.find(std::string(key));
    if (it == node.end())
        return;
    if (!it->is_number_integer() || it->get<long long>() < 0)
        throw Error(ErrorCode::SchemaViolation, "expected a non-negative integer", join(path, key), it->dump());
    out = it->get<std::size_t>();
}

void read_mhz(const json& node, const std::string& path, std::string_view key, double& hz)
{
    double mhz = units::hz_to_mhz(hz);
    read(node, path, key, mhz);
    hz = units::mhz_to_hz(mhz);
}

void read_db_gain(const json& node, const std::string& path, std::string_view key, double& linear)
{
    auto it = node.find(std::string(key));
    if (it == node.end())
        return;
    double db = 0.0;
    read(node, path, key, db);
    linear = units::db_to_linear(db);
}

template <typename Enum>
void read_enum(const json& node, const std::string& path, std::string_view key, Enum& out,
               std::initializer_list<std::pair<std::string_view, Enum>> names)
{
    auto it = node.find(std::string(key));
    if (it == node.end())
        return;
    if (it->is_string())
        for (const auto& [name, value] : names)
            if (it->get<std::string>() == name) {
                out = value;
                return;
            }
    throw Error(ErrorCode::SchemaViolation, "unrecognised value", join(path, key), it->dump());
}

Vec3 read_point_mm(const json& node, const std::string& path)
{
    if (!node.is_array() || node.size() != 3)
        throw Error(ErrorCode::SchemaViolation, "expected [x_mm, y_mm, z_mm]", path, node.dump());
    double c[3];
    for (std::size_t i = 0; i < 3; ++i) {
        if (!node[i].is_number())
            throw Error(ErrorCode::SchemaViolation, "expected a number", path + "[" + std::to_string(i) + "]",
                        node[i].dump());
        c[i] = units::mm_to_m(node[i].get<double>());
    }
    return {c[0], c[1], c[2]};
}

} // namespace

void validate(const DesignConfig& c)
{
    topology::validate(c.weights);
    power::validate(c.rf);
    geometry::validate(c.frequency);
    propagation::validate(c.friis);
    propagation::validate(c.multipath);
    topology::validate(c.sweep);
}

DesignConfig parse_config(std::string_view text_in)
{
    DesignConfig c;
    c.friis.g_tx = units::db_to_linear(c.rf.max_antenna_gain_db);
    c.friis.g_rx = c.friis.g_tx;

    if (text::trim(text_in).empty()) {
        validate(c);
        return c;
    }

    json root;
    try {
        root = json::parse(text_in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::SchemaViolation, std::string("config is not valid JSON: ") + e.what(), "<root>");
    }
    expect_object(root, "");
    only_keys(root, "", {"weights", "rf", "frequency", "friis", "multipath", "sweep", "model", "median",
                         "peer_scope", "backbone_points_mm"});

    if (auto it = root.find("weights"); it != root.end()) {
        const std::string p = "weights";
        expect_object(*it, p);
        only_keys(*it, p, {"kit_mass_kg", "hub_mass_kg", "cable_mass_kg_per_m"});
        read(*it, p, "kit_mass_kg", c.weights.kit_mass);
        read(*it, p, "hub_mass_kg", c.weights.hub_mass);
        read(*it, p, "cable_mass_kg_per_m", c.weights.cable_mass_per_meter);
    }

    if (auto it = root.find("rf"); it != root.end()) {
        const std::string p = "rf";
        expect_object(*it, p);
        only_keys(*it, p, {"max_tx_power_dbm", "max_tx_gain_db", "max_antenna_gain_db", "sensitivity_dbm"});
        read(*it, p, "max_tx_power_dbm", c.rf.max_tx_power_dbm);
        read(*it, p, "max_tx_gain_db", c.rf.max_tx_gain_db);
        read(*it, p, "max_antenna_gain_db", c.rf.max_antenna_gain_db);
        read(*it, p, "sensitivity_dbm", c.rf.sensitivity_dbm);
        c.friis.g_tx = units::db_to_linear(c.rf.max_antenna_gain_db);
        c.friis.g_rx = c.friis.g_tx;
    }

    if (auto it = root.find("frequency"); it != root.end()) {
        const std::string p = "frequency";
        expect_object(*it, p);
        only_keys(*it, p, {"band_low_mhz", "band_high_mhz", "center_mhz"});
        read_mhz(*it, p, "band_low_mhz", c.frequency.band_low);
        read_mhz(*it, p, "band_high_mhz", c.frequency.band_high);
        read_mhz(*it, p, "center_mhz", c.frequency.center);
    }

    if (auto it = root.find("friis"); it != root.end()) {
        const std::string p = "friis";
        expect_object(*it, p);
        only_keys(*it, p, {"g_tx_db", "g_rx_db", "l0_db", "d0_m", "gamma"});
        read_db_gain(*it, p, "g_tx_db", c.friis.g_tx);
        read_db_gain(*it, p, "g_rx_db", c.friis.g_rx);
        if (auto l0 = it->find("l0_db"); l0 != it->end()) {
            if (l0->is_string() && l0->get<std::string>() == "auto")
                c.friis.l0.reset();
            else if (l0->is_number())
                c.friis.l0 = units::db_to_linear(l0->get<double>());
            else
                throw Error(ErrorCode::SchemaViolation, "expected a number or \"auto\"", "friis.l0_db", l0->dump());
        }
        read(*it, p, "d0_m", c.friis.d0);
        read(*it, p, "gamma", c.friis.gamma);
    }

    if (auto it = root.find("multipath"); it != root.end()) {
        const std::string p = "multipath";
        expect_object(*it, p);
        only_keys(*it, p, {"max_reflection_order", "reflection_coefficient"});
        read(*it, p, "max_reflection_order", c.multipath.max_reflection_order);
        if (auto rc = it->find("reflection_coefficient"); rc != it->end()) {
            if (rc->is_number())
                c.multipath.wall_reflection_coefficient = {rc->get<double>(), 0.0};
            else if (rc->is_array() && rc->size() == 2 && (*rc)[0].is_number() && (*rc)[1].is_number())
                c.multipath.wall_reflection_coefficient = {(*rc)[0].get<double>(), (*rc)[1].get<double>()};
            else
                throw Error(ErrorCode::SchemaViolation, "expected a number or [re, im]",
                            "multipath.reflection_coefficient", rc->dump());
        }
    }

    if (auto it = root.find("sweep"); it != root.end()) {
        const std::string p = "sweep";
        expect_object(*it, p);
        only_keys(*it, p, {"n_rf_min", "n_rf_max", "n_hub_min", "n_hub_max", "restarts", "seed"});
        read(*it, p, "n_rf_min", c.sweep.n_rf_min);
        if (auto m = it->find("n_rf_max"); m != it->end() && !m->is_null()) {
            std::size_t v = 0;
            read(*it, p, "n_rf_max", v);
            c.sweep.n_rf_max = v;
        }
        read(*it, p, "n_hub_min", c.sweep.n_hub_min);
        read(*it, p, "n_hub_max", c.sweep.n_hub_max);
        read(*it, p, "restarts", c.sweep.restarts);
        if (auto s = it->find("seed"); s != it->end()) {
            if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0))
                throw Error(ErrorCode::SchemaViolation, "expected a non-negative integer", "sweep.seed", s->dump());
            c.sweep.seed = s->get<std::uint64_t>();
        }
    }

    read_enum(root, "", "model", c.model,
              {{"friis", propagation::Model::Friis},
               {"image", propagation::Model::ImageSource},
               {"import", propagation::Model::Imported}});
    read_enum(root, "", "median", c.median,
              {{"geometric", clustering::MedianKind::Geometric}, {"coordinate", clustering::MedianKind::Coordinate}});
    read_enum(root, "", "peer_scope", c.peer_scope,
              {{"links", power::PeerScope::Links}, {"segment", power::PeerScope::Segment}});

    if (auto it = root.find("backbone_points_mm"); it != root.end()) {
        expect_object(*it, "backbone_points_mm");
        for (const auto& [segment, point] : it->items())
            c.backbone_points[segment] = read_point_mm(point, "backbone_points_mm." + segment);
    }

    validate(c);
    return c;
}

DesignConfig load_config(const std::filesystem::path& path) { return parse_config(text::read_file(path)); }

ordered_json config_to_json(const DesignConfig& c)
{
    ordered_json j;
    j["weights"] = {{"kit_mass_kg", c.weights.kit_mass},
                    {"hub_mass_kg", c.weights.hub_mass},
                    {"cable_mass_kg_per_m", c.weights.cable_mass_per_meter}};
    j["rf"] = {{"max_tx_power_dbm", c.rf.max_tx_power_dbm},
               {"max_tx_gain_db", c.rf.max_tx_gain_db},
               {"max_antenna_gain_db", c.rf.max_antenna_gain_db},
               {"sensitivity_dbm", c.rf.sensitivity_dbm}};
    j["frequency"] = {{"band_low_mhz", units::hz_to_mhz(c.frequency.band_low)},
                      {"band_high_mhz", units::hz_to_mhz(c.frequency.band_high)},
                      {"center_mhz", units::hz_to_mhz(c.frequency.center)}};
    ordered_json friis = {{"g_tx_db", units::linear_to_db(c.friis.g_tx)},
                          {"g_rx_db", units::linear_to_db(c.friis.g_rx)}};
    if (c.friis.l0)
        friis["l0_db"] = units::linear_to_db(*c.friis.l0);
    else
        friis["l0_db"] = "auto";
    friis["d0_m"] = c.friis.d0;
    friis["gamma"] = c.friis.gamma;
    j["friis"] = friis;
    j["multipath"] = {{"max_reflection_order", c.multipath.max_reflection_order},
                      {"reflection_coefficient",
                       {c.multipath.wall_reflection_coefficient.real(), c.multipath.wall_reflection_coefficient.imag()}}};
    ordered_json sweep = {{"n_rf_min", c.sweep.n_rf_min}};
    if (c.sweep.n_rf_max)
        sweep["n_rf_max"] = *c.sweep.n_rf_max;
    else
        sweep["n_rf_max"] = nullptr;
    sweep["n_hub_min"] = c.sweep.n_hub_min;
    sweep["n_hub_max"] = c.sweep.n_hub_max;
    sweep["restarts"] = c.sweep.restarts;
    sweep["seed"] = c.sweep.seed;
    j["sweep"] = sweep;
    j["model"] = propagation::to_string(c.model);
    j["median"] = c.median == clustering::MedianKind::Geometric ? "geometric" : "coordinate";
    j["peer_scope"] = c.peer_scope == power::PeerScope::Links ? "links" : "segment";
    ordered_json backbone = ordered_json::object();
    for (const auto& [segment, p] : c.backbone_points)
        backbone[segment] = {units::m_to_mm(p.x), units::m_to_mm(p.y), units::m_to_mm(p.z)};
    j["backbone_points_mm"] = backbone;
    return j;
}

} // namespace wsn::exchange
