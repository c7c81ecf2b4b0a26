// SPDX-License-Identifier: Apache-2.0

#include "wsn/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/core.h>
#include "json.hpp"

#include "wsn/error.hpp"
#include "wsn/text.hpp"
#include "wsn/units.hpp"

namespace wsn::propagation {

void validate(const FriisParams& p)
{
    auto positive = [](double v, const char* field) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw Error(ErrorCode::InvariantViolation, "value must be strictly positive", field, fmt::format("{}", v));
    };
    positive(p.g_tx, "friis.g_tx_db");
    positive(p.g_rx, "friis.g_rx_db");
    if (p.l0)
        positive(*p.l0, "friis.l0_db");
    positive(p.d0, "friis.d0_m");
    if (!(p.gamma >= 1.0) || !std::isfinite(p.gamma))
        throw Error(ErrorCode::InvariantViolation, "path-loss exponent must be at least 1", "friis.gamma",
                    fmt::format("{}", p.gamma));
}

void validate(const MultipathConfig& c)
{
    if (!(std::abs(c.wall_reflection_coefficient) <= 1.0))
        throw Error(ErrorCode::InvariantViolation, "reflection coefficient magnitude exceeds 1",
                    "multipath.reflection_coefficient", fmt::format("{}", std::abs(c.wall_reflection_coefficient)));
}

double reference_loss(const FriisParams& p, double wavelength)
{
    if (p.l0)
        return *p.l0;
    const double k = 4.0 * std::numbers::pi * p.d0 / wavelength;
    return k * k;
}

double friis_gain(const FriisParams& p, double distance, double wavelength)
{
    if (!(wavelength > 0.0))
        throw Error(ErrorCode::InvalidArgument, "wavelength must be positive", "wavelength",
                    fmt::format("{}", wavelength));
    if (!(distance >= p.d0))
        throw Error(ErrorCode::DistanceBelowReference, "link shorter than the reference distance", "distance",
                    fmt::format("{}", distance));
    return p.g_tx * p.g_rx / reference_loss(p, wavelength) * std::pow(p.d0 / distance, p.gamma);
}

double image_source_gain(const Vec3& tx, const Vec3& rx, double local_radius, double wavelength,
                         const MultipathConfig& config, const FriisParams& friis)
{
    if (tx == rx)
        throw Error(ErrorCode::CoincidentDevices, "transmitter and receiver coincide");
    if (!(local_radius > 0.0))
        throw Error(ErrorCode::InvalidArgument, "local radius must be positive", "local_radius",
                    fmt::format("{}", local_radius));

    const double k = 2.0 * std::numbers::pi / wavelength;
    auto ray = [&](double image_y, std::complex<double> weight) {
        const double length = distance(Vec3{tx.x, image_y, tx.z}, rx);
        const double amplitude = std::sqrt(friis_gain(friis, length, wavelength));
        return weight * std::polar(amplitude, -k * length);
    };

    std::complex<double> field = ray(tx.y, 1.0);
    const auto gamma = config.wall_reflection_coefficient;
    // Two image chains per order: first bounce on the +R wall or on the -R wall.
    for (double first_wall : {1.0, -1.0}) {
        double y = tx.y;
        double wall = first_wall;
        std::complex<double> weight = 1.0;
        for (std::size_t bounce = 1; bounce <= config.max_reflection_order; ++bounce) {
            y = 2.0 * wall * local_radius - y;
            wall = -wall;
            weight *= gamma;
            if (weight != 0.0)
                field += ray(y, weight);
        }
    }
    return std::norm(field);
}

std::string to_string(Model model)
{
    switch (model) {
    case Model::Friis: return "friis";
    case Model::ImageSource: return "image";
    case Model::Imported: return "import";
    }
    return "friis";
}

Model model_from_string(const std::string& name)
{
    if (name == "friis")
        return Model::Friis;
    if (name == "image" || name == "image_source")
        return Model::ImageSource;
    if (name == "import" || name == "imported")
        return Model::Imported;
    throw Error(ErrorCode::SchemaViolation, "unknown propagation model", "model", name);
}

std::optional<std::size_t> LinkGainMatrix::index_of(const std::string& id) const
{
    for (std::size_t i = 0; i < device_ids.size(); ++i)
        if (device_ids[i] == id)
            return i;
    return std::nullopt;
}

std::vector<std::string> wireless_device_ids(const topology::SegmentTopology& t)
{
    std::vector<std::string> ids;
    for (std::size_t k = 0; k < t.kit_positions.size(); ++k)
        if (t.kit_to_hub[k])
            ids.push_back(fmt::format("kit-{}", k));
    for (std::size_t h = 0; h < t.hub_positions.size(); ++h)
        if (!t.hub_dropped[h])
            ids.push_back(fmt::format("hub-{}", h));
    return ids;
}

std::vector<Vec3> wireless_device_positions(const topology::SegmentTopology& t)
{
    std::vector<Vec3> out;
    for (std::size_t k = 0; k < t.kit_positions.size(); ++k)
        if (t.kit_to_hub[k])
            out.push_back(t.kit_positions[k]);
    for (std::size_t h = 0; h < t.hub_positions.size(); ++h)
        if (!t.hub_dropped[h])
            out.push_back(t.hub_positions[h]);
    return out;
}

LinkGainMatrix assemble_matrix(const topology::SegmentTopology& t, const geometry::FrequencyPlan& plan,
                               const ModelInputs& inputs)
{
    LinkGainMatrix m;
    m.segment_id = t.segment_id;
    m.frequency = plan.center;
    const auto ids = wireless_device_ids(t);
    if (ids.size() < 2)
        return m;
    if (inputs.model == Model::Imported)
        throw Error(ErrorCode::InvalidArgument, "imported gains are read with import_matrix", "model", "import");
    if (inputs.model == Model::ImageSource && inputs.profile == nullptr)
        throw Error(ErrorCode::InvalidArgument, "image-source model needs the launcher profile", "geometry");

    const auto pos = wireless_device_positions(t);
    const double wavelength = plan.wavelength();
    const std::size_t n = ids.size();
    m.device_ids = ids;
    m.gains.assign(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double g = 0.0;
            if (inputs.model == Model::Friis) {
                g = friis_gain(inputs.friis, distance(pos[i], pos[j]), wavelength);
            } else {
                const double radius = geometry::radius_at(*inputs.profile, 0.5 * (pos[i].x + pos[j].x));
                g = image_source_gain(pos[i], pos[j], radius, wavelength, inputs.multipath, inputs.friis);
            }
            m.at(i, j) = g;
            m.at(j, i) = g;
        }
    }
    return m;
}

void write_matrix(const LinkGainMatrix& m, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoFailure, "cannot open file for writing", "path", path.string());
    out << "dB";
    for (const auto& id : m.device_ids)
        out << ',' << id;
    out << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << m.device_ids[i];
        for (std::size_t j = 0; j < m.size(); ++j)
            out << ',' << fmt::format("{:.12f}", units::linear_to_db(m.at(i, j)));
        out << '\n';
    }
    if (!out)
        throw Error(ErrorCode::IoFailure, "write failed", "path", path.string());
}

LinkGainMatrix import_matrix(const std::filesystem::path& path, std::optional<std::span<const std::string>> expected_ids)
{
    const auto rows = text::read_csv(path);
    if (rows.empty())
        throw Error(ErrorCode::ShapeMismatch, "gain matrix file is empty", "path", path.string());

    const auto& header = rows.front();
    const std::string unit = text::trim(header.front());
    bool in_db = true;
    if (unit == "linear")
        in_db = false;
    else if (unit != "dB" && !unit.empty())
        throw Error(ErrorCode::SchemaViolation, "corner cell must name the unit (dB or linear)", "unit", unit);

    const std::size_t n = header.size() - 1;
    if (rows.size() - 1 != n)
        throw Error(ErrorCode::ShapeMismatch, "gain matrix is not square", "rows", std::to_string(rows.size() - 1));

    LinkGainMatrix file;
    for (std::size_t j = 1; j < header.size(); ++j)
        file.device_ids.push_back(text::trim(header[j]));
    file.gains.assign(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = rows[i + 1];
        if (row.size() != n + 1)
            throw Error(ErrorCode::ShapeMismatch, "row length differs from header", "row " + std::to_string(i + 1),
                        std::to_string(row.size()));
        const std::string row_id = text::trim(row.front());
        if (row_id != file.device_ids[i])
            throw Error(ErrorCode::UnknownDeviceId, "row id does not match the column order",
                        "row " + std::to_string(i + 1), row_id);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j)
                continue;
            const std::string field = file.device_ids[i] + "," + file.device_ids[j];
            const auto parsed = text::parse_double(row[j + 1]);
            if (!parsed)
                throw Error(ErrorCode::SchemaViolation, "gain entry is not numeric", field, row[j + 1]);
            const double linear = in_db ? units::db_to_linear(*parsed) : *parsed;
            if (!(linear > 0.0) || !std::isfinite(linear))
                throw Error(ErrorCode::NonPositiveGain, "gain must be strictly positive", field, row[j + 1]);
            if (linear > 1.0 + 1e-12)
                throw Error(ErrorCode::InvariantViolation, "gain exceeds unity", field, row[j + 1]);
            file.at(i, j) = linear;
        }
    }

    LinkGainMatrix m;
    m.segment_id = path.stem().string();
    if (expected_ids) {
        const auto& want = *expected_ids;
        if (want.size() != n)
            throw Error(ErrorCode::ShapeMismatch, "matrix size differs from the topology's device count", "devices",
                        std::to_string(n));
        std::vector<std::size_t> from(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto idx = file.index_of(want[i]);
            if (!idx)
                throw Error(ErrorCode::UnknownDeviceId, "device missing from gain matrix", "device", want[i]);
            from[i] = *idx;
        }
        for (const auto& id : file.device_ids)
            if (std::find(want.begin(), want.end(), id) == want.end())
                throw Error(ErrorCode::UnknownDeviceId, "gain matrix names a device absent from the topology",
                            "device", id);
        m.device_ids.assign(want.begin(), want.end());
        m.gains.assign(n * n, 1.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                m.at(i, j) = file.at(from[i], from[j]);
    } else {
        m.device_ids = std::move(file.device_ids);
        m.gains = std::move(file.gains);
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = m.at(i, j);
            const double b = m.at(j, i);
            if (a == b)
                continue;
            const double rel = std::abs(a - b) / std::max(a, b);
            if (rel > 1e-6)
                m.warnings.push_back(fmt::format("{}: asymmetric gain {} <-> {} (relative {:.3e}), averaged",
                                                 path.filename().string(), m.device_ids[i], m.device_ids[j], rel));
            const double mean = 0.5 * (a + b);
            m.at(i, j) = mean;
            m.at(j, i) = mean;
        }
    }
    return m;
}

std::string cem_project_json(const geometry::SegmentBounds& bounds, const geometry::LauncherProfile& profile,
                             const topology::SegmentTopology& t, const geometry::FrequencyPlan& plan)
{
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["format"] = "wsn-cem-project/1";
    doc["segment"] = bounds.segment_id;
    doc["units"] = {{"length", "mm"}, {"frequency", "Hz"}};
    doc["frequency_hz"] = plan.center;
    doc["wavelength_mm"] = units::m_to_mm(plan.wavelength());
    doc["boundary"] = {{"material", "PEC"}, {"open_end", "bottom"}, {"closed_end", "top"}, {"axis", "x"}};

    ordered_json window = {{"x_min_mm", units::m_to_mm(bounds.x_min)},
                           {"x_max_mm", units::m_to_mm(bounds.x_max)},
                           {"x_lo_mm", units::m_to_mm(bounds.x_lo_margin)},
                           {"x_hi_mm", units::m_to_mm(bounds.x_hi_margin)}};
    doc["window"] = window;

    ordered_json radius = ordered_json::array();
    for (const auto& p : geometry::profile_slice(profile, bounds.x_lo_margin, bounds.x_hi_margin))
        radius.push_back({units::m_to_mm(p.x), units::m_to_mm(p.radius)});
    doc["geometry"] = {{"kind", "axisymmetric_radius_profile"}, {"points_mm", radius}};

    ordered_json sources = ordered_json::array();
    const auto ids = wireless_device_ids(t);
    const auto pos = wireless_device_positions(t);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        sources.push_back({{"id", ids[i]},
                           {"type", "infinitesimal_dipole"},
                           {"orientation", {1.0, 0.0, 0.0}},
                           {"position_mm", {units::m_to_mm(pos[i].x), units::m_to_mm(pos[i].y),
                                            units::m_to_mm(pos[i].z)}}});
    }
    doc["sources"] = sources;
    doc["expected_output"] = "gain matrix exchange file (dB), one row and column per source id";
    return doc.dump(2) + "\n";
}

void export_cem_project(const geometry::SegmentBounds& bounds, const geometry::LauncherProfile& profile,
                        const topology::SegmentTopology& topology, const geometry::FrequencyPlan& plan,
                        const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoFailure, "cannot open file for writing", "path", path.string());
    out << cem_project_json(bounds, profile, topology, plan);
    if (!out)
        throw Error(ErrorCode::IoFailure, "write failed", "path", path.string());
}

} // namespace wsn::propagation
