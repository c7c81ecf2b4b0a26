// SPDX-License-Identifier: Apache-2.0

#include "wsn/power.hpp"

#include <cmath>

#include <fmt/core.h>

#include "wsn/error.hpp"
#include "wsn/units.hpp"

namespace wsn::power {

void validate(const RfDeviceSpec& spec)
{
    if (!(spec.sensitivity_dbm < spec.max_tx_power_dbm))
        throw Error(ErrorCode::InvariantViolation, "sensitivity must be below the maximum transmit power",
                    "rf.sensitivity_dbm", fmt::format("{}", spec.sensitivity_dbm));
}

double received_power(double gain, double tx_power) { return gain * tx_power; }

double required_tx_power(std::span<const double> gains_to_peers, double p_min)
{
    if (gains_to_peers.empty())
        throw Error(ErrorCode::EmptyPeerSet, "transmitter has no peers");
    double worst = gains_to_peers.front();
    for (double g : gains_to_peers) {
        if (!(g > 0.0))
            throw Error(ErrorCode::NonPositiveGain, "gain must be strictly positive", "gain", fmt::format("{}", g));
        worst = std::min(worst, g);
    }
    return p_min / worst;
}

const BudgetEntry* PowerBudget::find(const std::string& device_id) const
{
    for (const auto& e : entries)
        if (e.device_id == device_id)
            return &e;
    return nullptr;
}

PowerBudget compute_budget(const topology::SegmentTopology& t, const propagation::LinkGainMatrix& gains,
                           double p_min_watts, PeerScope scope)
{
    PowerBudget budget;
    budget.segment_id = t.segment_id;
    const auto ids = propagation::wireless_device_ids(t);

    std::vector<std::size_t> at(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto idx = gains.index_of(ids[i]);
        if (!idx)
            throw Error(ErrorCode::UnknownDeviceId, "gain matrix lacks a wireless device", "device", ids[i]);
        at[i] = *idx;
    }

    // Links: kit k <-> hub h for every linked kit.
    std::vector<std::vector<std::size_t>> peers(ids.size());
    if (scope == PeerScope::Segment) {
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = 0; j < ids.size(); ++j)
                if (i != j)
                    peers[i].push_back(j);
    } else {
        std::size_t kit_slot = 0;
        std::vector<std::size_t> hub_slot(t.hub_positions.size(), 0);
        std::size_t n_linked = 0;
        for (const auto& link : t.kit_to_hub)
            if (link)
                ++n_linked;
        std::size_t next = n_linked;
        for (std::size_t h = 0; h < t.hub_positions.size(); ++h)
            if (!t.hub_dropped[h])
                hub_slot[h] = next++;
        for (std::size_t k = 0; k < t.kit_to_hub.size(); ++k) {
            if (!t.kit_to_hub[k])
                continue;
            const std::size_t hub = hub_slot[*t.kit_to_hub[k]];
            peers[kit_slot].push_back(hub);
            peers[hub].push_back(kit_slot);
            ++kit_slot;
        }
    }

    for (std::size_t i = 0; i < ids.size(); ++i) {
        BudgetEntry e;
        e.device_id = ids[i];
        e.role = ids[i].starts_with("hub-") ? Role::Hub : Role::Kit;
        std::vector<double> g;
        std::size_t worst = peers[i].empty() ? i : peers[i].front();
        for (std::size_t j : peers[i]) {
            e.peers.push_back(ids[j]);
            const double v = gains.at(at[i], at[j]);
            g.push_back(v);
            if (v < gains.at(at[i], at[worst]))
                worst = j;
        }
        if (g.empty())
            throw Error(ErrorCode::EmptyPeerSet, "wireless device has no peers", "device", ids[i]);
        e.worst_peer = ids[worst];
        e.required_tx_power = required_tx_power(g, p_min_watts);
        budget.total += e.required_tx_power;
        budget.entries.push_back(std::move(e));
    }
    return budget;
}

double total_emitted_power_dbm(std::span<const double> powers_watts)
{
    if (powers_watts.empty())
        throw Error(ErrorCode::InvalidArgument, "no transmitters to sum");
    double sum_mw = 0.0;
    for (double p : powers_watts)
        sum_mw += p * 1e3;
    return units::milliwatts_to_dbm(sum_mw);
}

double total_emitted_power_dbm(std::span<const PowerBudget> budgets)
{
    std::vector<double> all;
    for (const auto& b : budgets)
        for (const auto& e : b.entries)
            all.push_back(e.required_tx_power);
    return total_emitted_power_dbm(all);
}

std::vector<Diagnostic> check_feasibility(const PowerBudget& budget, const RfDeviceSpec& spec)
{
    std::vector<Diagnostic> out;
    for (const auto& e : budget.entries) {
        Diagnostic d;
        d.segment_id = budget.segment_id;
        d.device_id = e.device_id;
        d.required_dbm = units::watts_to_dbm(e.required_tx_power);
        d.headroom_db = spec.max_tx_power_dbm - d.required_dbm;
        d.feasible = d.required_dbm <= spec.max_tx_power_dbm;
        out.push_back(std::move(d));
    }
    return out;
}

} // namespace wsn::power
