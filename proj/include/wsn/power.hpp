// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wsn/propagation.hpp"
#include "wsn/topology.hpp"

namespace wsn::power {

// Limits of the RF devices. Powers in dBm, gains in dB.
struct RfDeviceSpec {
    double max_tx_power_dbm = 17.0;
    double max_tx_gain_db = 30.0;
    double max_antenna_gain_db = 2.0;
    double sensitivity_dbm = -109.0; // P_min, common to all receivers
};

// Throws InvariantViolation unless sensitivity < max_tx_power.
void validate(const RfDeviceSpec& spec);

// P_rx = S * P_tx (linear gain, watts).
double received_power(double gain, double tx_power);

// P_min / min(S) over the peers. Throws EmptyPeerSet, NonPositiveGain.
double required_tx_power(std::span<const double> gains_to_peers, double p_min);

enum class Role { Kit, Hub };

enum class PeerScope {
    Links,   // a kit addresses its HUB, a HUB its kits
    Segment, // every other wireless device of the segment
};

struct BudgetEntry {
    std::string device_id;
    Role role = Role::Kit;
    double required_tx_power = 0.0; // W
    std::vector<std::string> peers;
    std::string worst_peer;
};

struct PowerBudget {
    std::string segment_id;
    std::vector<BudgetEntry> entries; // matrix order: kits, then HUBs
    double total = 0.0;               // W

    const BudgetEntry* find(const std::string& device_id) const;
};

// Builds the worst-case budget of one segment. Cabled kits and dropped HUBs
// do not appear. Throws UnknownDeviceId when the matrix lacks a device.
PowerBudget compute_budget(const topology::SegmentTopology& topology, const propagation::LinkGainMatrix& gains,
                           double p_min_watts, PeerScope scope = PeerScope::Links);

// 10*log10 of the summed transmit powers in milliwatts.
double total_emitted_power_dbm(std::span<const double> powers_watts);
double total_emitted_power_dbm(std::span<const PowerBudget> budgets);

struct Diagnostic {
    std::string segment_id;
    std::string device_id;
    double required_dbm = 0.0;
    double headroom_db = 0.0; // max_tx_power - required
    bool feasible = true;
};

std::vector<Diagnostic> check_feasibility(const PowerBudget& budget, const RfDeviceSpec& spec);

} // namespace wsn::power
