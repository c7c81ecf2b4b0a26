// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <algorithm>
#include <random>

#include "wsn/error.hpp"
#include "wsn/power.hpp"
#include "wsn/units.hpp"

using namespace wsn;
using namespace wsn::power;
using units::db_to_linear;
using units::dbm_to_watts;
using units::watts_to_dbm;

namespace {

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

// kits 0..n-1 all on HUB 0
topology::SegmentTopology star(std::size_t kits)
{
    topology::SegmentTopology t;
    t.segment_id = "s";
    t.kit_positions.resize(kits);
    t.hub_positions.resize(1);
    t.hub_dropped = {false};
    for (std::size_t k = 0; k < kits; ++k)
        t.kit_to_hub.emplace_back(0);
    t.n_rf = kits;
    t.n_hub = 1;
    return t;
}

propagation::LinkGainMatrix matrix_for(const topology::SegmentTopology& t, std::mt19937_64& rng)
{
    propagation::LinkGainMatrix m;
    m.segment_id = t.segment_id;
    m.device_ids = propagation::wireless_device_ids(t);
    const std::size_t n = m.device_ids.size();
    m.gains.assign(n * n, 1.0);
    std::uniform_real_distribution<double> db(-140.0, -20.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            m.at(i, j) = m.at(j, i) = db_to_linear(db(rng));
    return m;
}

} // namespace

TEST_CASE("received_power")
{
    CHECK(received_power(1.0, 0.37) == 0.37);
    CHECK(watts_to_dbm(received_power(db_to_linear(-100.0), dbm_to_watts(17.0))) == doctest::Approx(-83.0));
    // Back-computed from the stage-5 kit 1 entry: -1.66156 dBm through -107.33844 dB reaches -109 dBm.
    CHECK(watts_to_dbm(received_power(db_to_linear(-107.33844), dbm_to_watts(-1.66156))) ==
          doctest::Approx(-109.0).epsilon(1e-12));
}

TEST_CASE("required_tx_power")
{
    const double p_min = dbm_to_watts(-109.0);
    const double one[] = {db_to_linear(-100.0)};
    CHECK(watts_to_dbm(required_tx_power(one, p_min)) == doctest::Approx(-9.0));
    const double two[] = {db_to_linear(-80.0), db_to_linear(-100.0)};
    CHECK(required_tx_power(two, p_min) == required_tx_power(one, p_min));
    CHECK(code_of([&] { required_tx_power({}, p_min); }) == ErrorCode::EmptyPeerSet);
    const double bad[] = {0.1, 0.0};
    CHECK(code_of([&] { required_tx_power(bad, p_min); }) == ErrorCode::NonPositiveGain);
}

TEST_CASE("received power at the worst peer equals the sensitivity")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> db(-150.0, -10.0);
    const double p_min = dbm_to_watts(-109.0);
    for (int i = 0; i < 500; ++i) {
        std::vector<double> g(1 + i % 9);
        for (auto& v : g)
            v = db_to_linear(db(rng));
        const double p = required_tx_power(g, p_min);
        const double rx = received_power(*std::min_element(g.begin(), g.end()), p);
        CHECK(std::abs(rx - p_min) <= 1e-12 * p_min);
    }
}

TEST_CASE("total_emitted_power_dbm")
{
    const double one[] = {dbm_to_watts(0.0)};
    CHECK(total_emitted_power_dbm(one) == doctest::Approx(0.0).epsilon(1e-12));
    const double two[] = {dbm_to_watts(0.0), dbm_to_watts(0.0)};
    CHECK(total_emitted_power_dbm(two) == doctest::Approx(3.0103).epsilon(1e-5));
    const double stage5[] = {dbm_to_watts(6.675521), dbm_to_watts(6.675521), dbm_to_watts(-1.66156)};
    CHECK(std::abs(total_emitted_power_dbm(stage5) - 9.993141) < 0.01);
    CHECK_THROWS_AS(total_emitted_power_dbm(std::span<const double>{}), Error);
}

TEST_CASE("total_emitted_power_dbm is permutation-invariant and grows with every device")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> dbm(-30.0, 17.0);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> p(2 + i % 10);
        for (auto& v : p)
            v = dbm_to_watts(dbm(rng));
        const double total = total_emitted_power_dbm(p);
        auto shuffled = p;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(total_emitted_power_dbm(shuffled) == doctest::Approx(total).epsilon(1e-12));
        p.push_back(dbm_to_watts(dbm(rng)));
        CHECK(total_emitted_power_dbm(p) > total);
    }
}

TEST_CASE("dBm and watts round trip")
{
    for (double d = -150.0; d <= 40.0; d += 0.37) {
        CHECK(std::abs(watts_to_dbm(dbm_to_watts(d)) - d) <= 1e-12 * std::max(1.0, std::abs(d)));
        const double w = dbm_to_watts(d);
        CHECK(std::abs(dbm_to_watts(watts_to_dbm(w)) - w) <= 1e-12 * w);
    }
}

TEST_CASE("compute_budget on a star: HUB needs the largest kit power")
{
    std::mt19937_64 rng(5);
    const double p_min = dbm_to_watts(-109.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto t = star(2 + trial % 5);
        const auto m = matrix_for(t, rng);
        const auto b = compute_budget(t, m, p_min);
        REQUIRE(b.entries.size() == t.kit_positions.size() + 1);
        double kit_max = 0.0;
        for (const auto& e : b.entries)
            if (e.role == Role::Kit) {
                CHECK(e.peers == std::vector<std::string>{"hub-0"});
                kit_max = std::max(kit_max, e.required_tx_power);
            }
        const auto* hub = b.find("hub-0");
        REQUIRE(hub != nullptr);
        CHECK(hub->required_tx_power == kit_max);
        CHECK(b.find(hub->worst_peer)->required_tx_power == kit_max);
    }
}

TEST_CASE("compute_budget peer scope")
{
    // kit-0 <-> hub-0 -100 dB, kit-1 <-> hub-0 -90 dB, kit-0 <-> kit-1 -130 dB.
    const auto t = star(2);
    propagation::LinkGainMatrix m;
    m.device_ids = {"kit-0", "kit-1", "hub-0"};
    m.gains.assign(9, 1.0);
    m.at(0, 2) = m.at(2, 0) = db_to_linear(-100.0);
    m.at(1, 2) = m.at(2, 1) = db_to_linear(-90.0);
    m.at(0, 1) = m.at(1, 0) = db_to_linear(-130.0);
    const double p_min = dbm_to_watts(-109.0);

    const auto links = compute_budget(t, m, p_min, PeerScope::Links);
    CHECK(watts_to_dbm(links.find("kit-0")->required_tx_power) == doctest::Approx(-9.0));
    CHECK(watts_to_dbm(links.find("kit-1")->required_tx_power) == doctest::Approx(-19.0));
    CHECK(watts_to_dbm(links.find("hub-0")->required_tx_power) == doctest::Approx(-9.0));
    CHECK(links.find("hub-0")->worst_peer == "kit-0");

    const auto wide = compute_budget(t, m, p_min, PeerScope::Segment);
    CHECK(watts_to_dbm(wide.find("kit-0")->required_tx_power) == doctest::Approx(21.0));
    CHECK(wide.find("kit-0")->worst_peer == "kit-1");

    propagation::LinkGainMatrix partial = m;
    partial.device_ids = {"kit-0", "kit-9", "hub-0"};
    CHECK(code_of([&] { compute_budget(t, partial, p_min); }) == ErrorCode::UnknownDeviceId);
}

TEST_CASE("compute_budget skips cabled kits and dropped HUBs")
{
    topology::SegmentTopology t;
    t.segment_id = "d";
    t.kit_positions.resize(3);
    t.hub_positions.resize(2);
    t.kit_to_hub = {0, 0, std::nullopt};
    t.hub_dropped = {false, true};
    propagation::LinkGainMatrix m;
    m.device_ids = {"kit-0", "kit-1", "hub-0"};
    m.gains = {1, 1e-9, 1e-10, 1e-9, 1, 1e-11, 1e-10, 1e-11, 1};
    const auto b = compute_budget(t, m, dbm_to_watts(-109.0));
    CHECK(b.entries.size() == 3);
    CHECK(b.find("kit-2") == nullptr);
    CHECK(b.find("hub-1") == nullptr);
}

TEST_CASE("check_feasibility")
{
    PowerBudget b;
    b.segment_id = "f";
    b.entries.push_back({"hub-0", Role::Hub, dbm_to_watts(6.68), {}, ""});
    b.entries.push_back({"kit-0", Role::Kit, dbm_to_watts(18.0), {}, ""});
    const auto d = check_feasibility(b, RfDeviceSpec{});
    REQUIRE(d.size() == 2);
    CHECK(d[0].feasible);
    CHECK(d[0].headroom_db == doctest::Approx(10.32));
    CHECK_FALSE(d[1].feasible);
    CHECK(check_feasibility(PowerBudget{}, RfDeviceSpec{}).empty());

    RfDeviceSpec bad;
    bad.sensitivity_dbm = 20.0;
    CHECK(code_of([&] { validate(bad); }) == ErrorCode::InvariantViolation);
}
