#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "lorawsn/simcore.hpp"

namespace lorawsn::sim {

inline constexpr std::uint32_t kDefaultDevAddrBase = 0x26011000;

// 20 nodes, 30 s period, SF7/125 kHz/CR 4/5, 8 channels, 30 days, confirmed
// uplinks with up to 8 transmissions.
Scenario default_scenario(int node_count = 20);

// INI-style scenario file:
//
//   [scenario]        nodes, channels, duration_s, seed, capture_threshold_db,
//                     start_time, ack_window, forward_crc_errors, network_key,
//                     dev_addr_base, duty_window_s, duty_max_fraction,
//                     force_loss, reboot
//   [node]            defaults applied to every node
//   [node.<index>]    per-node overrides
//   [path_loss]       pl0_db, d0_m, exponent
//   [energy]          sleep_ua, mcu_run_ma, analog_ma, tx_ma, rx_ma, supply_v, derating
//   [sensor]          base_c, spread_c, amplitude_c, noise_c, rh_base_pct,
//                     rh_amplitude_pct, rh_noise_pct
//
// Every key has a default; unknown sections or keys are config errors.
Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::filesystem::path& path);

// Canonical key=value rendering of every effective setting; stable across
// runs and used for the run-header configuration hash.
std::string canonical_dump(const Scenario& scenario);
std::uint64_t config_hash(const Scenario& scenario);

}  // namespace lorawsn::sim
