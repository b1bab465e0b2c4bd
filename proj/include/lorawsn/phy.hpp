#pragma once

#include <chrono>
#include <cstdint>

namespace lorawsn::phy {

using microseconds = std::chrono::microseconds;

inline constexpr int kMinSpreadingFactor = 7;
inline constexpr int kMaxSpreadingFactor = 12;

// Reference figures used by the link-budget calculator.
inline constexpr int kDeviceSensitivityDbm = -148;  // transceiver datasheet headline
inline constexpr int kFskSensitivityDbm = -122;     // FSK at 1.2 kbps
inline constexpr int kMaxTxPowerDbm = 20;
inline constexpr double kNoiseFigureDb = 6.0;
inline constexpr double kCarrierHz = 868.0e6;

struct RadioParams {
  int sf = 7;
  std::int32_t bw_hz = 125000;
  int cr = 1;  // 1..4 meaning 4/5..4/8
  int preamble_symbols = 8;
  bool explicit_header = true;
  bool crc_on = true;
  double tx_power_dbm = 10.0;
  int channel = 0;

  // Low-data-rate optimisation is mandated for SF11/SF12 at 125 kHz.
  bool low_data_rate_optimize() const { return bw_hz == 125000 && sf >= 11; }

  bool operator==(const RadioParams&) const = default;
};

// Throws error(parameter) when a field is outside its legal set.
void validate(const RadioParams& params);

struct AirtimeBreakdown {
  microseconds symbol;
  microseconds preamble;
  int payload_symbols;
  microseconds total;
};

// LoRa time-on-air (Semtech modem-design formula), evaluated in integer
// arithmetic. Every legal (sf, bw) yields a whole number of microseconds.
AirtimeBreakdown airtime_breakdown(const RadioParams& params, int payload_len);
microseconds time_on_air(const RadioParams& params, int payload_len);

inline double to_seconds(microseconds us) { return static_cast<double>(us.count()) * 1e-6; }

// Demodulator SNR floor per spreading factor (dB).
double snr_limit_db(int sf);

// -174 + 10 log10(bw) + NF + SNR_limit(sf)
double sensitivity_dbm(int sf, std::int32_t bw_hz);

// Thermal noise floor at the receiver input, including the noise figure.
double noise_floor_dbm(std::int32_t bw_hz);

struct PathLossModel {
  double pl0_db = 31.2;
  double d0_m = 1.0;
  double exponent = 3.0;
  double wall_penalty_db = 0.0;
};

void validate(const PathLossModel& model);

// Friis free-space loss, used to derive pl0 at the reference distance.
double free_space_path_loss_db(double distance_m, double carrier_hz = kCarrierHz);

// Log-distance model: pl0 + 10 n log10(d / d0) + wall penalty.
double path_loss_db(double distance_m, const PathLossModel& model);

double received_power_dbm(double tx_power_dbm, double distance_m, const PathLossModel& model);

// tx - path_loss(d) - sensitivity(sf, bw); receivable iff >= 0.
double link_margin_db(double tx_power_dbm, double distance_m, const PathLossModel& model, int sf,
                      std::int32_t bw_hz);

inline bool receivable(double margin_db) { return margin_db >= 0.0; }

// Integer link-budget figures for the `budget` calculator.
struct BudgetSummary {
  int max_coupling_loss_db;    // tx power - device sensitivity
  int fsk_sensitivity_delta_db;  // FSK reference - device sensitivity
};

BudgetSummary budget_summary(int tx_power_dbm, int device_sensitivity_dbm,
                             int fsk_sensitivity_dbm);

}  // namespace lorawsn::phy
