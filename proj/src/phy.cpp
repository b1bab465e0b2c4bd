#include "lorawsn/phy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lorawsn/error.hpp"

namespace lorawsn::phy {

namespace {

void fail(const std::string& what) { throw error(error_kind::parameter, what); }

// ceil(num / den) for den > 0 and any sign of num.
std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
  return num >= 0 ? (num + den - 1) / den : -((-num) / den);
}

}  // namespace

void validate(const RadioParams& params) {
  if (params.sf < kMinSpreadingFactor || params.sf > kMaxSpreadingFactor)
    fail("spreading factor must be in 7..12, got " + std::to_string(params.sf));
  if (params.bw_hz != 125000 && params.bw_hz != 250000 && params.bw_hz != 500000)
    fail("bandwidth must be 125000, 250000 or 500000 Hz, got " + std::to_string(params.bw_hz));
  if (params.cr < 1 || params.cr > 4)
    fail("coding rate index must be in 1..4, got " + std::to_string(params.cr));
  if (params.preamble_symbols < 1) fail("preamble_symbols must be >= 1");
  if (!params.explicit_header) fail("implicit header mode is not supported");
  if (params.channel < 0) fail("channel index must be >= 0");
}

AirtimeBreakdown airtime_breakdown(const RadioParams& params, int payload_len) {
  validate(params);
  if (payload_len < 0 || payload_len > 255) fail("payload length must be in [0, 255]");

  // T_sym = 2^sf / bw. For bw in {125, 250, 500} kHz and sf >= 7 this is an
  // integer number of microseconds divisible by 4, so the 0.25-symbol
  // preamble tail is exact as well.
  const std::int64_t sym_us = (std::int64_t{1} << params.sf) * 1'000'000 / params.bw_hz;
  const std::int64_t preamble_us = params.preamble_symbols * sym_us + sym_us / 4 * 17;

  const int de = params.low_data_rate_optimize() ? 1 : 0;
  const int ih = params.explicit_header ? 0 : 1;
  const int crc = params.crc_on ? 1 : 0;
  const std::int64_t num =
      8 * std::int64_t{payload_len} - 4 * params.sf + 28 + 16 * crc - 20 * ih;
  const std::int64_t den = 4 * (params.sf - 2 * de);
  const std::int64_t blocks = std::max<std::int64_t>(ceil_div(num, den), 0);
  const auto payload_symbols = static_cast<int>(8 + blocks * (params.cr + 4));

  return AirtimeBreakdown{
      .symbol = microseconds{sym_us},
      .preamble = microseconds{preamble_us},
      .payload_symbols = payload_symbols,
      .total = microseconds{preamble_us + payload_symbols * sym_us},
  };
}

microseconds time_on_air(const RadioParams& params, int payload_len) {
  return airtime_breakdown(params, payload_len).total;
}

double snr_limit_db(int sf) {
  if (sf < kMinSpreadingFactor || sf > kMaxSpreadingFactor)
    fail("spreading factor must be in 7..12, got " + std::to_string(sf));
  // -7.5 dB at SF7, 2.5 dB lower per step.
  return -7.5 - 2.5 * (sf - kMinSpreadingFactor);
}

double noise_floor_dbm(std::int32_t bw_hz) {
  if (bw_hz <= 0) fail("bandwidth must be positive");
  return -174.0 + 10.0 * std::log10(static_cast<double>(bw_hz)) + kNoiseFigureDb;
}

double sensitivity_dbm(int sf, std::int32_t bw_hz) {
  RadioParams p;
  p.sf = sf;
  p.bw_hz = bw_hz;
  validate(p);
  return noise_floor_dbm(bw_hz) + snr_limit_db(sf);
}

void validate(const PathLossModel& model) {
  if (!(model.exponent > 0.0)) fail("path loss exponent must be > 0");
  if (!(model.pl0_db > 0.0)) fail("pl0_db must be > 0");
  if (!(model.d0_m > 0.0)) fail("d0_m must be > 0");
}

double free_space_path_loss_db(double distance_m, double carrier_hz) {
  if (!(distance_m > 0.0) || !(carrier_hz > 0.0))
    throw error(error_kind::domain, "free-space loss needs positive distance and frequency");
  constexpr double c = 299'792'458.0;
  return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * carrier_hz / c);
}

double path_loss_db(double distance_m, const PathLossModel& model) {
  validate(model);
  if (!(distance_m >= model.d0_m))
    throw error(error_kind::domain, "distance " + std::to_string(distance_m) +
                                        " m is below the reference distance");
  return model.pl0_db + 10.0 * model.exponent * std::log10(distance_m / model.d0_m) +
         model.wall_penalty_db;
}

double received_power_dbm(double tx_power_dbm, double distance_m, const PathLossModel& model) {
  return tx_power_dbm - path_loss_db(distance_m, model);
}

double link_margin_db(double tx_power_dbm, double distance_m, const PathLossModel& model, int sf,
                      std::int32_t bw_hz) {
  return received_power_dbm(tx_power_dbm, distance_m, model) - sensitivity_dbm(sf, bw_hz);
}

BudgetSummary budget_summary(int tx_power_dbm, int device_sensitivity_dbm,
                             int fsk_sensitivity_dbm) {
  return BudgetSummary{
      .max_coupling_loss_db = tx_power_dbm - device_sensitivity_dbm,
      .fsk_sensitivity_delta_db = fsk_sensitivity_dbm - device_sensitivity_dbm,
  };
}

}  // namespace lorawsn::phy
