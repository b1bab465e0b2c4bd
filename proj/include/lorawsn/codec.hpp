#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lorawsn::codec {

inline constexpr std::size_t kPayloadSize = 8;
inline constexpr std::size_t kFrameSize = 21;
inline constexpr std::size_t kMicInputSize = 17;
inline constexpr std::uint8_t kFPort = 1;

enum class MHdr : std::uint8_t {
  unconfirmed_up = 0x40,
  confirmed_up = 0x80,
};

using DeviceKey = std::array<std::uint8_t, 16>;
using Mic = std::array<std::uint8_t, 4>;
using CmacTag = std::array<std::uint8_t, 16>;
using PayloadBytes = std::array<std::uint8_t, kPayloadSize>;
using FrameBytes = std::array<std::uint8_t, kFrameSize>;

struct SensorPayload {
  std::int16_t temp_centi_c = 0;
  std::uint16_t rh_centi_pct = 0;
  std::uint16_t battery_mv = 0;
  std::uint16_t conflict_counter = 0;

  double temp_c() const { return temp_centi_c / 100.0; }
  double rh_pct() const { return rh_centi_pct / 100.0; }
  // Decoded values outside the physical range are flagged, not rejected.
  bool rh_in_range() const { return rh_centi_pct <= 10000; }

  bool operator==(const SensorPayload&) const = default;
};

struct UplinkFrame {
  MHdr mhdr = MHdr::confirmed_up;
  std::uint32_t dev_addr = 0;
  std::uint8_t fctrl = 0;
  std::uint16_t fcnt = 0;
  std::uint8_t fport = kFPort;
  SensorPayload payload;
  Mic mic{};

  bool confirmed() const { return mhdr == MHdr::confirmed_up; }
  bool operator==(const UplinkFrame&) const = default;
};

PayloadBytes encode_payload(const SensorPayload& m);
SensorPayload decode_payload(std::span<const std::uint8_t> bytes);

// Full 128-bit AES-CMAC tag (RFC 4493).
CmacTag aes_cmac(const DeviceKey& key, std::span<const std::uint8_t> message);

// First four bytes of AES-CMAC over the 17 bytes MHDR..FRMPayload.
Mic compute_mic(std::span<const std::uint8_t> header_and_payload, const DeviceKey& key);

FrameBytes encode_frame(const SensorPayload& m, std::uint32_t dev_addr, std::uint16_t fcnt,
                        bool confirmed, const DeviceKey& key);

using KeyLookup = std::function<std::optional<DeviceKey>(std::uint32_t dev_addr)>;

// Verifies length, header fields and MIC before returning; throws
// error(framing | unknown_device | integrity).
UplinkFrame decode_frame(std::span<const std::uint8_t> bytes, const KeyLookup& key_lookup);

// Reads the little-endian DevAddr from a frame without verifying it.
std::optional<std::uint32_t> peek_dev_addr(std::span<const std::uint8_t> bytes);

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Returns nullopt on any malformed input.
std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::optional<std::vector<std::uint8_t>> from_hex(std::string_view text);

// Deterministic per-device key derivation: AES-CMAC(network_key, dev_addr LE).
DeviceKey derive_device_key(const DeviceKey& network_key, std::uint32_t dev_addr);

}  // namespace lorawsn::codec
