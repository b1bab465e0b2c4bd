#include "lorawsn/codec.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <memory>

#include "lorawsn/error.hpp"

namespace lorawsn::codec {

namespace {

using Block = std::array<std::uint8_t, 16>;

void put_u16(std::uint8_t* out, std::uint16_t v) {
  out[0] = static_cast<std::uint8_t>(v & 0xFF);
  out[1] = static_cast<std::uint8_t>(v >> 8);
}

std::uint16_t get_u16(const std::uint8_t* in) {
  return static_cast<std::uint16_t>(in[0] | (in[1] << 8));
}

void put_u32(std::uint8_t* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_u32(const std::uint8_t* in) {
  return static_cast<std::uint32_t>(in[0]) | static_cast<std::uint32_t>(in[1]) << 8 |
         static_cast<std::uint32_t>(in[2]) << 16 | static_cast<std::uint32_t>(in[3]) << 24;
}

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};

// Single-block AES-128 encryption under one key.
class Aes128 {
 public:
  explicit Aes128(const DeviceKey& key) : ctx_(EVP_CIPHER_CTX_new()) {
    if (!ctx_ || EVP_EncryptInit_ex(ctx_.get(), EVP_aes_128_ecb(), nullptr, key.data(), nullptr) != 1)
      throw std::runtime_error("AES-128 initialisation failed");
    EVP_CIPHER_CTX_set_padding(ctx_.get(), 0);
  }

  Block encrypt(const Block& in) const {
    Block out{};
    int len = 0;
    if (EVP_EncryptUpdate(ctx_.get(), out.data(), &len, in.data(), static_cast<int>(in.size())) != 1 ||
        len != 16)
      throw std::runtime_error("AES-128 block encryption failed");
    return out;
  }

 private:
  std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx_;
};

// Doubling in GF(2^128) with the CMAC reduction constant.
Block dbl(const Block& in) {
  Block out{};
  std::uint8_t carry = 0;
  for (int i = 15; i >= 0; --i) {
    out[i] = static_cast<std::uint8_t>((in[i] << 1) | carry);
    carry = in[i] >> 7;
  }
  if (carry) out[15] ^= 0x87;
  return out;
}

}  // namespace

PayloadBytes encode_payload(const SensorPayload& m) {
  if (!m.rh_in_range())
    throw error(error_kind::parameter,
                "relative humidity " + std::to_string(m.rh_centi_pct) + " centi-% exceeds 10000");
  PayloadBytes out{};
  put_u16(&out[0], static_cast<std::uint16_t>(m.temp_centi_c));
  put_u16(&out[2], m.rh_centi_pct);
  put_u16(&out[4], m.battery_mv);
  put_u16(&out[6], m.conflict_counter);
  return out;
}

SensorPayload decode_payload(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kPayloadSize)
    throw error(error_kind::framing,
                "sensor payload must be 8 bytes, got " + std::to_string(bytes.size()));
  return SensorPayload{
      .temp_centi_c = static_cast<std::int16_t>(get_u16(&bytes[0])),
      .rh_centi_pct = get_u16(&bytes[2]),
      .battery_mv = get_u16(&bytes[4]),
      .conflict_counter = get_u16(&bytes[6]),
  };
}

CmacTag aes_cmac(const DeviceKey& key, std::span<const std::uint8_t> message) {
  const Aes128 aes(key);
  const Block k1 = dbl(aes.encrypt(Block{}));
  const Block k2 = dbl(k1);

  const std::size_t n = message.empty() ? 1 : (message.size() + 15) / 16;
  const bool complete = !message.empty() && message.size() % 16 == 0;

  Block x{};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = 0; j < 16; ++j) x[j] ^= message[i * 16 + j];
    x = aes.encrypt(x);
  }

  Block last{};
  const std::size_t tail = message.size() - (n - 1) * 16;
  std::copy_n(message.begin() + static_cast<std::ptrdiff_t>((n - 1) * 16), tail, last.begin());
  if (complete) {
    for (std::size_t j = 0; j < 16; ++j) last[j] ^= k1[j];
  } else {
    last[tail] = 0x80;
    for (std::size_t j = 0; j < 16; ++j) last[j] ^= k2[j];
  }
  for (std::size_t j = 0; j < 16; ++j) x[j] ^= last[j];
  return aes.encrypt(x);
}

Mic compute_mic(std::span<const std::uint8_t> header_and_payload, const DeviceKey& key) {
  const CmacTag tag = aes_cmac(key, header_and_payload);
  Mic mic{};
  std::copy_n(tag.begin(), mic.size(), mic.begin());
  return mic;
}

FrameBytes encode_frame(const SensorPayload& m, std::uint32_t dev_addr, std::uint16_t fcnt,
                        bool confirmed, const DeviceKey& key) {
  FrameBytes out{};
  out[0] = static_cast<std::uint8_t>(confirmed ? MHdr::confirmed_up : MHdr::unconfirmed_up);
  put_u32(&out[1], dev_addr);
  out[5] = 0x00;  // FCtrl
  put_u16(&out[6], fcnt);
  out[8] = kFPort;
  const PayloadBytes payload = encode_payload(m);
  std::copy(payload.begin(), payload.end(), out.begin() + 9);
  const Mic mic = compute_mic(std::span(out).first(kMicInputSize), key);
  std::copy(mic.begin(), mic.end(), out.begin() + kMicInputSize);
  return out;
}

std::optional<std::uint32_t> peek_dev_addr(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kFrameSize) return std::nullopt;
  return get_u32(&bytes[1]);
}

UplinkFrame decode_frame(std::span<const std::uint8_t> bytes, const KeyLookup& key_lookup) {
  if (bytes.size() != kFrameSize)
    throw error(error_kind::framing, "uplink frame must be 21 bytes, got " + std::to_string(bytes.size()));
  if (bytes[0] != static_cast<std::uint8_t>(MHdr::unconfirmed_up) &&
      bytes[0] != static_cast<std::uint8_t>(MHdr::confirmed_up))
    throw error(error_kind::framing, "unsupported MHDR " + to_hex(bytes.first(1)));
  if (bytes[8] != kFPort) throw error(error_kind::framing, "unexpected FPort " + to_hex(bytes.subspan(8, 1)));

  const std::uint32_t dev_addr = get_u32(&bytes[1]);
  const std::optional<DeviceKey> key = key_lookup(dev_addr);
  if (!key) throw error(error_kind::unknown_device, "unknown device " + to_hex(bytes.subspan(1, 4)));

  const Mic expected = compute_mic(bytes.first(kMicInputSize), *key);
  if (!std::equal(expected.begin(), expected.end(), bytes.begin() + kMicInputSize))
    throw error(error_kind::integrity, "MIC mismatch");

  UplinkFrame frame;
  frame.mhdr = static_cast<MHdr>(bytes[0]);
  frame.dev_addr = dev_addr;
  frame.fctrl = bytes[5];
  frame.fcnt = get_u16(&bytes[6]);
  frame.fport = bytes[8];
  frame.payload = decode_payload(bytes.subspan(9, kPayloadSize));
  std::copy_n(bytes.begin() + kMicInputSize, 4, frame.mic.begin());
  return frame;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text) {
  if (text.empty()) return std::vector<std::uint8_t>{};
  if (text.size() % 4 != 0) return std::nullopt;
  const bool valid = std::all_of(text.begin(), text.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           c == '+' || c == '/' || c == '=';
  });
  if (!valid) return std::nullopt;
  std::size_t pad = 0;
  if (text.back() == '=') ++pad;
  if (text.size() >= 2 && text[text.size() - 2] == '=') ++pad;
  // '=' is only legal as trailing padding.
  if (text.substr(0, text.size() - pad).find('=') != std::string_view::npos) return std::nullopt;

  std::vector<std::uint8_t> out(text.size() / 4 * 3);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) return std::nullopt;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

std::optional<std::vector<std::uint8_t>> from_hex(std::string_view text) {
  if (text.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 2);
  for (std::size_t i = 0; i < text.size(); i += 2) {
    const int hi = nibble(text[i]);
    const int lo = nibble(text[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

DeviceKey derive_device_key(const DeviceKey& network_key, std::uint32_t dev_addr) {
  std::array<std::uint8_t, 4> addr{};
  put_u32(addr.data(), dev_addr);
  return aes_cmac(network_key, addr);
}

}  // namespace lorawsn::codec
