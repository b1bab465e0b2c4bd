#include <doctest.h>

#include <map>

#include "lorawsn/codec.hpp"
#include "lorawsn/error.hpp"
#include "lorawsn/rng.hpp"

using namespace lorawsn;
using namespace lorawsn::codec;

namespace {

std::vector<std::uint8_t> hex(std::string_view s) { return *from_hex(s); }

DeviceKey key_from(std::string_view s) {
  DeviceKey k{};
  const auto v = hex(s);
  std::copy(v.begin(), v.end(), k.begin());
  return k;
}

SensorPayload random_payload(Rng& rng) {
  return SensorPayload{
      .temp_centi_c = static_cast<std::int16_t>(rng()),
      .rh_centi_pct = static_cast<std::uint16_t>(uniform_index(rng, 10001)),
      .battery_mv = static_cast<std::uint16_t>(rng()),
      .conflict_counter = static_cast<std::uint16_t>(rng()),
  };
}

}  // namespace

TEST_CASE("RFC 4493 AES-CMAC vectors") {
  const DeviceKey k = key_from("2b7e151628aed2a6abf7158809cf4f3c");
  const std::string msg =
      "6bc1bee22e409f96e93d7e117393172aae2d8a571e03ac9c9eb76fac45af8e51"
      "30c81c46a35ce411e5fbc1191a0a52eff69f2445df4f9b17ad2b417be66c3710";
  const std::vector<std::pair<std::size_t, std::string>> cases{
      {0, "bb1d6929e95937287fa37d129b756746"},
      {16, "070a16b46b4d4144f79bdd9dd04a287c"},
      {40, "dfa66747de9ae63030ca32611497c827"},
      {64, "51f0bebf7e3b9d92fc49741779363cfe"},
  };
  for (const auto& [len, tag] : cases) {
    const auto m = hex(msg.substr(0, 2 * len));
    CHECK(to_hex(aes_cmac(k, m)) == tag);
  }
}

TEST_CASE("golden payload bytes") {
  CHECK(to_hex(encode_payload({2500, 4500, 3600, 3})) == "c4099411100e0300");
  CHECK(to_hex(encode_payload({-1, 0, 0, 0})) == "ffff000000000000");
  CHECK(to_hex(encode_payload({3210, 3855, 4125, 65535})) == "8a0c0f0f1d10ffff");
  CHECK(decode_payload(hex("c4099411100e0300")) == SensorPayload{2500, 4500, 3600, 3});
  CHECK(decode_payload(hex("ffff000000000000")).temp_c() == doctest::Approx(-0.01));
}

TEST_CASE("payload validation") {
  CHECK_THROWS_AS(encode_payload({0, 10001, 0, 0}), error);
  CHECK_NOTHROW(encode_payload({0, 10000, 0, 0}));
  CHECK_THROWS_AS(decode_payload(hex("00000000000000")), error);
  // Out-of-range humidity on the wire decodes but is flagged.
  CHECK_FALSE(decode_payload(hex("0000ffff00000000")).rh_in_range());
}

TEST_CASE("frame layout") {
  const DeviceKey k = key_from("000102030405060708090a0b0c0d0e0f");
  const FrameBytes f = encode_frame({2500, 4500, 3600, 3}, 0x26011003, 0x1234, true, k);
  CHECK(to_hex(std::span(f).first(9)) == "800310012600341201");
  CHECK(to_hex(std::span(f).subspan(9, 8)) == "c4099411100e0300");
  const auto mic = compute_mic(std::span(f).first(kMicInputSize), k);
  CHECK(std::equal(mic.begin(), mic.end(), f.begin() + 17));
  const CmacTag full = aes_cmac(k, std::span(f).first(kMicInputSize));
  CHECK(std::equal(mic.begin(), mic.end(), full.begin()));

  CHECK(encode_frame({}, 1, 0, false, k)[0] == 0x40);
  CHECK(peek_dev_addr(f) == 0x26011003u);
  CHECK_FALSE(peek_dev_addr(std::span(f).first(20)).has_value());
}

TEST_CASE("frame round trip, 10000 cases") {
  Rng rng = make_stream(7, 1);
  std::map<std::uint32_t, DeviceKey> keys;
  for (int i = 0; i < 10000; ++i) {
    const auto addr = static_cast<std::uint32_t>(rng());
    DeviceKey k{};
    for (auto& b : k) b = static_cast<std::uint8_t>(rng());
    keys[addr] = k;
    const SensorPayload p = random_payload(rng);
    const auto fcnt = static_cast<std::uint16_t>(rng());
    const bool confirmed = rng() & 1;
    const FrameBytes f = encode_frame(p, addr, fcnt, confirmed, k);
    CHECK(decode_payload(encode_payload(p)) == p);
    const UplinkFrame u = decode_frame(f, [&](std::uint32_t a) -> std::optional<DeviceKey> {
      if (auto it = keys.find(a); it != keys.end()) return it->second;
      return std::nullopt;
    });
    REQUIRE(u.dev_addr == addr);
    CHECK(u.fcnt == fcnt);
    CHECK(u.payload == p);
    CHECK(u.confirmed() == confirmed);
    const auto b64 = base64_encode(f);
    const auto back = base64_decode(b64);
    REQUIRE(back.has_value());
    CHECK(std::equal(back->begin(), back->end(), f.begin(), f.end()));
  }
}

TEST_CASE("tampered frames are never accepted") {
  Rng rng = make_stream(11, 2);
  const DeviceKey k = key_from("000102030405060708090a0b0c0d0e0f");
  const std::uint32_t addr = 0x26011000;
  const auto lookup = [&](std::uint32_t a) -> std::optional<DeviceKey> {
    return a == addr ? std::optional(k) : std::nullopt;
  };
  int accepted = 0;
  for (int i = 0; i < 10000; ++i) {
    FrameBytes f = encode_frame(random_payload(rng), addr, static_cast<std::uint16_t>(rng()), true, k);
    const FrameBytes orig = f;
    const int flips = 1 + static_cast<int>(uniform_index(rng, 4));
    for (int j = 0; j < flips; ++j)
      f[uniform_index(rng, kFrameSize)] ^= static_cast<std::uint8_t>(1u << uniform_index(rng, 8));
    if (f == orig) continue;
    try {
      decode_frame(f, lookup);
      ++accepted;
    } catch (const error& e) {
      const auto kind = e.kind();
      CHECK((kind == error_kind::integrity || kind == error_kind::framing || kind == error_kind::unknown_device));
    }
  }
  CHECK(accepted == 0);
}

TEST_CASE("decode errors") {
  const DeviceKey k{};
  const auto lookup = [&](std::uint32_t) -> std::optional<DeviceKey> { return k; };
  const auto none = [](std::uint32_t) -> std::optional<DeviceKey> { return std::nullopt; };
  FrameBytes f = encode_frame({}, 5, 1, true, k);
  CHECK_NOTHROW(decode_frame(f, lookup));

  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const error& e) {
      return e.kind();
    }
    FAIL("no error");
    return error_kind::io;
  };
  CHECK(kind_of([&] { decode_frame(std::span(f).first(20), lookup); }) == error_kind::framing);
  CHECK(kind_of([&] { decode_frame(f, none); }) == error_kind::unknown_device);
  FrameBytes g = f;
  g[0] = 0x60;
  CHECK(kind_of([&] { decode_frame(g, lookup); }) == error_kind::framing);
  g = f;
  g[8] = 2;
  CHECK(kind_of([&] { decode_frame(g, lookup); }) == error_kind::framing);
  g = f;
  g[20] ^= 1;
  CHECK(kind_of([&] { decode_frame(g, lookup); }) == error_kind::integrity);
}

TEST_CASE("base64 and hex helpers") {
  CHECK(base64_encode(hex("")) == "");
  CHECK(base64_encode(hex("66")) == "Zg==");
  CHECK(base64_encode(hex("666f6f626172")) == "Zm9vYmFy");
  CHECK(base64_decode("Zm9vYmE=") == hex("666f6f6261"));
  CHECK_FALSE(base64_decode("Zm9v!mE=").has_value());
  CHECK_FALSE(base64_decode("Zm9").has_value());
  CHECK(to_hex(hex("00ff10")) == "00ff10");
  CHECK(from_hex("00FF10") == hex("00ff10"));
  CHECK_FALSE(from_hex("0").has_value());
  CHECK_FALSE(from_hex("zz").has_value());
}

TEST_CASE("device key derivation") {
  const DeviceKey nk = key_from("000102030405060708090a0b0c0d0e0f");
  const DeviceKey a = derive_device_key(nk, 0x26011000);
  CHECK(a == derive_device_key(nk, 0x26011000));
  CHECK(a != derive_device_key(nk, 0x26011001));
  const std::uint8_t le[4] = {0x00, 0x10, 0x01, 0x26};
  CHECK(a == aes_cmac(nk, le));
}
