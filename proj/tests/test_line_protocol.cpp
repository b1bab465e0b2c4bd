#include <doctest.h>

#include "lorawsn/line_protocol.hpp"
#include "lorawsn/timefmt.hpp"

using namespace lorawsn;

TEST_CASE("iso8601") {
  CHECK(format_iso8601(0) == "1970-01-01T00:00:00.000000Z");
  CHECK(format_iso8601(1546300800LL * 1'000'000 + 1'631'394) == "2019-01-01T00:00:01.631394Z");
  CHECK(format_iso8601(-1) == "1969-12-31T23:59:59.999999Z");
  CHECK(parse_iso8601("2019-01-01T00:00:01.631394Z") == 1546300800LL * 1'000'000 + 1'631'394);
  CHECK(parse_iso8601("2019-01-01T00:00:01Z") == 1546300801LL * 1'000'000);
  CHECK(parse_iso8601("2019-01-01T00:00:01.5Z") == 1546300801LL * 1'000'000 + 500'000);
  CHECK(parse_iso8601("2020-02-29T12:00:00Z").has_value());
  CHECK_FALSE(parse_iso8601("2019-02-29T12:00:00Z").has_value());
  CHECK_FALSE(parse_iso8601("2019-01-01T00:00:01").has_value());
  CHECK_FALSE(parse_iso8601("2019-01-01 00:00:01Z").has_value());
  CHECK_FALSE(parse_iso8601("2019-01-01T24:00:00Z").has_value());
  CHECK_FALSE(parse_iso8601("2019-01-01T00:00:00.1234567Z").has_value());
  for (UnixMicros t : {0LL, 1546300800123456LL, 4102444799999999LL, -86400000000LL})
    CHECK(parse_iso8601(format_iso8601(t)) == t);
  CHECK(day_stamp(1546300800LL * 1'000'000 - 1) == "20181231");
  CHECK(day_stamp(1546300800LL * 1'000'000) == "20190101");
}

TEST_CASE("gateway line round trip") {
  GatewayLine l;
  l.ts = 1546300800LL * 1'000'000 + 42;
  l.rssi_dbm = -85;
  l.snr_db = 32.5;
  l.channel = 3;
  l.sf = 7;
  l.frame.assign(21, 0xab);
  const std::string text = format_gateway_line(l);
  CHECK(text.starts_with("ts=2019-01-01T00:00:00.000042Z rssi=-85 snr=32.5 chan=3 sf=7 frame="));
  CHECK(text.find("crc=") == std::string::npos);
  const auto parsed = parse_gateway_line(text);
  REQUIRE(std::holds_alternative<GatewayLine>(parsed));
  CHECK(std::get<GatewayLine>(parsed) == l);

  l.crc_ok = false;
  const auto bad = parse_gateway_line(format_gateway_line(l));
  REQUIRE(std::holds_alternative<GatewayLine>(bad));
  CHECK_FALSE(std::get<GatewayLine>(bad).crc_ok);
}

TEST_CASE("gateway line parsing is order-insensitive and ignores unknown keys") {
  const std::string a = "ts=2019-01-01T00:00:00Z rssi=-90 snr=-2.5 chan=0 sf=7 frame=q6urq6urq6urq6urq6urq6urq6ur";
  const std::string b = "gw=x frame=q6urq6urq6urq6urq6urq6urq6ur  sf=7\tchan=0 snr=-2.5 rssi=-90 ts=2019-01-01T00:00:00Z";
  const auto pa = parse_gateway_line(a);
  const auto pb = parse_gateway_line(b);
  REQUIRE(std::holds_alternative<GatewayLine>(pa));
  REQUIRE(std::holds_alternative<GatewayLine>(pb));
  CHECK(std::get<GatewayLine>(pa) == std::get<GatewayLine>(pb));
  CHECK(std::get<GatewayLine>(pa).snr_db == doctest::Approx(-2.5));
}

TEST_CASE("malformed gateway lines") {
  for (const char* text : {
           "",
           "garbage",
           "rssi=-90 snr=1 chan=0 sf=7 frame=q6urq6urq6urq6urq6urq6urq6ur",
           "ts=2019-01-01T00:00:00Z rssi=x snr=1 chan=0 sf=7 frame=q6urq6urq6urq6urq6urq6urq6ur",
           "ts=2019-01-01T00:00:00Z rssi=-90 snr=1 chan=0 sf=7 frame=!!!",
           "ts=2019-01-01T00:00:00Z rssi=-90 snr=1 chan=0 sf=7 frame=q6urq6ur",
           "ts=2019-01-01T00:00:00Z rssi=-90 snr=1 chan=0 sf=7",
       }) {
    INFO(text);
    CHECK(std::holds_alternative<LineParseError>(parse_gateway_line(text)));
  }
}

TEST_CASE("split_fields") {
  const auto f = split_fields("a=1  b=  c d=x=y");
  REQUIRE(f.size() == 4);
  CHECK(f[0].first == "a");
  CHECK(f[0].second == "1");
  CHECK(f[1].second == "");
  CHECK(f[2].first == "c");
  CHECK(f[3].second == "x=y");
}
