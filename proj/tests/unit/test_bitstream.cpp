#include <doctest.h>

#include <cstring>

#include "lwvc/bitstream.hpp"
#include "lwvc/codec.hpp"
#include "lwvc/error.hpp"
#include "support/synthetic.hpp"

using namespace lwvc;

namespace {

std::vector<CodedUnit> gop_units(int gop_size, std::uint32_t first) {
  const int levels = log2_exact(gop_size);
  std::vector<CodedUnit> units;
  units.push_back({UnitType::GopHeader, static_cast<std::uint8_t>(levels), 0,
                   encode_gop_header({static_cast<std::uint16_t>(gop_size), static_cast<std::uint8_t>(levels), first, 8})});
  units.push_back({UnitType::Lowpass, static_cast<std::uint8_t>(levels), 0, {1, 2, 3}});
  for (int j = levels; j >= 1; --j) {
    for (int i = 0; i < (gop_size >> j); ++i) {
      units.push_back({UnitType::Motion, static_cast<std::uint8_t>(j), static_cast<std::uint16_t>(i), {9}});
      units.push_back({UnitType::Highpass, static_cast<std::uint8_t>(j), static_cast<std::uint16_t>(i),
                       std::vector<std::uint8_t>(static_cast<std::size_t>(j + i), 7)});
    }
  }
  return units;
}

StreamHeader sample_header(std::uint32_t frames) {
  StreamHeader h;
  h.width = 64;
  h.height = 48;
  h.frame_count = frames;
  h.q_fixed = 10 * 256;
  h.gop_mode = 8;
  return h;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace

TEST_SUITE("bitstream") {
  TEST_CASE("write and parse are inverse") {
    auto units = gop_units(8, 0);
    const auto more = gop_units(8, 8);
    units.insert(units.end(), more.begin(), more.end());
    const StreamHeader h = sample_header(16);
    const auto bytes = write_stream(h, units);
    CHECK(std::memcmp(bytes.data(), "LWVC", 4) == 0);
    const ParsedStream p = parse_stream(bytes);
    CHECK(p.header == h);
    CHECK(p.units == units);
    CHECK(write_stream(p.header, p.units) == bytes);
    const auto gops = split_gops(p);
    REQUIRE(gops.size() == 2);
    CHECK(gops[1].header.first_frame == 8);
    CHECK(gops[0].dropped == 0);
  }

  TEST_CASE("header validation") {
    auto bytes = write_stream(sample_header(8), gop_units(8, 0));
    auto bad = bytes;
    std::memcpy(bad.data(), "XXXX", 4);
    CHECK(kind_of([&] { parse_stream(bad); }) == ErrorKind::Format);
    bad = bytes;
    bad[4] = 9;
    CHECK(kind_of([&] { parse_stream(bad); }) == ErrorKind::Unsupported);
    bad = bytes;
    bad.resize(bad.size() - 1);
    CHECK(kind_of([&] { parse_stream(bad); }) == ErrorKind::Corruption);
  }

  TEST_CASE("ordering is validated") {
    auto units = gop_units(4, 0);
    std::swap(units[2], units[units.size() - 1]);  // a level-1 unit before level 2
    CHECK(kind_of([&] { parse_stream(write_stream(sample_header(4), units)); }) == ErrorKind::Corruption);
  }

  TEST_CASE("dropping layers") {
    const auto bytes = write_stream(sample_header(8), gop_units(8, 0));
    CHECK(drop_layers(bytes, 0) == bytes);
    const ParsedStream d3 = parse_stream(drop_layers(bytes, 3));
    CHECK(d3.header.frame_count == 1);
    CHECK(d3.header.rate_num * 8 == 30 * d3.header.rate_den);
    REQUIRE(d3.units.size() == 2);
    CHECK(d3.units[1].type == UnitType::Lowpass);
    const ParsedStream d1 = parse_stream(drop_layers(bytes, 1));
    CHECK(d1.header.frame_count == 4);
    CHECK(split_gops(d1)[0].dropped == 1);
    for (const auto& u : d1.units) CHECK((u.type == UnitType::GopHeader || u.type == UnitType::Lowpass || u.temporal_level >= 2));
    CHECK(drop_layers(drop_layers(bytes, 1), 2) == drop_layers(bytes, 2));
    CHECK(kind_of([&] { drop_layers(bytes, 4); }) == ErrorKind::Argument);
  }

  TEST_CASE("dropping level 1 of a coded GOP decodes at half rate") {
    const auto clip = testing::natural_clip(32, 32, 8, 1);
    CodecConfig cfg;
    cfg.gop.fixed_size = 8;
    cfg.quant.q = 8.0;
    const EncodeResult r = encode_sequence_detailed(clip, cfg, true);
    const VideoSequence half = decode_sequence(drop_layers(r.bytes, 1));
    CHECK(half.size() == 4);
    CHECK(half.frame_rate().fps() == doctest::Approx(15.0));
    const auto expect = reconstruct_gop(r.gops[0].decoded, 1);
    for (std::size_t i = 0; i < 4; ++i) CHECK(half.frame(i) == frame_from_clipped(expect[i], 8));
  }

  TEST_CASE("unit table dump") {
    const auto text = dump_units(parse_stream(write_stream(sample_header(2), gop_units(2, 0))));
    CHECK(text.find("gop_header") != std::string::npos);
    CHECK(text.find("highpass") != std::string::npos);
    CHECK(text.find("motion") != std::string::npos);
  }
}
