#include <doctest.h>

#include <cstring>
#include <random>
#include <string>

#include "lwvc/error.hpp"
#include "lwvc/media_io.hpp"
#include "support/synthetic.hpp"

using namespace lwvc;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

// Minimal Y4M writer that shares nothing with the library.
std::vector<std::uint8_t> reference_y4m(int w, int h, int frames, const std::vector<std::vector<int>>& planes_per_frame,
                                        bool ten_bit) {
  std::string head = "YUV4MPEG2 W" + std::to_string(w) + " H" + std::to_string(h) + " F25:1 Ip A1:1 C" +
                     (ten_bit ? "420p10" : "420") + " XYSCSS=420\n";
  std::vector<std::uint8_t> out(head.begin(), head.end());
  for (int f = 0; f < frames; ++f) {
    const char* marker = "FRAME\n";
    out.insert(out.end(), marker, marker + 6);
    for (int v : planes_per_frame[static_cast<std::size_t>(f)]) {
      if (ten_bit) {
        out.push_back(static_cast<std::uint8_t>(v & 0xFF));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
      } else {
        out.push_back(static_cast<std::uint8_t>(v));
      }
    }
  }
  return out;
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

TEST_SUITE("media_io") {
  TEST_CASE("2x2 all-zero frame parses to zeros") {
    auto data = bytes_of("YUV4MPEG2 W2 H2 F30:1 C420jpeg\nFRAME\n");
    data.resize(data.size() + 6, 0);
    const VideoSequence seq = parse_y4m(data);
    REQUIRE(seq.size() == 1);
    CHECK(seq.width() == 2);
    CHECK(seq.frame(0).cb().width() == 1);
    for (int c = 0; c < 3; ++c) {
      for (auto v : seq.frame(0).plane(c).samples()) CHECK(v == 0);
    }
  }

  TEST_CASE("writer emits header plus six bytes for a 2x2 frame") {
    const VideoSequence seq({Frame::blank(2, 2, 8, 0)}, FrameRate{30, 1});
    const auto out = write_y4m(seq);
    const std::string text(out.begin(), out.end());
    const auto first_nl = text.find('\n');
    REQUIRE(first_nl != std::string::npos);
    CHECK(text.substr(0, 9) == "YUV4MPEG2");
    CHECK(text.substr(first_nl + 1, 6) == "FRAME\n");
    CHECK(out.size() == first_nl + 1 + 6 + 6);
  }

  TEST_CASE("roundtrip write then parse, 8 and 10 bit, odd sizes") {
    for (int bd : {8, 10}) {
      const VideoSequence seq = testing::random_clip(7, 5, 3, 11u + static_cast<unsigned>(bd), bd);
      CHECK(parse_y4m(write_y4m(seq)) == seq);
      CHECK(read_raw_yuv(write_raw_yuv(seq), 7, 5, bd, 3, seq.frame_rate()) == seq);
    }
  }

  TEST_CASE("independent writer cross-check, 4x4x3") {
    std::mt19937 rng(5);
    for (bool ten : {false, true}) {
      std::vector<std::vector<int>> src(3);
      for (auto& f : src) {
        for (int i = 0; i < 16 + 4 + 4; ++i) f.push_back(static_cast<int>(rng() % (ten ? 1024u : 256u)));
      }
      const VideoSequence seq = parse_y4m(reference_y4m(4, 4, 3, src, ten));
      REQUIRE(seq.size() == 3);
      CHECK(seq.bit_depth() == (ten ? 10 : 8));
      CHECK(seq.frame_rate() == FrameRate{25, 1});
      for (int f = 0; f < 3; ++f) {
        const auto& fr = seq.frame(static_cast<std::size_t>(f));
        std::size_t k = 0;
        for (int c = 0; c < 3; ++c) {
          for (auto v : fr.plane(c).samples()) CHECK(v == src[static_cast<std::size_t>(f)][k++]);
        }
      }
    }
  }

  TEST_CASE("raw planar layout") {
    const std::vector<std::uint8_t> raw{0, 1, 2, 3, 4, 5};
    const VideoSequence seq = read_raw_yuv(raw, 2, 2, 8, 1);
    const Frame& f = seq.frame(0);
    CHECK(f.luma()(0, 0) == 0);
    CHECK(f.luma()(1, 0) == 1);
    CHECK(f.luma()(0, 1) == 2);
    CHECK(f.luma()(1, 1) == 3);
    CHECK(f.cb()(0, 0) == 4);
    CHECK(f.cr()(0, 0) == 5);
    CHECK(read_raw_yuv(raw, 2, 2, 8, 0).empty());
    auto y4m = bytes_of("YUV4MPEG2 W2 H2 F30:1 C420\nFRAME\n");
    y4m.insert(y4m.end(), raw.begin(), raw.end());
    CHECK(parse_y4m(y4m).frame(0) == f);
  }

  TEST_CASE("errors") {
    CHECK(kind_of([] { parse_y4m(bytes_of("YUV4MPEG3 W2 H2 F30:1\n")); }) == ErrorKind::Format);
    CHECK(kind_of([] { parse_y4m(bytes_of("YUV4MPEG2 W2 H2 F30:1 C444\n")); }) == ErrorKind::Unsupported);
    try {
      auto data = bytes_of("YUV4MPEG2 W2 H2 F30:1 C420\nFRAME\n");
      data.resize(data.size() + 6, 0);
      const std::string second = "FRAME\n";
      data.insert(data.end(), second.begin(), second.end());
      data.push_back(1);
      parse_y4m(data);
      FAIL("truncated stream accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Truncation);
      CHECK(std::string(e.what()).find('1') != std::string::npos);
    }
    CHECK(kind_of([] { read_raw_yuv(std::vector<std::uint8_t>(5), 2, 2, 8, 1); }) == ErrorKind::Truncation);
    CHECK_THROWS_AS(Frame(PlaneSet{IntPlane(2, 2, 256), IntPlane(1, 1), IntPlane(1, 1)}, 8), Error);
    CHECK_THROWS_AS(Frame(PlaneSet{IntPlane(1, 2), IntPlane(1, 1), IntPlane(1, 1)}, 8), Error);
    CHECK_THROWS_AS(Frame(PlaneSet{IntPlane(4, 4), IntPlane(1, 1), IntPlane(1, 1)}, 8), Error);
  }
}
