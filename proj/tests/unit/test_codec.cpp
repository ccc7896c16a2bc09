#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "lwvc/codec.hpp"
#include "lwvc/error.hpp"
#include "lwvc/metrics.hpp"
#include "support/synthetic.hpp"

using namespace lwvc;
using namespace lwvc::testing;

namespace {

CodecConfig lossy(double q, int gop) {
  CodecConfig c;
  c.quant.q = q;
  c.gop.fixed_size = gop;
  return c;
}

CodecConfig lossless_config(int gop) {
  CodecConfig c;
  c.lossless = true;
  c.kernel = Kernel::LeGall53;
  c.gop.fixed_size = gop;
  return c;
}

double mean_abs_error(const IntPlane& a, const IntPlane& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a.samples()[i] - b.samples()[i]);
  return sum / static_cast<double>(a.size());
}

}  // namespace

TEST_SUITE("codec") {
  TEST_CASE("rd cost") {
    CHECK(rd_cost(0.0, 0.0, 0.5) == 0.0);
    CHECK(rd_cost(1234.0, 99.0, 0.0) == 1234.0);
    CHECK(rd_cost(100.0, 10.0, 6.0) == 160.0);
    CHECK(rd_cost(100.0, 10.0, 6.0) < rd_cost(110.0, 10.0, 6.0));
    RDCost c;
    c.subband_bits = 80.0;
    c.motion_bits = 20.0;
    c.frame_mse = {4.0, 6.0};
    CHECK(c.rate_bits() == 100.0);
    CHECK(c.mse_sum() == 10.0);
  }

  TEST_CASE("lossless roundtrip for every GOP size") {
    const VideoSequence clip = random_clip(32, 32, 16, 11);
    for (int gop : {1, 2, 4, 8, 16}) {
      CAPTURE(gop);
      const auto bytes = encode_sequence(clip, lossless_config(gop));
      CHECK(decode_sequence(bytes) == clip);
    }
  }

  TEST_CASE("lossless with tails, odd sizes and 10-bit samples") {
    const VideoSequence odd = natural_clip(37, 21, 13, 3);
    const auto r = encode_sequence_detailed(odd, lossless_config(8));
    CHECK(r.gop_sizes == std::vector<int>{8, 4, 1});
    CHECK(decode_sequence(r.bytes) == odd);

    const VideoSequence deep = random_clip(24, 16, 5, 4, 10);
    CHECK(decode_sequence(encode_sequence(deep, lossless_config(4))) == deep);
  }

  TEST_CASE("empty sequence") {
    const VideoSequence empty;
    CHECK_THROWS_AS(encode_sequence(empty, lossy(10, 4)), Error);
  }

  TEST_CASE("decoder matches encoder reconstruction") {
    const VideoSequence clip = natural_clip(48, 40, 12, 8);
    for (Kernel k : {Kernel::Cdf97, Kernel::LeGall53}) {
      for (int gop : {1, 4, 8}) {
        CodecConfig c = lossy(7.5, gop);
        c.kernel = k;
        const auto r = encode_sequence_detailed(clip, c);
        CHECK(decode_sequence(r.bytes) == r.reconstruction);
        CHECK(r.cost.frame_mse.size() == clip.size());
      }
    }
  }

  TEST_CASE("static content: MCTF beats intra at no loss of quality") {
    const VideoSequence clip = static_clip(64, 64, 8, 21);
    const auto intra = encode_sequence_detailed(clip, lossy(10, 1));
    const auto mctf = encode_sequence_detailed(clip, lossy(10, 8));
    CHECK(mctf.bytes.size() * 3 < intra.bytes.size());
    CHECK(psnr(clip, mctf.reconstruction).combined >= psnr(clip, intra.reconstruction).combined - 0.01);
  }

  TEST_CASE("rate and quality follow q") {
    const VideoSequence clip = pan_clip(64, 64, 8, 1, 0, 5);
    double prev_bytes = 1e300, prev_psnr = 1e300;
    for (double q : {0.0, 5.0, 10.0, 15.0, 20.0}) {
      const auto r = encode_sequence_detailed(clip, lossy(q, 8));
      const double p = psnr(clip, r.reconstruction).combined;
      CAPTURE(q);
      CHECK(static_cast<double>(r.bytes.size()) < prev_bytes);
      CHECK(p < prev_psnr);
      prev_bytes = static_cast<double>(r.bytes.size());
      prev_psnr = p;
    }
  }

  TEST_CASE("picture coding: deeper temporal levels quantize finer") {
    std::mt19937 rng(17);
    PlaneSet picture;
    for (int c = 0; c < 3; ++c) {
      const int w = c == 0 ? 64 : 32;
      picture[c] = IntPlane(w, w);
      std::normal_distribution<double> noise(0.0, 12.0);
      for (auto& v : picture[c].samples()) v = static_cast<std::int32_t>(std::lround(noise(rng)));
    }
    const QuantConfig qc;
    const PictureCoding pc{Kernel::Cdf97, 3, false};
    const CodedPicture shallow = code_picture(picture, temporal_highpass_steps(qc, 1), pc);
    const CodedPicture deep = code_picture(picture, temporal_highpass_steps(qc, 3), pc);
    CHECK(mean_abs_error(deep.decoded[0], picture[0]) < mean_abs_error(shallow.decoded[0], picture[0]));
    CHECK(deep.payload.size() > shallow.payload.size());
    CHECK(decode_picture(deep.payload, 64, 64, pc) == deep.decoded);
  }

  TEST_CASE("lossless picture coding is exact") {
    std::mt19937 rng(5);
    PlaneSet picture{random_plane(19, 14, rng, 511), random_plane(10, 7, rng, 511), random_plane(10, 7, rng, 511)};
    for (auto& plane : picture) {
      for (auto& v : plane.samples()) v -= 256;
    }
    const PictureCoding pc{Kernel::LeGall53, 2, true};
    const CodedPicture coded = code_picture(picture, {1.0, 1.0}, pc);
    CHECK(coded.decoded == picture);
    CHECK(decode_picture(coded.payload, 19, 14, pc) == picture);
  }

  TEST_CASE("truncated stream names the failing unit") {
    const VideoSequence clip = natural_clip(32, 32, 4, 2);
    auto bytes = encode_sequence(clip, lossy(5, 4));
    bytes.resize(bytes.size() - 7);
    try {
      decode_sequence(bytes);
      FAIL("expected an error");
    } catch (const Error& e) {
      const std::string what = e.what();
      const bool names_unit = what.find("unit") != std::string::npos || what.find("truncat") != std::string::npos;
      CHECK(names_unit);
      CAPTURE(what);
      CHECK((e.kind() == ErrorKind::Corruption || e.kind() == ErrorKind::Truncation));
    }
  }

  TEST_CASE("GOP selection heuristic") {
    CodecConfig c = lossy(10, 0);
    c.gop.candidates = {2, 4, 8, 16};
    const VideoSequence still = static_clip(64, 64, 16, 9);
    CHECK(gop_residual_score(still.frames(), c) == 0.0);
    CHECK(select_gop_size(still.frames(), c.gop.candidates, c) == 16);

    const VideoSequence flicker = alternating_clip(32, 32, 16);
    CHECK(gop_residual_score(std::span(flicker.frames()).first(4), c) > c.gop.fallback_threshold);
    CHECK(select_gop_size(flicker.frames(), c.gop.candidates, c) == 2);

    const VideoSequence noise = uncorrelated_clip(64, 64, 16, 31);
    CHECK(select_gop_size(noise.frames(), c.gop.candidates, c) == 2);

    CHECK(select_gop_size(std::span(still.frames()).first(5), c.gop.candidates, c) == 4);
    CHECK_THROWS_AS(select_gop_size(std::span<const Frame>{}, c.gop.candidates, c), Error);
  }

  TEST_CASE("exhaustive GOP selection equals brute force") {
    const VideoSequence clip = natural_clip(32, 32, 8, 6);
    CodecConfig c = lossy(12, 0);
    c.gop.candidates = {2, 4, 8};
    c.gop.selection = GopSelection::Exhaustive;
    int best = 0;
    double best_cost = 1e300;
    for (int g : {2, 4, 8}) {
      const double cost = trial_cost(clip.frames(), g, c);
      if (cost < best_cost) {
        best_cost = cost;
        best = g;
      }
    }
    CHECK(select_gop_size(clip.frames(), c.gop.candidates, c) == best);
  }

  TEST_CASE("adaptive plan covers the sequence") {
    const VideoSequence clip = static_clip(32, 32, 21, 3);
    CodecConfig c = lossy(10, 0);
    const auto plan = plan_gops(clip.frames(), c);
    CHECK(plan == std::vector<int>{16, 4, 1});
    const auto r = encode_sequence_detailed(clip, c);
    CHECK(r.gop_sizes == plan);
    CHECK(decode_sequence(r.bytes) == r.reconstruction);
  }

  TEST_CASE("config parsing") {
    const CodecConfig c = parse_config(
        "# profile\n"
        "q = 4.5\n"
        "gop = auto   # adaptive\n"
        "gop_candidates = 2, 8\n"
        "gop_selection = exhaustive\n"
        "kernel = 5/3\n"
        "search_range_2 = 7\n"
        "q_scale_3_min = 0.5\n");
    CHECK(c.quant.q == 4.5);
    CHECK(c.gop.adaptive());
    CHECK(c.gop.candidates == std::vector<int>{2, 8});
    CHECK(c.gop.selection == GopSelection::Exhaustive);
    CHECK(c.kernel == Kernel::LeGall53);
    CHECK(c.search_range[1] == 7);
    CHECK(c.quant.q_scale[2].lo == 0.5);
    CHECK(c.quant.q_scale[2].hi == 0.8);

    try {
      parse_config("q = 3\nbogus = 1\n");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("q = abc\n"), Error);
    CHECK_THROWS_AS(parse_config("gop_selection = random\n"), Error);
    CHECK_THROWS_AS(parse_config("novalue\n"), Error);
  }

  TEST_CASE("config validation") {
    auto kind_of = [](const CodecConfig& c) {
      try {
        c.validate();
      } catch (const Error& e) {
        return e.kind();
      }
      return ErrorKind::Io;
    };
    CodecConfig c;
    CHECK_NOTHROW(c.validate());
    c.gop.fixed_size = 3;
    CHECK(kind_of(c) == ErrorKind::Config);
    c = {};
    c.gop.fixed_size = 32;
    CHECK(kind_of(c) == ErrorKind::Config);
    c = {};
    c.lossless = true;
    CHECK(kind_of(c) == ErrorKind::Config);
    c = {};
    c.quant.q = 21.0;
    CHECK(kind_of(c) == ErrorKind::Argument);
    c = {};
    c.gop.fixed_size = 0;
    c.gop.candidates = {4, 6};
    CHECK(kind_of(c) == ErrorKind::Config);

    CodecConfig deep;
    deep.spatial_levels = 6;
    CHECK_THROWS_AS(encode_sequence(random_clip(16, 16, 2, 1), deep), Error);
  }
}
