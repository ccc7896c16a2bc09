#include <doctest.h>

#include <random>

#include "lwvc/error.hpp"
#include "lwvc/mctf.hpp"
#include "support/synthetic.hpp"

using namespace lwvc;

namespace {

std::vector<MotionSearch> searches(double lambda = 4.0) { return std::vector<MotionSearch>(4, {8, 8, lambda}); }

MotionField random_field(int w, int h, std::mt19937& rng) {
  MotionField f(8, w, h);
  for (auto& v : f.vectors()) v = {static_cast<int>(rng() % 17) - 8, static_cast<int>(rng() % 17) - 8};
  return f;
}

}  // namespace

TEST_SUITE("mctf") {
  TEST_CASE("predict and update arithmetic") {
    const MotionField zero(8, 8, 8);
    const IntPlane even(8, 8, 10), odd(8, 8, 14);
    const IntPlane h = mctf_predict(even, odd, zero);
    for (auto v : h.samples()) CHECK(v == 4);
    const IntPlane same = mctf_predict(even, even, zero);
    for (auto v : same.samples()) CHECK(v == 0);
    const IntPlane l = mctf_update(even, h, zero);
    for (auto v : l.samples()) CHECK(v == 12);
    CHECK(mctf_update(even, IntPlane(8, 8), zero) == even);
    const auto [e, o] = mctf_inverse(l, h, zero);
    CHECK(e == even);
    CHECK(o == odd);
  }

  TEST_CASE("update adds round(h/2) elementwise under a zero field") {
    std::mt19937 rng(7);
    IntPlane even = testing::random_plane(16, 16, rng);
    IntPlane h = testing::random_plane(16, 16, rng, 511);
    for (auto& v : h.samples()) v -= 255;
    const IntPlane l = mctf_update(even, h, MotionField(8, 16, 16));
    for (std::size_t i = 0; i < l.size(); ++i) {
      const int hv = h.samples()[i];
      const int half = hv >= 0 ? (hv + 1) / 2 : -((-hv + 1) / 2);
      CHECK(l.samples()[i] - even.samples()[i] == half);
    }
    CHECK(round_half_away(-3, 2) == -2);
    CHECK(round_half_away(3, 2) == 2);
    CHECK(round_half_away(-1, 4) == 0);
  }

  TEST_CASE("global shift with the right field gives zero interior residual") {
    const testing::Texture tex(80, 80, 2);
    const Frame a = tex.window(48, 48, 10, 10);
    const Frame b = tex.window(48, 48, 13, 10);  // content moved 3 px left
    MotionField f(8, 48, 48);
    for (auto& v : f.vectors()) v = {6, 0};
    const IntPlane h = mctf_predict(a.luma(), b.luma(), f);
    for (int y = 0; y < 48; ++y) {
      for (int x = 0; x < 40; ++x) CHECK(h(x, y) == 0);
    }
  }

  TEST_CASE("inverse undoes predict and update for random fields") {
    std::mt19937 rng(11);
    for (int t = 0; t < 20; ++t) {
      const Frame even = testing::random_frame(24, 17, rng);
      const Frame odd = testing::random_frame(24, 17, rng);
      const MotionField f = random_field(24, 17, rng);
      const PlaneSet h = mctf_predict(even.planes(), odd.planes(), f);
      const PlaneSet l = mctf_update(even.planes(), h, f);
      const auto [e, o] = mctf_inverse(l, h, f);
      CHECK(e == even.planes());
      CHECK(o == odd.planes());
    }
  }

  TEST_CASE("GOP structure counts") {
    const auto clip = testing::natural_clip(32, 32, 16, 5);
    for (int g : {1, 2, 4, 8, 16}) {
      const GopPlan plan = make_gop_plan(g);
      const auto frames = std::span<const Frame>(clip.frames()).first(static_cast<std::size_t>(g));
      const TemporalSubbandPyramid p = decompose_gop(frames, plan, searches());
      CHECK(p.levels == plan.levels);
      int highs = 0;
      for (int j = 1; j <= p.levels; ++j) {
        CHECK(p.highpass[j - 1].size() == static_cast<std::size_t>(g >> j));
        CHECK(p.motion[j - 1].size() == static_cast<std::size_t>(g >> j));
        highs += static_cast<int>(p.highpass[j - 1].size());
      }
      CHECK(highs == g - 1);
      const auto rec = reconstruct_gop(p, 0);
      REQUIRE(rec.size() == static_cast<std::size_t>(g));
      for (int i = 0; i < g; ++i) CHECK(rec[static_cast<std::size_t>(i)] == frames[static_cast<std::size_t>(i)].planes());
    }
  }

  TEST_CASE("static video has zero highpasses") {
    const auto clip = testing::static_clip(32, 24, 8, 3);
    const TemporalSubbandPyramid p = decompose_gop(clip.frames(), make_gop_plan(8), searches());
    for (const auto& level : p.highpass) {
      for (const auto& h : level) {
        for (const auto& plane : h) {
          for (auto v : plane.samples()) CHECK(v == 0);
        }
      }
    }
    CHECK(p.lowpass == clip.frame(0).planes());
  }

  TEST_CASE("dropping levels returns the forward lowpasses") {
    const auto clip = testing::natural_clip(40, 32, 8, 9);
    const TemporalSubbandPyramid p = decompose_gop(clip.frames(), make_gop_plan(8), searches());
    for (int k = 1; k <= 3; ++k) {
      const auto rec = reconstruct_gop(p, k);
      CHECK(rec == p.trace[static_cast<std::size_t>(k - 1)]);
    }
    CHECK(reconstruct_gop(p, 3).size() == 1);
    CHECK_THROWS_AS(reconstruct_gop(p, 4), Error);
  }

  TEST_CASE("plan errors") {
    CHECK_THROWS_AS(make_gop_plan(3), Error);
    CHECK_THROWS_AS(make_gop_plan(32), Error);
    try {
      make_gop_plan(6);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Plan);
    }
    const GopPlan p4 = make_gop_plan(4);
    CHECK(p4.pairs[0] == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
    CHECK(p4.pairs[1] == std::vector<std::pair<int, int>>{{0, 2}});
  }
}
