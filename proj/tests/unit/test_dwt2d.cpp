#include <doctest.h>

#include <cmath>
#include <random>
#include <tuple>
#include <vector>

#include "lwvc/dwt2d.hpp"
#include "lwvc/error.hpp"

using namespace lwvc;

namespace {

int sym(int i, int n) {
  while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
  return i;
}

// Direct evaluation of the 5/3 recurrences on an interleaved signal.
std::pair<std::vector<int>, std::vector<int>> lift53_oracle(const std::vector<int>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<int> y = x;
  auto fdiv = [](int a, int b) { return static_cast<int>(std::floor(static_cast<double>(a) / b)); };
  for (int i = 1; i < n; i += 2) y[i] = x[i] - fdiv(x[sym(i - 1, n)] + x[sym(i + 1, n)], 2);
  for (int i = 0; i < n; i += 2) y[i] = x[i] + fdiv(y[sym(i - 1, n)] + y[sym(i + 1, n)] + 2, 4);
  std::vector<int> low, high;
  for (int i = 0; i < n; ++i) (i % 2 == 0 ? low : high).push_back(y[i]);
  return {low, high};
}

// Synthesis of one 9/7 line from (low, high), written from the textbook
// step list without the library's helpers.
std::vector<double> synth97(const std::vector<double>& low, const std::vector<double>& high) {
  const double a = -1.586134342059924, b = -0.052980118572961, g = 0.882911075530934, d = 0.443506852043971,
               k = 1.230174104914001;
  const int n = static_cast<int>(low.size() + high.size());
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[i] = i % 2 == 0 ? low[i / 2] * k : high[i / 2] / k;
  if (n < 2) return x;
  auto step = [&](int parity, double c) {
    for (int i = parity; i < n; i += 2) x[i] -= c * (x[sym(i - 1, n)] + x[sym(i + 1, n)]);
  };
  step(0, d);
  step(1, g);
  step(0, b);
  step(1, a);
  return x;
}

std::vector<std::vector<double>> synth97_2d(std::vector<std::vector<double>> c, int w, int h, int levels) {
  for (int l = levels - 1; l >= 0; --l) {
    const int lw = (w + (1 << l) - 1) >> l, lh = (h + (1 << l) - 1) >> l;
    for (int x = 0; x < lw; ++x) {
      std::vector<double> lo, hi;
      for (int y = 0; y < lh; ++y) (y < (lh + 1) / 2 ? lo : hi).push_back(c[y][x]);
      const auto col = lh >= 2 ? synth97(lo, hi) : lo;
      for (int y = 0; y < lh; ++y) c[y][x] = col[y];
    }
    for (int y = 0; y < lh; ++y) {
      std::vector<double> lo, hi;
      for (int x = 0; x < lw; ++x) (x < (lw + 1) / 2 ? lo : hi).push_back(c[y][x]);
      const auto row = lw >= 2 ? synth97(lo, hi) : lo;
      for (int x = 0; x < lw; ++x) c[y][x] = row[x];
    }
  }
  return c;
}

IntPlane random_int_plane(int w, int h, unsigned seed, int range) {
  std::mt19937 rng(seed);
  IntPlane p(w, h);
  for (auto& v : p.samples()) v = static_cast<int>(rng() % static_cast<unsigned>(range));
  return p;
}

}  // namespace

TEST_SUITE("dwt2d") {
  TEST_CASE("hand-evaluated 5/3 lifting on [1,2,3,4]") {
    std::vector<double> s{1, 2, 3, 4};
    forward_lift_1d(s, Kernel::LeGall53);
    CHECK(s == std::vector<double>{1, 3, 0, 1});
    const auto [low, high] = lift53_oracle({1, 2, 3, 4});
    CHECK(low == std::vector<int>{1, 3});
    CHECK(high == std::vector<int>{0, 1});
  }

  TEST_CASE("5/3 1D matches the recurrence oracle for many lengths") {
    std::mt19937 rng(3);
    for (int n = 2; n <= 33; ++n) {
      std::vector<int> x(static_cast<std::size_t>(n));
      for (auto& v : x) v = static_cast<int>(rng() % 512) - 256;
      std::vector<double> s(x.begin(), x.end());
      forward_lift_1d(s, Kernel::LeGall53);
      const auto [low, high] = lift53_oracle(x);
      std::vector<double> expect(low.begin(), low.end());
      expect.insert(expect.end(), high.begin(), high.end());
      CHECK(s == expect);
      inverse_lift_1d(s, Kernel::LeGall53);
      CHECK(s == std::vector<double>(x.begin(), x.end()));
    }
  }

  TEST_CASE("constant plane has zero detail under 5/3") {
    const IntPlane p(37, 29, 77);
    const SubbandImage sb = forward_dwt(p, 3, Kernel::LeGall53);
    for (int l = 1; l <= 3; ++l) {
      for (auto o : {Orientation::HL, Orientation::LH, Orientation::HH}) {
        const RealPlane band = sb.band(l, o);
        for (double v : band.samples()) CHECK(v == 0.0);
      }
    }
    const RealPlane ll = sb.band(3, Orientation::LL);
    for (double v : ll.samples()) CHECK(v == 77.0);
  }

  TEST_CASE("5/3 roundtrip is bit-exact, including odd sizes") {
    for (auto [w, h] : {std::pair{64, 64}, {63, 17}, {5, 3}, {2, 2}}) {
      const IntPlane p = random_int_plane(w, h, static_cast<unsigned>(w * 100 + h), 256);
      const int levels = std::min(3, max_levels(w, h));
      const SubbandImage sb = forward_dwt(p, levels, Kernel::LeGall53);
      CHECK(sb.coefficients().size() == p.size());
      CHECK(inverse_dwt_rounded(sb) == p);
      CHECK(inverse_dwt(sb) == plane_cast<double>(p));
    }
  }

  TEST_CASE("9/7 reconstruction error within 1e-6 on 512x512, 4 levels") {
    const IntPlane p = random_int_plane(512, 512, 9, 1024);
    const RealPlane rec = inverse_dwt(forward_dwt(p, 4, Kernel::Cdf97));
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) worst = std::max(worst, std::fabs(rec.samples()[i] - p.samples()[i]));
    CHECK(worst <= 1e-6);
  }

  TEST_CASE("zero subbands reconstruct to zero") {
    for (auto k : {Kernel::LeGall53, Kernel::Cdf97}) {
      const SubbandImage sb(k, 2, RealPlane(16, 12));
      const RealPlane rec = inverse_dwt(sb);
      for (double v : rec.samples()) CHECK(v == 0.0);
    }
  }

  TEST_CASE("impulse in coarsest LL matches independent synthesis") {
    for (auto [w, h, levels] : std::vector<std::tuple<int, int, int>>{{32, 32, 3}, {27, 19, 2}}) {
      RealPlane c(w, h);
      const BandRect ll = band_rect(w, h, levels, Orientation::LL);
      c(ll.width / 2, ll.height / 2) = 1.0;
      const RealPlane rec = inverse_dwt(SubbandImage(Kernel::Cdf97, levels, c));
      std::vector<std::vector<double>> grid(static_cast<std::size_t>(h), std::vector<double>(static_cast<std::size_t>(w)));
      grid[ll.height / 2][ll.width / 2] = 1.0;
      const auto expect = synth97_2d(grid, w, h, levels);
      double worst = 0.0, sum = 0.0;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          worst = std::max(worst, std::fabs(rec(x, y) - expect[y][x]));
          sum += rec(x, y);
        }
      }
      CHECK(worst < 1e-12);
      CHECK(sum > 0.5);
    }
  }

  TEST_CASE("energy compaction on a smooth ramp") {
    RealPlane p(64, 64);
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) p(x, y) = 2.0 * x + 0.5 * y + 10.0;
    }
    for (auto k : {Kernel::LeGall53, Kernel::Cdf97}) {
      const SubbandImage sb = forward_dwt(p, 3, k);
      double total = 0.0, ll = 0.0;
      for (double v : sb.coefficients().samples()) total += v * v;
      const RealPlane band = sb.band(3, Orientation::LL);
      for (double v : band.samples()) ll += v * v;
      CHECK(ll / total >= 0.9);
    }
  }

  TEST_CASE("level bookkeeping") {
    CHECK(default_levels(64, 64) == 3);
    CHECK(default_levels(1920, 1080) == 4);
    CHECK(default_levels(8, 8) == 1);
    CHECK(max_levels(2, 2) == 1);
    CHECK(band_rect(7, 5, 1, Orientation::HH).width == 3);
    CHECK(band_rect(7, 5, 1, Orientation::LL).height == 3);
    CHECK_THROWS_AS(forward_dwt(IntPlane(8, 8), 4, Kernel::LeGall53), Error);
    try {
      forward_dwt(IntPlane(8, 8), 4, Kernel::LeGall53);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::LevelOverflow);
    }
    CHECK_THROWS_AS(inverse_dwt(SubbandImage(Kernel::LeGall53, 5, RealPlane(4, 4))), Error);
  }
}
