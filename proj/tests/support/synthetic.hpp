#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lwvc/media_io.hpp"

namespace lwvc::testing {

inline IntPlane random_plane(int w, int h, std::mt19937& rng, int max_value = 255) {
  IntPlane p(w, h);
  for (auto& v : p.samples()) v = static_cast<std::int32_t>(rng() % static_cast<unsigned>(max_value + 1));
  return p;
}

inline Frame random_frame(int w, int h, std::mt19937& rng, int bit_depth = 8) {
  const int max_value = (1 << bit_depth) - 1;
  return Frame({random_plane(w, h, rng, max_value), random_plane(chroma_extent(w), chroma_extent(h), rng, max_value),
                random_plane(chroma_extent(w), chroma_extent(h), rng, max_value)},
               bit_depth);
}

inline VideoSequence random_clip(int w, int h, int n, unsigned seed, int bit_depth = 8) {
  std::mt19937 rng(seed);
  std::vector<Frame> frames;
  for (int i = 0; i < n; ++i) frames.push_back(random_frame(w, h, rng, bit_depth));
  return VideoSequence(std::move(frames), FrameRate{30, 1});
}

/// Multi-octave value noise with a few hard-edged shapes; values in [0, 255].
class Texture {
 public:
  Texture(int w, int h, unsigned seed) : w_(w), h_(h), data_(static_cast<std::size_t>(w) * h) {
    std::mt19937 rng(seed);
    std::vector<double> acc(data_.size(), 0.0);
    double amp = 70.0;
    for (int cell = 32; cell >= 2; cell /= 2, amp *= 0.55) {
      const int gw = w / cell + 2, gh = h / cell + 2;
      std::vector<double> grid(static_cast<std::size_t>(gw) * gh);
      for (auto& g : grid) g = (static_cast<double>(rng() % 2001) / 1000.0 - 1.0) * amp;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double fx = static_cast<double>(x) / cell, fy = static_cast<double>(y) / cell;
          const int ix = static_cast<int>(fx), iy = static_cast<int>(fy);
          const double tx = fx - ix, ty = fy - iy;
          auto g = [&](int gx, int gy) { return grid[static_cast<std::size_t>(gy) * gw + gx]; };
          acc[static_cast<std::size_t>(y) * w + x] +=
              (1 - ty) * ((1 - tx) * g(ix, iy) + tx * g(ix + 1, iy)) + ty * ((1 - tx) * g(ix, iy + 1) + tx * g(ix + 1, iy + 1));
        }
      }
    }
    for (int s = 0; s < 6; ++s) {
      const int rx = static_cast<int>(rng() % static_cast<unsigned>(w)), ry = static_cast<int>(rng() % static_cast<unsigned>(h));
      const int rw = 8 + static_cast<int>(rng() % 40), rh = 8 + static_cast<int>(rng() % 40);
      const double level = static_cast<double>(rng() % 120) - 60.0;
      for (int y = ry; y < std::min(h, ry + rh); ++y) {
        for (int x = rx; x < std::min(w, rx + rw); ++x) acc[static_cast<std::size_t>(y) * w + x] += level;
      }
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
      data_[i] = static_cast<std::int32_t>(std::clamp(std::lround(128.0 + acc[i]), 0L, 255L));
    }
  }

  int width() const { return w_; }
  int height() const { return h_; }
  std::int32_t at(int x, int y) const {
    x = std::clamp(x, 0, w_ - 1);
    y = std::clamp(y, 0, h_ - 1);
    return data_[static_cast<std::size_t>(y) * w_ + x];
  }

  /// w x h window at (ox, oy); chroma from 2x2 averages with fixed offsets.
  Frame window(int w, int h, int ox, int oy) const {
    IntPlane y(w, h);
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) y(i, j) = at(ox + i, oy + j);
    }
    const int cw = chroma_extent(w), ch = chroma_extent(h);
    IntPlane cb(cw, ch), cr(cw, ch);
    for (int j = 0; j < ch; ++j) {
      for (int i = 0; i < cw; ++i) {
        const int sx = ox + 2 * i, sy = oy + 2 * j;
        const int avg = (at(sx, sy) + at(sx + 1, sy) + at(sx, sy + 1) + at(sx + 1, sy + 1) + 2) / 4;
        cb(i, j) = std::clamp(96 + avg / 4, 0, 255);
        cr(i, j) = std::clamp(200 - avg / 3, 0, 255);
      }
    }
    return Frame({std::move(y), std::move(cb), std::move(cr)}, 8);
  }

 private:
  int w_, h_;
  std::vector<std::int32_t> data_;
};

/// Global translation by (dx, dy) integer pels per frame.
inline VideoSequence pan_clip(int w, int h, int n, int dx, int dy, unsigned seed) {
  const int margin_x = std::abs(dx) * n + 4, margin_y = std::abs(dy) * n + 4;
  const Texture tex(w + margin_x, h + margin_y, seed);
  std::vector<Frame> frames;
  for (int i = 0; i < n; ++i) {
    const int ox = dx >= 0 ? dx * i : margin_x - 4 + dx * i;
    const int oy = dy >= 0 ? dy * i : margin_y - 4 + dy * i;
    frames.push_back(tex.window(w, h, ox, oy));
  }
  return VideoSequence(std::move(frames), FrameRate{30, 1});
}

/// Slow pan plus an independently moving block object and mild sensor noise.
inline VideoSequence natural_clip(int w, int h, int n, unsigned seed) {
  const Texture background(w + n + 8, h + n / 2 + 8, seed);
  const Texture object(24, 24, seed + 1);
  std::mt19937 rng(seed + 2);
  std::vector<Frame> frames;
  for (int i = 0; i < n; ++i) {
    Frame base = background.window(w, h, i, i / 2);
    PlaneSet planes = base.planes();
    const int ox = (5 + 3 * i) % std::max(1, w - 16), oy = (h / 3 + i) % std::max(1, h - 16);
    for (int y = 0; y < std::min(24, h - oy); ++y) {
      for (int x = 0; x < std::min(24, w - ox); ++x) planes[0](ox + x, oy + y) = object.at(x, y);
    }
    for (auto& v : planes[0].samples()) v = std::clamp(v + static_cast<int>(rng() % 5) - 2, 0, 255);
    frames.push_back(Frame(std::move(planes), 8));
  }
  return VideoSequence(std::move(frames), FrameRate{30, 1});
}

inline VideoSequence static_clip(int w, int h, int n, unsigned seed) {
  const Texture tex(w, h, seed);
  return VideoSequence(std::vector<Frame>(static_cast<std::size_t>(n), tex.window(w, h, 0, 0)), FrameRate{30, 1});
}

/// Every frame an unrelated texture: no temporal correlation.
inline VideoSequence uncorrelated_clip(int w, int h, int n, unsigned seed) {
  std::vector<Frame> frames;
  for (int i = 0; i < n; ++i) frames.push_back(Texture(w, h, seed + 7919u * static_cast<unsigned>(i)).window(w, h, 0, 0));
  return VideoSequence(std::move(frames), FrameRate{30, 1});
}

inline VideoSequence alternating_clip(int w, int h, int n) {
  std::vector<Frame> frames;
  for (int i = 0; i < n; ++i) frames.push_back(Frame::blank(w, h, 8, i % 2 == 0 ? 0 : 255));
  return VideoSequence(std::move(frames), FrameRate{30, 1});
}

inline std::vector<PlaneSet> plane_sets(const VideoSequence& v) {
  std::vector<PlaneSet> out;
  for (const auto& f : v.frames()) out.push_back(f.planes());
  return out;
}

}  // namespace lwvc::testing
