#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lwvc/plane.hpp"

namespace lwvc {

/// Y, Cb, Cr planes in that order. Used for anything frame-shaped that is
/// not bound to the sample range (temporal subbands, reconstructions).
using PlaneSet = std::array<IntPlane, 3>;

inline constexpr int chroma_extent(int luma_extent) { return (luma_extent + 1) / 2; }

/// Vertical/horizontal subsampling shift of plane `index` in 4:2:0.
inline constexpr int plane_shift(int index) { return index == 0 ? 0 : 1; }

/// A validated 4:2:0 picture. Geometry and samples are fixed after
/// construction; every sample lies in [0, 2^bit_depth - 1].
class Frame {
 public:
  Frame(PlaneSet planes, int bit_depth);

  /// Mid-grey frame of the given geometry.
  static Frame blank(int width, int height, int bit_depth, std::int32_t value = 0);

  int width() const noexcept { return planes_[0].width(); }
  int height() const noexcept { return planes_[0].height(); }
  int bit_depth() const noexcept { return bit_depth_; }
  std::int32_t max_value() const noexcept { return (1 << bit_depth_) - 1; }

  const IntPlane& plane(int index) const { return planes_.at(static_cast<std::size_t>(index)); }
  const IntPlane& luma() const noexcept { return planes_[0]; }
  const IntPlane& cb() const noexcept { return planes_[1]; }
  const IntPlane& cr() const noexcept { return planes_[2]; }
  const PlaneSet& planes() const noexcept { return planes_; }

  bool operator==(const Frame&) const = default;

 private:
  PlaneSet planes_;
  int bit_depth_;
};

/// Clips every plane into the sample range and wraps it as a Frame.
Frame frame_from_clipped(const PlaneSet& planes, int bit_depth);

struct FrameRate {
  std::uint32_t num = 30;
  std::uint32_t den = 1;
  double fps() const { return static_cast<double>(num) / den; }
  bool operator==(const FrameRate&) const = default;
};

class VideoSequence {
 public:
  VideoSequence() = default;
  VideoSequence(std::vector<Frame> frames, FrameRate rate);

  const std::vector<Frame>& frames() const noexcept { return frames_; }
  const Frame& frame(std::size_t i) const { return frames_.at(i); }
  std::size_t size() const noexcept { return frames_.size(); }
  bool empty() const noexcept { return frames_.empty(); }
  FrameRate frame_rate() const noexcept { return rate_; }

  int width() const;
  int height() const;
  int bit_depth() const;

  bool operator==(const VideoSequence&) const = default;

 private:
  std::vector<Frame> frames_;
  FrameRate rate_;
};

VideoSequence parse_y4m(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_y4m(const VideoSequence& sequence);

/// Headerless planar 4:2:0. Samples above 8 bits are 16-bit little-endian.
VideoSequence read_raw_yuv(std::span<const std::uint8_t> bytes, int width, int height,
                           int bit_depth, std::size_t frame_count,
                           FrameRate rate = {});
std::vector<std::uint8_t> write_raw_yuv(const VideoSequence& sequence);

std::size_t frame_byte_size(int width, int height, int bit_depth);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace lwvc
