#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lwvc/dwt2d.hpp"

namespace lwvc {

inline constexpr std::uint8_t kStreamVersion = 1;
inline constexpr std::size_t kStreamHeaderSize = 28;
inline constexpr std::size_t kUnitHeaderSize = 8;

/// Global stream header. All multi-byte fields are little-endian.
///
///   offset size field
///   0      4    magic "LWVC"
///   4      1    version
///   5      4    width
///   9      4    height
///   13     1    bit_depth
///   14     4    frame_count
///   18     2    frame rate numerator
///   20     2    frame rate denominator
///   22     1    kernel id (0 = 5/3, 1 = 9/7)
///   23     1    spatial levels (luma)
///   24     2    q * 256
///   26     1    GOP mode (0 = content adaptive, otherwise the fixed GOP size)
///   27     1    flags (bit 0: lossless)
struct StreamHeader {
  std::uint8_t version = kStreamVersion;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint8_t bit_depth = 8;
  std::uint32_t frame_count = 0;
  std::uint16_t rate_num = 30;
  std::uint16_t rate_den = 1;
  Kernel kernel = Kernel::Cdf97;
  std::uint8_t spatial_levels = 1;
  std::uint16_t q_fixed = 0;
  std::uint8_t gop_mode = 16;
  std::uint8_t flags = 0;

  static constexpr std::uint8_t kLosslessFlag = 0x01;

  double q() const { return q_fixed / 256.0; }
  bool lossless() const { return (flags & kLosslessFlag) != 0; }

  bool operator==(const StreamHeader&) const = default;
};

enum class UnitType : std::uint8_t { Lowpass = 0, Highpass = 1, Motion = 2, GopHeader = 3 };

const char* to_string(UnitType type) noexcept;

/// One layer-tagged unit: type u8, temporal level u8, index u16, payload
/// length u32, payload.
struct CodedUnit {
  UnitType type = UnitType::Lowpass;
  std::uint8_t temporal_level = 0;
  std::uint16_t index = 0;
  std::vector<std::uint8_t> payload;

  bool operator==(const CodedUnit&) const = default;
};

/// Payload of a GopHeader unit: gop_size u16, levels u8, first_frame u32,
/// motion block size u8.
struct GopHeader {
  std::uint16_t gop_size = 1;
  std::uint8_t levels = 0;
  std::uint32_t first_frame = 0;
  std::uint8_t block_size = 8;

  bool operator==(const GopHeader&) const = default;
};

std::vector<std::uint8_t> encode_gop_header(const GopHeader& gop);
GopHeader decode_gop_header(std::span<const std::uint8_t> payload);

struct ParsedStream {
  StreamHeader header;
  std::vector<CodedUnit> units;

  bool operator==(const ParsedStream&) const = default;
};

/// Units must be grouped by GOP, each GOP starting with its GopHeader unit
/// followed by the lowpass and then highpass/motion units in non-increasing
/// temporal level order.
std::vector<std::uint8_t> write_stream(const StreamHeader& header, std::span<const CodedUnit> units);
ParsedStream parse_stream(std::span<const std::uint8_t> bytes);

/// One GOP's slice of a parsed stream.
struct GopView {
  GopHeader header;
  std::size_t unit_begin = 0;  // index of the GopHeader unit
  std::size_t unit_end = 0;
  /// Temporal levels already removed from this GOP (finest missing level).
  int dropped = 0;
};

std::vector<GopView> split_gops(const ParsedStream& stream);

/// Removes every highpass and motion unit of temporal level <= k and
/// rewrites frame_count and frame rate. Fails if a GOP has fewer than k
/// temporal levels.
std::vector<std::uint8_t> drop_layers(std::span<const std::uint8_t> bytes, int k);
ParsedStream drop_layers(const ParsedStream& stream, int k);

/// Human-readable unit table (type, level, index, size).
std::string dump_units(const ParsedStream& stream);

}  // namespace lwvc
