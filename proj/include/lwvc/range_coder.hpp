#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lwvc {

/// Adaptive binary probability estimate from halved occurrence counts
/// (Krichevsky-Trofimov start). The estimate of p(0) is always strictly
/// inside (0, 1).
class BinaryContext {
 public:
  static constexpr int kProbBits = 16;
  static constexpr std::uint32_t kProbOne = 1u << kProbBits;

  /// p(bit == 0) scaled to kProbOne, clamped to [kMinProb, kProbOne - kMinProb].
  std::uint32_t p0() const noexcept {
    const std::uint32_t p = static_cast<std::uint32_t>((static_cast<std::uint64_t>(n0_) << kProbBits) / (n0_ + n1_));
    return p < kMinProb ? kMinProb : (p > kProbOne - kMinProb ? kProbOne - kMinProb : p);
  }
  double probability_of_one() const noexcept { return 1.0 - static_cast<double>(p0()) / kProbOne; }

  void update(int bit) noexcept {
    (bit ? n1_ : n0_) += 2;
    if (n0_ + n1_ > kCountLimit) {
      n0_ = (n0_ + 1) >> 1;
      n1_ = (n1_ + 1) >> 1;
    }
  }

 private:
  static constexpr std::uint32_t kMinProb = 32;
  static constexpr std::uint32_t kCountLimit = 1u << 13;  // in half-counts

  std::uint32_t n0_ = 1;
  std::uint32_t n1_ = 1;
};

/// Termination marker appended after the range coder flush.
inline constexpr std::uint8_t kTerminator[2] = {0x4C, 0x57};

/// Carry-propagating binary range encoder (32-bit range, byte output).
class RangeEncoder {
 public:
  void encode(BinaryContext& ctx, int bit) {
    encode_with(ctx.p0(), bit);
    ctx.update(bit);
  }
  void encode_bypass(int bit) { encode_with(BinaryContext::kProbOne / 2, bit); }
  void encode_bypass_bits(std::uint32_t value, int count) {
    for (int i = count - 1; i >= 0; --i) encode_bypass(static_cast<int>((value >> i) & 1u));
  }

  /// Flushes the coder and appends the terminator. The encoder must not be
  /// used afterwards.
  std::vector<std::uint8_t> finish();

  /// Bytes committed so far (excludes pending carry bytes and the flush).
  std::size_t bytes_written() const noexcept { return out_.size(); }

 private:
  void encode_with(std::uint32_t p0, int bit);
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  bool first_ = true;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  /// Throws ErrorKind::Truncation when the payload is shorter than the
  /// coder's initial fill.
  explicit RangeDecoder(std::span<const std::uint8_t> payload);

  int decode(BinaryContext& ctx) {
    const int bit = decode_with(ctx.p0());
    ctx.update(bit);
    return bit;
  }
  int decode_bypass() { return decode_with(BinaryContext::kProbOne / 2); }
  std::uint32_t decode_bypass_bits(int count) {
    std::uint32_t v = 0;
    for (int i = 0; i < count; ++i) v = (v << 1) | static_cast<std::uint32_t>(decode_bypass());
    return v;
  }

  /// Checks that exactly the terminator remains; ErrorKind::Corruption
  /// otherwise.
  void finish() const;

 private:
  int decode_with(std::uint32_t p0);
  std::uint8_t next_byte();

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t code_ = 0;
};

}  // namespace lwvc
