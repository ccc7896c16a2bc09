#include "lwvc/range_coder.hpp"

#include <string>

#include "lwvc/error.hpp"

namespace lwvc {

namespace {
constexpr std::uint32_t kTop = 1u << 24;
}

void RangeEncoder::encode_with(std::uint32_t p0, int bit) {
  const std::uint32_t bound = (range_ >> BinaryContext::kProbBits) * p0;
  if (bit == 0) {
    range_ = bound;
  } else {
    low_ += bound;
    range_ -= bound;
  }
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
}

void RangeEncoder::shift_low() {
  if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    std::uint8_t temp = cache_;
    do {
      // The very first byte is always zero; the decoder assumes it.
      if (!first_) out_.push_back(static_cast<std::uint8_t>(temp + carry));
      first_ = false;
      temp = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  for (int i = 0; i < 5; ++i) shift_low();
  out_.push_back(kTerminator[0]);
  out_.push_back(kTerminator[1]);
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> payload) : data_(payload) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ >= data_.size()) {
    fail(ErrorKind::Truncation, "range decoder ran past the end of its payload");
  }
  return data_[pos_++];
}

int RangeDecoder::decode_with(std::uint32_t p0) {
  const std::uint32_t bound = (range_ >> BinaryContext::kProbBits) * p0;
  int bit;
  if (code_ < bound) {
    range_ = bound;
    bit = 0;
  } else {
    code_ -= bound;
    range_ -= bound;
    bit = 1;
  }
  while (range_ < kTop) {
    range_ <<= 8;
    code_ = (code_ << 8) | next_byte();
  }
  return bit;
}

void RangeDecoder::finish() const {
  const std::size_t remaining = data_.size() - pos_;
  if (remaining != 2 || data_[pos_] != kTerminator[0] || data_[pos_ + 1] != kTerminator[1]) {
    fail(ErrorKind::Corruption, "entropy payload does not end at its terminator (" +
                                    std::to_string(remaining) + " trailing bytes)");
  }
}

}  // namespace lwvc
