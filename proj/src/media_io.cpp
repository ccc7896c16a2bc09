#include "lwvc/media_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <string_view>

#include "lwvc/error.hpp"

namespace lwvc {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Format: return "format error";
    case ErrorKind::Truncation: return "truncation error";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Argument: return "argument error";
    case ErrorKind::Consistency: return "consistency error";
    case ErrorKind::LevelOverflow: return "level overflow";
    case ErrorKind::Plan: return "plan error";
    case ErrorKind::Corruption: return "corruption error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

Frame::Frame(PlaneSet planes, int bit_depth) : planes_(std::move(planes)), bit_depth_(bit_depth) {
  if (bit_depth != 8 && bit_depth != 10) {
    fail(ErrorKind::Unsupported, "bit depth " + std::to_string(bit_depth) + " (expected 8 or 10)");
  }
  const int w = planes_[0].width();
  const int h = planes_[0].height();
  if (w < 2 || h < 2) fail(ErrorKind::Argument, "frame must be at least 2x2");
  for (int c = 1; c < 3; ++c) {
    if (planes_[c].width() != chroma_extent(w) || planes_[c].height() != chroma_extent(h)) {
      fail(ErrorKind::Consistency, "chroma plane dimensions do not match 4:2:0 geometry");
    }
  }
  const std::int32_t hi = max_value();
  for (const auto& p : planes_) {
    for (auto v : p.samples()) {
      if (v < 0 || v > hi) {
        fail(ErrorKind::Argument, "sample " + std::to_string(v) + " outside [0, " +
                                      std::to_string(hi) + "]");
      }
    }
  }
}

Frame Frame::blank(int width, int height, int bit_depth, std::int32_t value) {
  PlaneSet planes{IntPlane(width, height, value),
                  IntPlane(chroma_extent(width), chroma_extent(height), value),
                  IntPlane(chroma_extent(width), chroma_extent(height), value)};
  return Frame(std::move(planes), bit_depth);
}

Frame frame_from_clipped(const PlaneSet& planes, int bit_depth) {
  PlaneSet out = planes;
  const std::int32_t hi = (1 << bit_depth) - 1;
  for (auto& p : out) {
    for (auto& v : p.samples()) v = std::clamp(v, 0, hi);
  }
  return Frame(std::move(out), bit_depth);
}

VideoSequence::VideoSequence(std::vector<Frame> frames, FrameRate rate)
    : frames_(std::move(frames)), rate_(rate) {
  if (rate_.num == 0 || rate_.den == 0) fail(ErrorKind::Argument, "frame rate must be nonzero");
  for (const auto& f : frames_) {
    if (f.width() != frames_.front().width() || f.height() != frames_.front().height() ||
        f.bit_depth() != frames_.front().bit_depth()) {
      fail(ErrorKind::Consistency, "frames in a sequence must share geometry and bit depth");
    }
  }
}

int VideoSequence::width() const { return frames_.empty() ? 0 : frames_.front().width(); }
int VideoSequence::height() const { return frames_.empty() ? 0 : frames_.front().height(); }
int VideoSequence::bit_depth() const { return frames_.empty() ? 8 : frames_.front().bit_depth(); }

std::size_t frame_byte_size(int width, int height, int bit_depth) {
  const std::size_t bytes_per_sample = bit_depth > 8 ? 2 : 1;
  const std::size_t luma = static_cast<std::size_t>(width) * height;
  const std::size_t chroma = static_cast<std::size_t>(chroma_extent(width)) * chroma_extent(height);
  return (luma + 2 * chroma) * bytes_per_sample;
}

namespace {

Frame decode_planar(std::span<const std::uint8_t> payload, int width, int height, int bit_depth) {
  const int bps = bit_depth > 8 ? 2 : 1;
  PlaneSet planes{IntPlane(width, height),
                  IntPlane(chroma_extent(width), chroma_extent(height)),
                  IntPlane(chroma_extent(width), chroma_extent(height))};
  std::size_t pos = 0;
  for (auto& p : planes) {
    for (auto& v : p.samples()) {
      v = bps == 1 ? payload[pos] : static_cast<std::int32_t>(payload[pos] | (payload[pos + 1] << 8));
      pos += bps;
    }
  }
  return Frame(std::move(planes), bit_depth);
}

void encode_planar(const Frame& frame, std::vector<std::uint8_t>& out) {
  const bool wide = frame.bit_depth() > 8;
  for (const auto& p : frame.planes()) {
    for (auto v : p.samples()) {
      out.push_back(static_cast<std::uint8_t>(v & 0xFF));
      if (wide) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    }
  }
}

int parse_int(std::string_view text, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(ErrorKind::Format, std::string("y4m: malformed ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

int bit_depth_for_chroma_tag(std::string_view tag) {
  if (tag == "420" || tag == "420jpeg" || tag == "420paldv" || tag == "420mpeg2") return 8;
  if (tag == "420p10") return 10;
  fail(ErrorKind::Unsupported, "y4m: unsupported chroma format C" + std::string(tag));
}

}  // namespace

VideoSequence parse_y4m(std::span<const std::uint8_t> bytes) {
  const std::string_view all(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  const auto eol = all.find('\n');
  if (eol == std::string_view::npos) fail(ErrorKind::Format, "y4m: missing header line");
  const std::string_view header = all.substr(0, eol);
  constexpr std::string_view kSignature = "YUV4MPEG2";
  if (header.substr(0, kSignature.size()) != kSignature ||
      (header.size() > kSignature.size() && header[kSignature.size()] != ' ')) {
    fail(ErrorKind::Format, "y4m: missing YUV4MPEG2 signature");
  }

  int width = -1, height = -1, bit_depth = 8;
  FrameRate rate{};
  std::size_t pos = kSignature.size();
  while (pos < header.size()) {
    while (pos < header.size() && header[pos] == ' ') ++pos;
    if (pos >= header.size()) break;
    const auto end = std::min(header.find(' ', pos), header.size());
    const std::string_view token = header.substr(pos, end - pos);
    pos = end;
    const std::string_view value = token.substr(1);
    switch (token[0]) {
      case 'W': width = parse_int(value, "width"); break;
      case 'H': height = parse_int(value, "height"); break;
      case 'F': {
        const auto colon = value.find(':');
        if (colon == std::string_view::npos) fail(ErrorKind::Format, "y4m: malformed frame rate");
        const int num = parse_int(value.substr(0, colon), "frame rate");
        const int den = parse_int(value.substr(colon + 1), "frame rate");
        if (num <= 0 || den <= 0) fail(ErrorKind::Format, "y4m: nonpositive frame rate");
        rate = {static_cast<std::uint32_t>(num), static_cast<std::uint32_t>(den)};
        break;
      }
      case 'C': bit_depth = bit_depth_for_chroma_tag(value); break;
      default: break;  // I, A, X parameters carry nothing we need
    }
  }
  if (width < 2 || height < 2) fail(ErrorKind::Format, "y4m: missing or invalid W/H");

  const std::size_t frame_size = frame_byte_size(width, height, bit_depth);
  std::vector<Frame> frames;
  pos = eol + 1;
  while (pos < all.size()) {
    const std::size_t index = frames.size();
    const auto marker_end = all.find('\n', pos);
    if (marker_end == std::string_view::npos) {
      fail(ErrorKind::Truncation, "y4m: frame " + std::to_string(index) + " header is truncated");
    }
    if (all.substr(pos, 5) != "FRAME") {
      fail(ErrorKind::Format, "y4m: expected FRAME marker for frame " + std::to_string(index));
    }
    pos = marker_end + 1;
    if (all.size() - pos < frame_size) {
      fail(ErrorKind::Truncation, "y4m: frame " + std::to_string(index) + " payload is truncated");
    }
    frames.push_back(decode_planar(bytes.subspan(pos, frame_size), width, height, bit_depth));
    pos += frame_size;
  }
  return VideoSequence(std::move(frames), rate);
}

std::vector<std::uint8_t> write_y4m(const VideoSequence& sequence) {
  const std::string chroma = sequence.bit_depth() > 8 ? "C420p10" : "C420jpeg";
  const std::string header = "YUV4MPEG2 W" + std::to_string(sequence.width()) + " H" +
                             std::to_string(sequence.height()) + " F" +
                             std::to_string(sequence.frame_rate().num) + ":" +
                             std::to_string(sequence.frame_rate().den) + " Ip A0:0 " + chroma + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (const auto& frame : sequence.frames()) {
    constexpr std::string_view kMarker = "FRAME\n";
    out.insert(out.end(), kMarker.begin(), kMarker.end());
    encode_planar(frame, out);
  }
  return out;
}

VideoSequence read_raw_yuv(std::span<const std::uint8_t> bytes, int width, int height, int bit_depth,
                           std::size_t frame_count, FrameRate rate) {
  if (width < 2 || height < 2) fail(ErrorKind::Argument, "raw yuv: geometry must be at least 2x2");
  const std::size_t frame_size = frame_byte_size(width, height, bit_depth);
  if (bytes.size() < frame_count * frame_size) {
    fail(ErrorKind::Truncation, "raw yuv: stream holds " + std::to_string(bytes.size() / frame_size) +
                                    " complete frames, " + std::to_string(frame_count) + " requested");
  }
  std::vector<Frame> frames;
  frames.reserve(frame_count);
  for (std::size_t i = 0; i < frame_count; ++i) {
    frames.push_back(decode_planar(bytes.subspan(i * frame_size, frame_size), width, height, bit_depth));
  }
  return VideoSequence(std::move(frames), rate);
}

std::vector<std::uint8_t> write_raw_yuv(const VideoSequence& sequence) {
  std::vector<std::uint8_t> out;
  for (const auto& frame : sequence.frames()) encode_planar(frame, out);
  return out;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "short write to '" + path + "'");
}

}  // namespace lwvc
