#include "lwvc/bitstream.hpp"

#include <algorithm>
#include <cstring>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "lwvc/error.hpp"

namespace lwvc {

const char* to_string(UnitType type) noexcept {
  switch (type) {
    case UnitType::Lowpass: return "lowpass";
    case UnitType::Highpass: return "highpass";
    case UnitType::Motion: return "motion";
    case UnitType::GopHeader: return "gop_header";
  }
  return "?";
}

namespace {

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

 private:
  void put(std::uint32_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t>& out_;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> data, const char* what) : data_(data), what_(what) {}
  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return get(4); }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) {
      fail(ErrorKind::Corruption, std::string(what_) + ": length overruns the stream at byte " +
                                      std::to_string(pos_));
    }
  }
  std::uint32_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint32_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  const char* what_;
};

bool power_of_two(unsigned v) { return v != 0 && (v & (v - 1)) == 0; }

int log2u(unsigned v) {
  int l = 0;
  while ((1u << l) < v) ++l;
  return l;
}

std::string unit_label(std::size_t i, const CodedUnit& u) {
  return "unit " + std::to_string(i) + " (" + to_string(u.type) + ", level " +
         std::to_string(u.temporal_level) + ", index " + std::to_string(u.index) + ")";
}

}  // namespace

std::vector<std::uint8_t> encode_gop_header(const GopHeader& gop) {
  std::vector<std::uint8_t> out;
  ByteWriter w(out);
  w.u16(gop.gop_size);
  w.u8(gop.levels);
  w.u32(gop.first_frame);
  w.u8(gop.block_size);
  return out;
}

GopHeader decode_gop_header(std::span<const std::uint8_t> payload) {
  ByteReader r(payload, "gop header");
  GopHeader g;
  g.gop_size = r.u16();
  g.levels = r.u8();
  g.first_frame = r.u32();
  g.block_size = r.u8();
  if (r.remaining() != 0) fail(ErrorKind::Corruption, "gop header: trailing bytes");
  if (!power_of_two(g.gop_size) || g.gop_size > 16 || log2u(g.gop_size) != g.levels || g.block_size == 0) {
    fail(ErrorKind::Corruption, "gop header: inconsistent GOP size " + std::to_string(g.gop_size) +
                                    " / levels " + std::to_string(g.levels));
  }
  return g;
}

std::vector<std::uint8_t> write_stream(const StreamHeader& h, std::span<const CodedUnit> units) {
  std::vector<std::uint8_t> out;
  ByteWriter w(out);
  w.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>("LWVC"), 4));
  w.u8(h.version);
  w.u32(h.width);
  w.u32(h.height);
  w.u8(h.bit_depth);
  w.u32(h.frame_count);
  w.u16(h.rate_num);
  w.u16(h.rate_den);
  w.u8(static_cast<std::uint8_t>(h.kernel));
  w.u8(h.spatial_levels);
  w.u16(h.q_fixed);
  w.u8(h.gop_mode);
  w.u8(h.flags);
  for (const auto& u : units) {
    w.u8(static_cast<std::uint8_t>(u.type));
    w.u8(u.temporal_level);
    w.u16(u.index);
    w.u32(static_cast<std::uint32_t>(u.payload.size()));
    w.bytes(u.payload);
  }
  return out;
}

ParsedStream parse_stream(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "LWVC", 4) != 0) {
    fail(ErrorKind::Format, "stream: bad magic (expected LWVC)");
  }
  ByteReader r(bytes.subspan(4), "stream header");
  ParsedStream s;
  StreamHeader& h = s.header;
  h.version = r.u8();
  if (h.version > kStreamVersion) {
    fail(ErrorKind::Unsupported, "stream: version " + std::to_string(h.version) + " is newer than " +
                                     std::to_string(kStreamVersion));
  }
  if (h.version == 0) fail(ErrorKind::Format, "stream: version 0 is invalid");
  h.width = r.u32();
  h.height = r.u32();
  h.bit_depth = r.u8();
  h.frame_count = r.u32();
  h.rate_num = r.u16();
  h.rate_den = r.u16();
  const std::uint8_t kernel = r.u8();
  h.spatial_levels = r.u8();
  h.q_fixed = r.u16();
  h.gop_mode = r.u8();
  h.flags = r.u8();
  if (h.width < 2 || h.height < 2) fail(ErrorKind::Format, "stream: invalid dimensions");
  if (h.bit_depth != 8 && h.bit_depth != 10) fail(ErrorKind::Format, "stream: invalid bit depth");
  if (kernel > 1) fail(ErrorKind::Format, "stream: unknown kernel id " + std::to_string(kernel));
  if (h.rate_num == 0 || h.rate_den == 0) fail(ErrorKind::Format, "stream: zero frame rate");
  h.kernel = static_cast<Kernel>(kernel);

  ByteReader units(bytes.subspan(kStreamHeaderSize), "unit table");
  int gop_levels = -1;
  int last_level = 0;
  bool expect_lowpass = false;
  while (units.remaining() > 0) {
    CodedUnit u;
    const std::size_t i = s.units.size();
    const std::uint8_t type = units.u8();
    if (type > 3) fail(ErrorKind::Corruption, "unit " + std::to_string(i) + ": unknown type " + std::to_string(type));
    u.type = static_cast<UnitType>(type);
    u.temporal_level = units.u8();
    u.index = units.u16();
    const std::uint32_t length = units.u32();
    if (length > units.remaining()) {
      fail(ErrorKind::Corruption, unit_label(i, u) + ": payload length " + std::to_string(length) +
                                      " overruns the stream");
    }
    auto payload = units.bytes(length);
    u.payload.assign(payload.begin(), payload.end());

    if (u.type == UnitType::GopHeader) {
      if (expect_lowpass) fail(ErrorKind::Corruption, unit_label(i, u) + ": previous GOP has no lowpass");
      gop_levels = decode_gop_header(u.payload).levels;
      if (u.temporal_level != gop_levels) {
        fail(ErrorKind::Corruption, unit_label(i, u) + ": level tag disagrees with GOP header");
      }
      expect_lowpass = true;
      last_level = gop_levels;
    } else if (gop_levels < 0) {
      fail(ErrorKind::Corruption, unit_label(i, u) + ": unit precedes the first GOP header");
    } else if (u.type == UnitType::Lowpass) {
      if (!expect_lowpass || u.temporal_level != gop_levels || u.index != 0) {
        fail(ErrorKind::Corruption, unit_label(i, u) + ": lowpass out of place");
      }
      expect_lowpass = false;
    } else {
      if (expect_lowpass) fail(ErrorKind::Corruption, unit_label(i, u) + ": GOP does not start with its lowpass");
      if (u.temporal_level < 1 || u.temporal_level > last_level) {
        fail(ErrorKind::Corruption, unit_label(i, u) + ": violates coarse-to-fine unit order");
      }
      last_level = u.temporal_level;
    }
    s.units.push_back(std::move(u));
  }
  if (expect_lowpass) fail(ErrorKind::Corruption, "stream: final GOP has no lowpass unit");
  return s;
}

std::vector<GopView> split_gops(const ParsedStream& stream) {
  std::vector<GopView> gops;
  for (std::size_t i = 0; i < stream.units.size(); ++i) {
    if (stream.units[i].type == UnitType::GopHeader) {
      if (!gops.empty()) gops.back().unit_end = i;
      GopView g;
      g.header = decode_gop_header(stream.units[i].payload);
      g.unit_begin = i;
      gops.push_back(g);
    }
  }
  if (!gops.empty()) gops.back().unit_end = stream.units.size();

  for (auto& g : gops) {
    // Count units per (level, type); levels present must be complete and
    // contiguous from the coarsest level down.
    std::vector<int> highs(g.header.levels + 1, 0), motions(g.header.levels + 1, 0);
    for (std::size_t i = g.unit_begin + 1; i < g.unit_end; ++i) {
      const CodedUnit& u = stream.units[i];
      if (u.type == UnitType::Lowpass) continue;
      const int expected = g.header.gop_size >> u.temporal_level;
      if (u.index >= expected) {
        fail(ErrorKind::Corruption, unit_label(i, u) + ": index exceeds level size " + std::to_string(expected));
      }
      (u.type == UnitType::Highpass ? highs : motions)[u.temporal_level]++;
    }
    int finest = g.header.levels + 1;
    for (int j = g.header.levels; j >= 1; --j) {
      if (highs[j] == 0 && motions[j] == 0) break;
      finest = j;
    }
    for (int j = 1; j <= g.header.levels; ++j) {
      const int expected = j >= finest ? g.header.gop_size >> j : 0;
      if (highs[j] != expected || motions[j] != expected) {
        fail(ErrorKind::Corruption, "GOP at frame " + std::to_string(g.header.first_frame) + ": level " +
                                        std::to_string(j) + " is incomplete");
      }
    }
    g.dropped = finest - 1;
  }
  return gops;
}

ParsedStream drop_layers(const ParsedStream& stream, int k) {
  if (k < 0) fail(ErrorKind::Argument, "drop_layers: k must be nonnegative");
  const auto gops = split_gops(stream);
  if (k == 0) return stream;
  int already = -1;
  for (const auto& g : gops) {
    if (k > g.header.levels) {
      fail(ErrorKind::Argument, "drop_layers: cannot drop " + std::to_string(k) + " levels from the GOP at frame " +
                                    std::to_string(g.header.first_frame) + " which has " +
                                    std::to_string(g.header.levels));
    }
    if (already >= 0 && g.dropped != already) {
      fail(ErrorKind::Corruption, "drop_layers: GOPs disagree on dropped temporal levels");
    }
    already = g.dropped;
  }
  if (already < 0 || k <= already) return stream;

  ParsedStream out;
  out.header = stream.header;
  std::uint32_t frames = 0;
  for (const auto& g : gops) frames += static_cast<std::uint32_t>(g.header.gop_size >> k);
  out.header.frame_count = frames;
  const std::uint32_t factor = 1u << (k - already);
  const std::uint32_t num = out.header.rate_num;
  const std::uint32_t den = out.header.rate_den * factor;
  const std::uint32_t g = std::gcd(num, den);
  if (den / g > 0xFFFF) fail(ErrorKind::Argument, "drop_layers: frame rate denominator overflows");
  out.header.rate_num = static_cast<std::uint16_t>(num / g);
  out.header.rate_den = static_cast<std::uint16_t>(den / g);
  for (const auto& u : stream.units) {
    const bool temporal_detail = u.type == UnitType::Highpass || u.type == UnitType::Motion;
    if (temporal_detail && u.temporal_level <= k) continue;
    out.units.push_back(u);
  }
  return out;
}

std::vector<std::uint8_t> drop_layers(std::span<const std::uint8_t> bytes, int k) {
  const ParsedStream parsed = parse_stream(bytes);
  if (k == 0) {
    split_gops(parsed);
    return {bytes.begin(), bytes.end()};
  }
  const ParsedStream dropped = drop_layers(parsed, k);
  return write_stream(dropped.header, dropped.units);
}

std::string dump_units(const ParsedStream& stream) {
  std::ostringstream os;
  const auto& h = stream.header;
  os << "# " << h.width << "x" << h.height << " " << static_cast<int>(h.bit_depth) << "-bit, " << h.frame_count
     << " frames @ " << h.rate_num << "/" << h.rate_den << " fps, kernel " << to_string(h.kernel)
     << ", spatial levels " << static_cast<int>(h.spatial_levels) << ", q " << h.q()
     << (h.lossless() ? ", lossless" : "") << "\n";
  os << std::left << std::setw(6) << "unit" << std::setw(12) << "type" << std::setw(7) << "level"
     << std::setw(7) << "index" << "bytes\n";
  for (std::size_t i = 0; i < stream.units.size(); ++i) {
    const auto& u = stream.units[i];
    os << std::setw(6) << i << std::setw(12) << to_string(u.type) << std::setw(7)
       << static_cast<int>(u.temporal_level) << std::setw(7) << u.index << u.payload.size() << "\n";
  }
  return os.str();
}

}  // namespace lwvc
