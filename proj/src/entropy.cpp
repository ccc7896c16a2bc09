#include "lwvc/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <string>

#include "lwvc/error.hpp"

namespace lwvc {

int significance_context(int significant_neighbours, int parent_magnitude) {
  return std::min(significant_neighbours, 2) * 3 + std::min(parent_magnitude, 2);
}

int sign_context(int left, int top) {
  const int s = (left > 0) - (left < 0) + (top > 0) - (top < 0);
  return s < 0 ? 0 : (s == 0 ? 1 : 2);
}

int magnitude_context(int bin, int neighbour_magnitude) {
  if (bin == 0) return neighbour_magnitude > 2 ? 1 : 0;
  return std::min(bin + 1, 4);
}

namespace {

constexpr int kUnaryBins = 16;
constexpr int kMaxGolombPrefix = 30;

void encode_golomb_bypass(RangeEncoder& enc, std::uint32_t value) {
  const int k = std::bit_width(value + 1) - 1;
  for (int i = 0; i < k; ++i) enc.encode_bypass(1);
  enc.encode_bypass(0);
  enc.encode_bypass_bits(value + 1, k);
}

std::uint32_t decode_golomb_bypass(RangeDecoder& dec) {
  int k = 0;
  while (dec.decode_bypass()) {
    if (++k > kMaxGolombPrefix) fail(ErrorKind::Corruption, "exp-Golomb prefix too long");
  }
  return ((1u << k) | dec.decode_bypass_bits(k)) - 1u;
}

// Raw low-order magnitude bits, from the causal neighbours' magnitude sum.
int low_bits(int neighbour_magnitude) {
  return std::max(0, static_cast<int>(std::bit_width(static_cast<unsigned>(neighbour_magnitude))) - 3);
}

// Neighbourhood of (x, y) within a band of already-coded symbols.
struct Neighbourhood {
  int significant = 0;
  int left = 0;
  int top = 0;
};

Neighbourhood neighbourhood(const IntPlane& sym, int x, int y) {
  Neighbourhood n;
  const int w = sym.width();
  if (x > 0) n.left = sym(x - 1, y);
  if (y > 0) {
    n.top = sym(x, y - 1);
    if (x > 0) n.significant += sym(x - 1, y - 1) != 0;
    if (x + 1 < w) n.significant += sym(x + 1, y - 1) != 0;
  }
  n.significant += (n.left != 0) + (n.top != 0);
  return n;
}

int parent_magnitude(const IntPlane* parent, int x, int y) {
  if (parent == nullptr || parent->empty()) return 0;
  return std::abs(parent->clamped(x / 2, y / 2));
}

void encode_symbols(RangeEncoder& enc, BandContexts& ctx, const IntPlane& sym, const IntPlane* parent) {
  for (int y = 0; y < sym.height(); ++y) {
    for (int x = 0; x < sym.width(); ++x) {
      const int v = sym(x, y);
      const Neighbourhood n = neighbourhood(sym, x, y);
      enc.encode(ctx.significance[significance_context(n.significant, parent_magnitude(parent, x, y))], v != 0);
      if (v == 0) continue;
      enc.encode(ctx.sign[sign_context(n.left, n.top)], v < 0);
      const std::uint32_t m = static_cast<std::uint32_t>(std::abs(v)) - 1;
      const int nm = std::abs(n.left) + std::abs(n.top);
      const int k = low_bits(nm);
      const std::uint32_t high = m >> k;
      int bin = 0;
      for (; bin < kUnaryBins; ++bin) {
        const int more = high > static_cast<std::uint32_t>(bin);
        enc.encode(ctx.magnitude[magnitude_context(bin, nm) + (k > 0 ? 5 : 0)], more);
        if (!more) break;
      }
      if (bin == kUnaryBins) encode_golomb_bypass(enc, high - kUnaryBins);
      enc.encode_bypass_bits(m & ((1u << k) - 1u), k);
    }
  }
}

IntPlane decode_symbols(RangeDecoder& dec, BandContexts& ctx, int width, int height, const IntPlane* parent) {
  IntPlane sym(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Neighbourhood n = neighbourhood(sym, x, y);
      if (!dec.decode(ctx.significance[significance_context(n.significant, parent_magnitude(parent, x, y))])) {
        continue;
      }
      const bool negative = dec.decode(ctx.sign[sign_context(n.left, n.top)]);
      const int nm = std::abs(n.left) + std::abs(n.top);
      const int k = low_bits(nm);
      std::uint32_t high = 0;
      while (high < kUnaryBins &&
             dec.decode(ctx.magnitude[magnitude_context(static_cast<int>(high), nm) + (k > 0 ? 5 : 0)])) {
        ++high;
      }
      if (high == kUnaryBins) high += decode_golomb_bypass(dec);
      if (high >= (1u << (30 - k))) fail(ErrorKind::Corruption, "coefficient magnitude out of range");
      const std::uint32_t m = (high << k) | dec.decode_bypass_bits(k);
      const int mag = static_cast<int>(m) + 1;
      sym(x, y) = negative ? -mag : mag;
    }
  }
  return sym;
}

std::int32_t med_predict(const IntPlane& v, int x, int y) {
  if (x == 0 && y == 0) return 0;
  if (y == 0) return v(x - 1, y);
  if (x == 0) return v(x, y - 1);
  const std::int32_t a = v(x - 1, y), b = v(x, y - 1), c = v(x - 1, y - 1);
  if (c >= std::max(a, b)) return std::min(a, b);
  if (c <= std::min(a, b)) return std::max(a, b);
  return a + b - c;
}

IntPlane extract(const IntPlane& p, const BandRect& r) {
  IntPlane out(r.width, r.height);
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) out(x, y) = p(r.x + x, r.y + y);
  }
  return out;
}

void insert(IntPlane& p, const BandRect& r, const IntPlane& band) {
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) p(r.x + x, r.y + y) = band(x, y);
  }
}

void encode_ll(RangeEncoder& enc, BandContexts& ctx, const IntPlane& band) {
  IntPlane residual(band.width(), band.height());
  for (int y = 0; y < band.height(); ++y) {
    for (int x = 0; x < band.width(); ++x) residual(x, y) = band(x, y) - med_predict(band, x, y);
  }
  encode_symbols(enc, ctx, residual, nullptr);
}

IntPlane decode_ll(RangeDecoder& dec, BandContexts& ctx, int width, int height) {
  const IntPlane residual = decode_symbols(dec, ctx, width, height, nullptr);
  IntPlane band(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) band(x, y) = residual(x, y) + med_predict(band, x, y);
  }
  return band;
}

constexpr Orientation kDetail[3] = {Orientation::HL, Orientation::LH, Orientation::HH};

BandRect ll_rect(int width, int height, int levels) {
  return levels == 0 ? BandRect{0, 0, width, height} : band_rect(width, height, levels, Orientation::LL);
}

}  // namespace

void encode_plane_indices(RangeEncoder& enc, PictureContexts& ctx, int plane_index, const IntPlane& indices,
                          int levels) {
  const int w = indices.width(), h = indices.height();
  encode_ll(enc, ctx.at(plane_index, Orientation::LL), extract(indices, ll_rect(w, h, levels)));
  std::array<IntPlane, 3> parents;
  for (int l = levels; l >= 1; --l) {
    for (int o = 0; o < 3; ++o) {
      IntPlane band = extract(indices, band_rect(w, h, l, kDetail[o]));
      encode_symbols(enc, ctx.at(plane_index, kDetail[o]), band, l < levels ? &parents[o] : nullptr);
      parents[o] = std::move(band);
    }
  }
}

IntPlane decode_plane_indices(RangeDecoder& dec, PictureContexts& ctx, int plane_index, int width, int height,
                              int levels) {
  IntPlane indices(width, height);
  const BandRect ll = ll_rect(width, height, levels);
  insert(indices, ll, decode_ll(dec, ctx.at(plane_index, Orientation::LL), ll.width, ll.height));
  std::array<IntPlane, 3> parents;
  for (int l = levels; l >= 1; --l) {
    for (int o = 0; o < 3; ++o) {
      const BandRect r = band_rect(width, height, l, kDetail[o]);
      IntPlane band = decode_symbols(dec, ctx.at(plane_index, kDetail[o]), r.width, r.height,
                                     l < levels ? &parents[o] : nullptr);
      insert(indices, r, band);
      parents[o] = std::move(band);
    }
  }
  return indices;
}

std::vector<std::uint8_t> code_subband(const IntPlane& band, Orientation orientation) {
  RangeEncoder enc;
  BandContexts ctx;
  if (orientation == Orientation::LL) {
    encode_ll(enc, ctx, band);
  } else {
    encode_symbols(enc, ctx, band, nullptr);
  }
  return enc.finish();
}

IntPlane decode_subband(std::span<const std::uint8_t> payload, Orientation orientation, int width, int height) {
  RangeDecoder dec(payload);
  BandContexts ctx;
  IntPlane band = orientation == Orientation::LL ? decode_ll(dec, ctx, width, height)
                                                 : decode_symbols(dec, ctx, width, height, nullptr);
  dec.finish();
  return band;
}

namespace {

struct MotionContexts {
  std::array<BinaryContext, 2> zero{};
  std::array<BinaryContext, 2> sign{};
  std::array<std::array<BinaryContext, 4>, 2> prefix{};
};

void encode_component(RangeEncoder& enc, MotionContexts& ctx, int comp, int residual) {
  enc.encode(ctx.zero[comp], residual != 0);
  if (residual == 0) return;
  enc.encode(ctx.sign[comp], residual < 0);
  const auto value = static_cast<std::uint32_t>(std::abs(residual) - 1);
  const int k = std::bit_width(value + 1) - 1;
  for (int i = 0; i < k; ++i) enc.encode(ctx.prefix[comp][std::min(i, 3)], 1);
  enc.encode(ctx.prefix[comp][std::min(k, 3)], 0);
  enc.encode_bypass_bits(value + 1, k);
}

int decode_component(RangeDecoder& dec, MotionContexts& ctx, int comp) {
  if (!dec.decode(ctx.zero[comp])) return 0;
  const bool negative = dec.decode(ctx.sign[comp]);
  int k = 0;
  while (dec.decode(ctx.prefix[comp][std::min(k, 3)])) {
    if (++k > kMaxGolombPrefix) fail(ErrorKind::Corruption, "motion vector residual prefix too long");
  }
  const std::uint32_t value = ((1u << k) | dec.decode_bypass_bits(k)) - 1u;
  if (value >= (1u << 24)) fail(ErrorKind::Corruption, "motion vector residual out of range");
  const int mag = static_cast<int>(value) + 1;
  return negative ? -mag : mag;
}

}  // namespace

void encode_motion_field(RangeEncoder& enc, const MotionField& field) {
  MotionContexts ctx;
  for (int by = 0; by < field.rows(); ++by) {
    for (int bx = 0; bx < field.cols(); ++bx) {
      const MotionVector pred = median_predictor(field, bx, by);
      const MotionVector v = field.at(bx, by);
      encode_component(enc, ctx, 0, v.dx - pred.dx);
      encode_component(enc, ctx, 1, v.dy - pred.dy);
    }
  }
}

MotionField decode_motion_field(RangeDecoder& dec, int block_size, int width, int height) {
  MotionField field(block_size, width, height);
  MotionContexts ctx;
  for (int by = 0; by < field.rows(); ++by) {
    for (int bx = 0; bx < field.cols(); ++bx) {
      const MotionVector pred = median_predictor(field, bx, by);
      const int dx = decode_component(dec, ctx, 0);
      const int dy = decode_component(dec, ctx, 1);
      field.at(bx, by) = {pred.dx + dx, pred.dy + dy};
    }
  }
  return field;
}

std::vector<std::uint8_t> code_motion_field(const MotionField& field) {
  RangeEncoder enc;
  encode_motion_field(enc, field);
  return enc.finish();
}

MotionField decode_motion_field(std::span<const std::uint8_t> payload, int block_size, int width, int height) {
  RangeDecoder dec(payload);
  MotionField field = decode_motion_field(dec, block_size, width, height);
  dec.finish();
  return field;
}

}  // namespace lwvc
