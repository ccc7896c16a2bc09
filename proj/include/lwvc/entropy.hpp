#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lwvc/dwt2d.hpp"
#include "lwvc/motion.hpp"
#include "lwvc/plane.hpp"
#include "lwvc/range_coder.hpp"

namespace lwvc {

/// Context set for one band orientation: significance by (causal
/// neighbour count x parent significance), sign by neighbour signs, and
/// the unary magnitude bins (split by whether raw low bits follow).
struct BandContexts {
  static constexpr int kSignificance = 9;
  static constexpr int kSign = 3;
  static constexpr int kMagnitude = 10;

  std::array<BinaryContext, kSignificance> significance{};
  std::array<BinaryContext, kSign> sign{};
  std::array<BinaryContext, kMagnitude> magnitude{};
};

/// Context index functions, identical on both sides.
int significance_context(int significant_neighbours, int parent_magnitude);
int sign_context(int left, int top);
int magnitude_context(int bin, int neighbour_magnitude);

/// Contexts for a whole picture: one set per (luma/chroma, orientation).
struct PictureContexts {
  std::array<std::array<BandContexts, 4>, 2> bands{};
  BandContexts& at(int plane, Orientation o) {
    return bands[plane == 0 ? 0 : 1][static_cast<int>(o)];
  }
};

/// Quantization indices of one plane in Mallat layout, coded band by band:
/// coarsest LL, then HL, LH, HH from the coarsest level to the finest.
/// The LL band is coded as a residual against a median edge predictor.
/// `levels == 0` codes the plane as a single LL band.
void encode_plane_indices(RangeEncoder& enc, PictureContexts& ctx, int plane_index,
                          const IntPlane& indices, int levels);
IntPlane decode_plane_indices(RangeDecoder& dec, PictureContexts& ctx, int plane_index, int width,
                              int height, int levels);

/// Self-contained payload for one band (fresh contexts).
std::vector<std::uint8_t> code_subband(const IntPlane& band, Orientation orientation);
IntPlane decode_subband(std::span<const std::uint8_t> payload, Orientation orientation, int width,
                        int height);

/// Lossless median-predicted motion vector coding.
void encode_motion_field(RangeEncoder& enc, const MotionField& field);
MotionField decode_motion_field(RangeDecoder& dec, int block_size, int width, int height);

std::vector<std::uint8_t> code_motion_field(const MotionField& field);
MotionField decode_motion_field(std::span<const std::uint8_t> payload, int block_size, int width,
                                int height);

}  // namespace lwvc
