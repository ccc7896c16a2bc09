#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lwvc/media_io.hpp"
#include "lwvc/plane.hpp"

namespace lwvc {

/// Displacement in half-pel luma units. A block at position p is predicted
/// from the reference at p + v/2.
struct MotionVector {
  int dx = 0;
  int dy = 0;
  bool operator==(const MotionVector&) const = default;
};

struct MotionSearch {
  int block_size = 8;
  int search_range = 32;  // integer pels
  double lambda_mv = 0.0;
};

class MotionField {
 public:
  MotionField() = default;
  /// All-zero field for a `width` x `height` luma plane.
  MotionField(int block_size, int width, int height);

  int block_size() const noexcept { return block_size_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int cols() const noexcept { return cols_; }
  int rows() const noexcept { return rows_; }

  MotionVector& at(int bx, int by) { return vectors_[index(bx, by)]; }
  const MotionVector& at(int bx, int by) const { return vectors_[index(bx, by)]; }

  std::span<MotionVector> vectors() noexcept { return vectors_; }
  std::span<const MotionVector> vectors() const noexcept { return vectors_; }

  bool operator==(const MotionField&) const = default;

 private:
  std::size_t index(int bx, int by) const {
    return static_cast<std::size_t>(by) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(bx);
  }

  int block_size_ = 8;
  int width_ = 0;
  int height_ = 0;
  int cols_ = 0;
  int rows_ = 0;
  std::vector<MotionVector> vectors_;
};

/// Component-wise median of the left, top and top-right neighbours, with
/// fallbacks on the first row/column. Shared by the search cost and the
/// motion-vector entropy coder.
MotionVector median_predictor(const MotionField& field, int bx, int by);

/// Length of the signed exp-Golomb code for one vector component residual.
int signed_golomb_bits(int value);

/// Block matching that minimises SAD + lambda_mv * bits(mv - predictor).
/// Search ranges up to 4 pels are searched exhaustively at half-pel
/// precision; larger ranges use a two-level coarse-to-fine integer search
/// followed by a +-1 half-pel refinement. Ties go to the smallest
/// |dx|+|dy|, then |dy|, |dx|, dy, dx.
MotionField estimate_motion(const IntPlane& reference, const IntPlane& current,
                            const MotionSearch& search);
MotionField estimate_motion(const Frame& reference, const Frame& current, const MotionSearch& search);

/// Sample of `plane` at quarter-sample position (x4, y4), bilinear with
/// edge clamping.
std::int32_t sample_bilinear(const IntPlane& plane, int x4, int y4);

/// Gather prediction. `shift` is the plane's subsampling relative to luma
/// (0 for luma, 1 for 4:2:0 chroma).
IntPlane motion_compensate(const IntPlane& reference, const MotionField& field, int shift = 0);

/// Result of scattering a highpass back along its motion vectors. Weights
/// are in 1/16 units so the accumulation stays exact in integers.
struct InverseCompensation {
  Plane<std::int64_t> accum;
  Plane<std::int32_t> weight;

  static constexpr int kUnitWeight = 16;

  /// accum / weight where covered, 0 elsewhere.
  double update(int x, int y) const;
  RealPlane update_plane() const;
  /// Per-pixel accumulated weight in pixel units (1.0 == one full hit).
  RealPlane coverage() const;
};

InverseCompensation inverse_motion_compensate(const IntPlane& highpass, const MotionField& field,
                                              int shift = 0);

}  // namespace lwvc
