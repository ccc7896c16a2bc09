#pragma once

#include <cstdint>
#include <span>

#include "lwvc/plane.hpp"

namespace lwvc {

/// Spatial lifting kernels. The integer LeGall 5/3 kernel is fully
/// reversible; CDF 9/7 is the lossy default.
enum class Kernel : std::uint8_t { LeGall53 = 0, Cdf97 = 1 };

const char* to_string(Kernel kernel) noexcept;

enum class Orientation : std::uint8_t { LL = 0, HL = 1, LH = 2, HH = 3 };

struct BandRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  bool operator==(const BandRect&) const = default;
};

/// Location of a band inside the in-place (Mallat) coefficient layout of a
/// `width` x `height` plane. `level` counts from 1 (finest); LL exists only
/// at the coarsest level.
BandRect band_rect(int width, int height, int level, Orientation orientation);

/// Deepest decomposition that keeps every transformed region at least 2x2.
int max_levels(int width, int height);

/// Levels such that the coarsest LL stays at least 8x8, capped at 4 and
/// never below 1 when a single level is possible.
int default_levels(int width, int height);

/// Coefficients of a multi-level 2D DWT, stored in the Mallat layout.
class SubbandImage {
 public:
  SubbandImage(Kernel kernel, int levels, RealPlane coefficients);

  Kernel kernel() const noexcept { return kernel_; }
  int levels() const noexcept { return levels_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  const RealPlane& coefficients() const noexcept { return coeffs_; }
  RealPlane& coefficients() noexcept { return coeffs_; }

  BandRect rect(int level, Orientation orientation) const {
    return band_rect(width_, height_, level, orientation);
  }
  RealPlane band(int level, Orientation orientation) const;

 private:
  Kernel kernel_;
  int levels_;
  int width_;
  int height_;
  RealPlane coeffs_;
};

/// One-level 1D lifting, in place. Output is deinterleaved: the ceil(n/2)
/// lowpass samples first, then the floor(n/2) highpass samples. The 5/3
/// kernel assumes integer-valued input and produces integer-valued output.
void forward_lift_1d(std::span<double> signal, Kernel kernel);
void inverse_lift_1d(std::span<double> signal, Kernel kernel);

SubbandImage forward_dwt(const RealPlane& plane, int levels, Kernel kernel);
SubbandImage forward_dwt(const IntPlane& plane, int levels, Kernel kernel);

RealPlane inverse_dwt(const SubbandImage& subbands);

/// Inverse transform rounded to the nearest integer (exact for 5/3 input
/// that came from forward_dwt).
IntPlane inverse_dwt_rounded(const SubbandImage& subbands);

}  // namespace lwvc
