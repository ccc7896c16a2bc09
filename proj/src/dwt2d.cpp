#include "lwvc/dwt2d.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "lwvc/error.hpp"

namespace lwvc {

const char* to_string(Kernel kernel) noexcept {
  return kernel == Kernel::LeGall53 ? "5/3" : "9/7";
}

namespace {

// CDF 9/7 lifting coefficients.
constexpr double kAlpha = -1.586134342059924;
constexpr double kBeta = -0.052980118572961;
constexpr double kGamma = 0.882911075530934;
constexpr double kDelta = 0.443506852043971;
constexpr double kK = 1.230174104914001;

// Whole-sample symmetric extension; keeps the parity of the index.
inline std::size_t mirror(std::ptrdiff_t i, std::ptrdiff_t n) {
  if (i < 0) i = -i;
  if (i >= n) i = 2 * (n - 1) - i;
  return static_cast<std::size_t>(i);
}

template <typename Step>
void lift_pass(std::span<double> x, std::size_t parity, Step step) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  for (std::ptrdiff_t k = static_cast<std::ptrdiff_t>(parity); k < n; k += 2) {
    x[k] = step(x[k], x[mirror(k - 1, n)], x[mirror(k + 1, n)]);
  }
}

void deinterleave(std::span<double> x, std::vector<double>& scratch) {
  const std::size_t n = x.size();
  const std::size_t low = (n + 1) / 2;
  scratch.resize(n);
  for (std::size_t i = 0; i < n; ++i) scratch[(i % 2 == 0) ? i / 2 : low + i / 2] = x[i];
  std::copy(scratch.begin(), scratch.end(), x.begin());
}

void interleave(std::span<double> x, std::vector<double>& scratch) {
  const std::size_t n = x.size();
  const std::size_t low = (n + 1) / 2;
  scratch.resize(n);
  for (std::size_t i = 0; i < n; ++i) scratch[i] = x[(i % 2 == 0) ? i / 2 : low + i / 2];
  std::copy(scratch.begin(), scratch.end(), x.begin());
}

void forward_interleaved(std::span<double> x, Kernel kernel) {
  if (kernel == Kernel::LeGall53) {
    lift_pass(x, 1, [](double v, double a, double b) { return v - std::floor((a + b) / 2.0); });
    lift_pass(x, 0, [](double v, double a, double b) { return v + std::floor((a + b + 2.0) / 4.0); });
    return;
  }
  lift_pass(x, 1, [](double v, double a, double b) { return v + kAlpha * (a + b); });
  lift_pass(x, 0, [](double v, double a, double b) { return v + kBeta * (a + b); });
  lift_pass(x, 1, [](double v, double a, double b) { return v + kGamma * (a + b); });
  lift_pass(x, 0, [](double v, double a, double b) { return v + kDelta * (a + b); });
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = (k % 2 == 0) ? x[k] / kK : x[k] * kK;
}

void inverse_interleaved(std::span<double> x, Kernel kernel) {
  if (kernel == Kernel::LeGall53) {
    lift_pass(x, 0, [](double v, double a, double b) { return v - std::floor((a + b + 2.0) / 4.0); });
    lift_pass(x, 1, [](double v, double a, double b) { return v + std::floor((a + b) / 2.0); });
    return;
  }
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = (k % 2 == 0) ? x[k] * kK : x[k] / kK;
  lift_pass(x, 0, [](double v, double a, double b) { return v - kDelta * (a + b); });
  lift_pass(x, 1, [](double v, double a, double b) { return v - kGamma * (a + b); });
  lift_pass(x, 0, [](double v, double a, double b) { return v - kBeta * (a + b); });
  lift_pass(x, 1, [](double v, double a, double b) { return v - kAlpha * (a + b); });
}

// Lifting along rows (horizontal) or columns (vertical) of the top-left
// w x h region of `plane`.
template <bool Forward>
void transform_region(RealPlane& plane, int w, int h, Kernel kernel) {
  std::vector<double> line;
  std::vector<double> scratch;
  auto run = [&](std::span<double> s) {
    if (s.size() < 2) return;
    if constexpr (Forward) {
      forward_interleaved(s, kernel);
      deinterleave(s, scratch);
    } else {
      interleave(s, scratch);
      inverse_interleaved(s, kernel);
    }
  };
  auto rows = [&] {
    for (int y = 0; y < h; ++y) run(plane.row(y).subspan(0, static_cast<std::size_t>(w)));
  };
  auto cols = [&] {
    line.resize(static_cast<std::size_t>(h));
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y) line[y] = plane(x, y);
      run(line);
      for (int y = 0; y < h; ++y) plane(x, y) = line[y];
    }
  };
  if constexpr (Forward) {
    rows();
    cols();
  } else {
    cols();
    rows();
  }
}

int ceil_shift(int v, int s) { return (v + (1 << s) - 1) >> s; }

}  // namespace

BandRect band_rect(int width, int height, int level, Orientation orientation) {
  const int w = ceil_shift(width, level - 1);
  const int h = ceil_shift(height, level - 1);
  const int lw = (w + 1) / 2, lh = (h + 1) / 2;
  const int hw = w / 2, hh = h / 2;
  switch (orientation) {
    case Orientation::LL: return {0, 0, lw, lh};
    case Orientation::HL: return {lw, 0, hw, lh};
    case Orientation::LH: return {0, lh, lw, hh};
    case Orientation::HH: return {lw, lh, hw, hh};
  }
  return {};
}

int max_levels(int width, int height) {
  int levels = 0;
  while (ceil_shift(width, levels) >= 2 && ceil_shift(height, levels) >= 2) ++levels;
  return levels;
}

int default_levels(int width, int height) {
  int levels = 0;
  while (levels < 4 && ceil_shift(width, levels + 1) >= 8 && ceil_shift(height, levels + 1) >= 8) {
    ++levels;
  }
  if (levels == 0 && max_levels(width, height) >= 1) levels = 1;
  return levels;
}

SubbandImage::SubbandImage(Kernel kernel, int levels, RealPlane coefficients)
    : kernel_(kernel), levels_(levels), width_(coefficients.width()),
      height_(coefficients.height()), coeffs_(std::move(coefficients)) {}

RealPlane SubbandImage::band(int level, Orientation orientation) const {
  if (level < 1 || level > levels_ || (orientation == Orientation::LL && level != levels_)) {
    fail(ErrorKind::Argument, "no band at level " + std::to_string(level));
  }
  const BandRect r = rect(level, orientation);
  RealPlane out(r.width, r.height);
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) out(x, y) = coeffs_(r.x + x, r.y + y);
  }
  return out;
}

void forward_lift_1d(std::span<double> signal, Kernel kernel) {
  if (signal.size() < 2) return;
  std::vector<double> scratch;
  forward_interleaved(signal, kernel);
  deinterleave(signal, scratch);
}

void inverse_lift_1d(std::span<double> signal, Kernel kernel) {
  if (signal.size() < 2) return;
  std::vector<double> scratch;
  interleave(signal, scratch);
  inverse_interleaved(signal, kernel);
}

SubbandImage forward_dwt(const RealPlane& plane, int levels, Kernel kernel) {
  if (plane.width() < 2 || plane.height() < 2) {
    fail(ErrorKind::Argument, "dwt: plane must be at least 2x2");
  }
  if (levels < 1) fail(ErrorKind::Argument, "dwt: at least one level required");
  if (levels > max_levels(plane.width(), plane.height())) {
    fail(ErrorKind::LevelOverflow, "dwt: " + std::to_string(levels) + " levels exceed what a " +
                                       std::to_string(plane.width()) + "x" +
                                       std::to_string(plane.height()) + " plane supports");
  }
  RealPlane coeffs = plane;
  for (int l = 0; l < levels; ++l) {
    transform_region<true>(coeffs, ceil_shift(plane.width(), l), ceil_shift(plane.height(), l), kernel);
  }
  return SubbandImage(kernel, levels, std::move(coeffs));
}

SubbandImage forward_dwt(const IntPlane& plane, int levels, Kernel kernel) {
  return forward_dwt(plane_cast<double>(plane), levels, kernel);
}

RealPlane inverse_dwt(const SubbandImage& subbands) {
  const RealPlane& c = subbands.coefficients();
  if (c.width() != subbands.width() || c.height() != subbands.height() ||
      subbands.levels() > max_levels(subbands.width(), subbands.height()) || subbands.levels() < 1) {
    fail(ErrorKind::Consistency, "dwt: coefficient layout does not match recorded dimensions");
  }
  RealPlane plane = c;
  for (int l = subbands.levels() - 1; l >= 0; --l) {
    transform_region<false>(plane, ceil_shift(plane.width(), l), ceil_shift(plane.height(), l),
                            subbands.kernel());
  }
  return plane;
}

IntPlane inverse_dwt_rounded(const SubbandImage& subbands) {
  const RealPlane real = inverse_dwt(subbands);
  IntPlane out(real.width(), real.height());
  auto src = real.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<std::int32_t>(std::lround(src[i]));
  return out;
}

}  // namespace lwvc
