#pragma once

#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lwvc/media_io.hpp"

namespace lwvc {

/// PSNR of identical inputs. Distinct from every finite value.
inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

struct PsnrReport {
  double y = kInfinitePsnr;
  double cb = kInfinitePsnr;
  double cr = kInfinitePsnr;
  /// From the sample-count-weighted MSE over all three planes.
  double combined = kInfinitePsnr;
  /// (6 Y + Cb + Cr) / 8 over the per-plane PSNRs.
  double weighted_611 = kInfinitePsnr;
};

double psnr_from_mse(double mse, int bit_depth);

/// Sample-count-weighted MSE over Y, Cb and Cr.
double mse(const Frame& ref, const Frame& dist);

PsnrReport psnr(const Frame& ref, const Frame& dist);
/// Pooled over every sample of every frame.
PsnrReport psnr(const VideoSequence& ref, const VideoSequence& dist);

/// Five-scale MS-SSIM (11x11 Gaussian window, sigma 1.5, 'valid' filtering,
/// 2x2 average downsampling). Both planes must be at least 176x176.
double ms_ssim(const IntPlane& ref, const IntPlane& dist, int bit_depth);
/// Mean luma MS-SSIM over frames.
double ms_ssim(const VideoSequence& ref, const VideoSequence& dist);

/// -10 log10(1 - msssim); infinite at 1.
double ms_ssim_db(double value);

struct RDPoint {
  double rate = 0.0;
  double quality = 0.0;
  bool operator==(const RDPoint&) const = default;
};

struct RDCurve {
  std::string label;
  std::string rate_unit = "bpp";
  std::string metric = "psnr";
  std::vector<RDPoint> points;
  bool operator==(const RDCurve&) const = default;
};

/// Problems that make a curve suspicious without invalidating it (quality
/// inversions). Hard errors (nonpositive or non-increasing rate,
/// non-finite quality) are thrown by bd_rate.
std::vector<std::string> curve_warnings(const RDCurve& curve);

/// Classic Bjontegaard delta rate in percent: cubic least-squares fits of
/// ln(rate) against quality, integrated over the common quality interval.
/// Negative means the test curve needs less rate.
double bd_rate(const RDCurve& anchor, const RDCurve& test);

/// Columns: label, rate, rate_unit, quality, metric.
std::string emit_rd_csv(std::span<const RDCurve> curves);
std::vector<RDCurve> parse_rd_csv(std::string_view text);

}  // namespace lwvc
