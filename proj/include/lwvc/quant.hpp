#pragma once

#include <array>
#include <cstdint>

namespace lwvc {

/// Closed range of a log-linearly interpolated parameter.
struct Bounds {
  double lo = 1.0;
  double hi = 1.0;
  bool operator==(const Bounds&) const = default;
};

inline constexpr int kMaxTemporalLevels = 4;

/// Everything the continuous quantization index controls. Quantizer steps
/// (QP) are step sizes: larger means coarser.
struct QuantConfig {
  double q = 10.0;
  int q_num = 21;
  double lambda_min = 0.03;
  double lambda_max = 0.081;
  Bounds qp_low{0.5, 16.0};   // spatial LL band of temporal lowpass pictures
  Bounds qp_high{1.0, 64.0};  // every other band
  /// q_scale^(j) for temporal levels j = 1..4 (index j-1). Deeper levels
  /// get smaller multipliers, i.e. finer steps.
  std::array<Bounds, kMaxTemporalLevels> q_scale{{{1.0, 1.0}, {0.85, 0.9}, {0.7, 0.8}, {0.6, 0.7}}};
  /// Motion-search rate weight per temporal level.
  std::array<Bounds, kMaxTemporalLevels> lambda_mv{{{1.0, 16.0}, {1.0, 12.0}, {1.0, 10.0}, {1.0, 8.0}}};

  double q_max() const { return static_cast<double>(q_num - 1); }

  /// Throws ErrorKind::Config on any violated invariant, ErrorKind::Argument
  /// when q lies outside [0, q_num - 1].
  void validate() const;
};

/// exp(ln lo + q / (q_num - 1) * (ln hi - ln lo)); endpoints are returned
/// exactly. Requires 0 < lo <= hi and q in [0, q_num - 1].
double interpolate_bounded(double q, Bounds bounds, int q_num = 21);

/// Rate-distortion trade-off lambda for a quantization index.
double interpolate_lambda(double q, const QuantConfig& config);

/// QP^(j) = QP * q_scale^(j).
double layer_scale_qp(double qp, double q_scale);

/// q_scale^(j) at the config's q; level 0 (intra, no temporal transform)
/// is unscaled.
double level_scale(const QuantConfig& config, int level);

/// Quantizer steps for one temporal subband picture.
struct SubbandSteps {
  double lowpass_ll = 1.0;  // coarsest spatial LL of a temporal lowpass
  double other = 1.0;
};

SubbandSteps temporal_lowpass_steps(const QuantConfig& config, int level);
SubbandSteps temporal_highpass_steps(const QuantConfig& config, int level);

double motion_lambda(const QuantConfig& config, int level);

/// sign(c) * floor(|c| / step).
std::int32_t quantize_deadzone(double coefficient, double step);
/// 0 for index 0, otherwise sign(i) * (|i| + 0.5) * step.
double dequantize(std::int32_t index, double step);

}  // namespace lwvc
