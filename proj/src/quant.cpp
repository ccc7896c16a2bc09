#include "lwvc/quant.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lwvc/error.hpp"

namespace lwvc {

namespace {

void check_bounds(Bounds b, const char* name) {
  if (!(b.lo > 0.0) || !(b.hi >= b.lo) || !std::isfinite(b.hi)) {
    fail(ErrorKind::Config, std::string(name) + " bounds must satisfy 0 < min <= max");
  }
}

void check_q(double q, int q_num) {
  if (!(q >= 0.0 && q <= static_cast<double>(q_num - 1))) {
    fail(ErrorKind::Argument, "quantization index " + std::to_string(q) + " outside [0, " +
                                  std::to_string(q_num - 1) + "]");
  }
}

}  // namespace

void QuantConfig::validate() const {
  if (q_num < 2) fail(ErrorKind::Config, "q_num must be at least 2");
  if (!(lambda_min > 0.0 && lambda_min < lambda_max)) {
    fail(ErrorKind::Config, "lambda bounds must satisfy 0 < lambda_min < lambda_max");
  }
  check_bounds(qp_low, "qp_low");
  check_bounds(qp_high, "qp_high");
  for (const auto& b : q_scale) check_bounds(b, "q_scale");
  for (const auto& b : lambda_mv) check_bounds(b, "lambda_mv");
  check_q(q, q_num);
}

double interpolate_bounded(double q, Bounds bounds, int q_num) {
  if (q_num < 2) fail(ErrorKind::Config, "q_num must be at least 2");
  check_bounds(bounds, "interpolation");
  check_q(q, q_num);
  const double t = q / static_cast<double>(q_num - 1);
  if (t == 0.0) return bounds.lo;
  if (t == 1.0) return bounds.hi;
  return std::exp(std::log(bounds.lo) + t * (std::log(bounds.hi) - std::log(bounds.lo)));
}

double interpolate_lambda(double q, const QuantConfig& config) {
  if (!(config.lambda_min > 0.0 && config.lambda_min < config.lambda_max)) {
    fail(ErrorKind::Config, "lambda bounds must satisfy 0 < lambda_min < lambda_max");
  }
  return interpolate_bounded(q, {config.lambda_min, config.lambda_max}, config.q_num);
}

double layer_scale_qp(double qp, double q_scale) { return qp * q_scale; }

double level_scale(const QuantConfig& config, int level) {
  if (level == 0) return 1.0;
  if (level < 0 || level > kMaxTemporalLevels) {
    fail(ErrorKind::Argument, "temporal level " + std::to_string(level) + " out of range");
  }
  return interpolate_bounded(config.q, config.q_scale[level - 1], config.q_num);
}

SubbandSteps temporal_lowpass_steps(const QuantConfig& config, int level) {
  const double s = level_scale(config, level);
  return {layer_scale_qp(interpolate_bounded(config.q, config.qp_low, config.q_num), s),
          layer_scale_qp(interpolate_bounded(config.q, config.qp_high, config.q_num), s)};
}

SubbandSteps temporal_highpass_steps(const QuantConfig& config, int level) {
  const double step =
      layer_scale_qp(interpolate_bounded(config.q, config.qp_high, config.q_num), level_scale(config, level));
  return {step, step};
}

double motion_lambda(const QuantConfig& config, int level) {
  if (level < 1 || level > kMaxTemporalLevels) {
    fail(ErrorKind::Argument, "temporal level " + std::to_string(level) + " out of range");
  }
  return interpolate_bounded(config.q, config.lambda_mv[level - 1], config.q_num);
}

std::int32_t quantize_deadzone(double coefficient, double step) {
  const double mag = std::floor(std::fabs(coefficient) / step);
  const auto index = static_cast<std::int32_t>(
      std::min(mag, static_cast<double>(std::numeric_limits<std::int32_t>::max() / 2)));
  return coefficient < 0.0 ? -index : index;
}

double dequantize(std::int32_t index, double step) {
  if (index == 0) return 0.0;
  const double mag = (std::abs(static_cast<double>(index)) + 0.5) * step;
  return index < 0 ? -mag : mag;
}

}  // namespace lwvc
