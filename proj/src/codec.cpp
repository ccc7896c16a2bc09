#include "lwvc/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "lwvc/entropy.hpp"
#include "lwvc/error.hpp"
#include "lwvc/metrics.hpp"
#include "lwvc/range_coder.hpp"

namespace lwvc {

int GopPolicy::max_size() const {
  if (!adaptive()) return fixed_size;
  return candidates.empty() ? 1 : *std::max_element(candidates.begin(), candidates.end());
}

void CodecConfig::validate() const {
  quant.validate();
  auto dyadic = [](int g) { return g >= 1 && g <= kMaxGopSize && is_power_of_two(g); };
  if (gop.fixed_size != 0 && !dyadic(gop.fixed_size)) {
    fail(ErrorKind::Config, "GOP size " + std::to_string(gop.fixed_size) + " is not one of 1, 2, 4, 8, 16");
  }
  if (gop.adaptive()) {
    if (gop.candidates.empty()) fail(ErrorKind::Config, "adaptive GOP needs at least one candidate");
    for (int g : gop.candidates) {
      if (!dyadic(g)) fail(ErrorKind::Config, "GOP candidate " + std::to_string(g) + " is not a power of two <= 16");
    }
  }
  if (!(gop.threshold >= 0.0) || !(gop.fallback_threshold >= gop.threshold)) {
    fail(ErrorKind::Config, "GOP thresholds must satisfy 0 <= threshold <= fallback_threshold");
  }
  if (lossless && kernel != Kernel::LeGall53) {
    fail(ErrorKind::Config, "lossless coding requires the integer 5/3 kernel");
  }
  if (spatial_levels < 0 || spatial_levels > 255) fail(ErrorKind::Config, "spatial_levels out of range");
  if (block_size < 4 || block_size > 64) fail(ErrorKind::Config, "block_size must lie in [4, 64]");
  for (int r : search_range) {
    if (r < 0 || r > 128) fail(ErrorKind::Config, "search_range must lie in [0, 128]");
  }
}

MotionSearch CodecConfig::motion_search(int level) const {
  return {block_size, search_range.at(static_cast<std::size_t>(level - 1)), motion_lambda(quant, level)};
}

int luma_spatial_levels(int width, int height, const CodecConfig& config) {
  if (config.spatial_levels == 0) return default_levels(width, height);
  if (config.spatial_levels > max_levels(width, height)) {
    fail(ErrorKind::LevelOverflow, std::to_string(config.spatial_levels) + " spatial levels exceed what a " +
                                       std::to_string(width) + "x" + std::to_string(height) + " frame supports");
  }
  return config.spatial_levels;
}

double RDCost::mse_sum() const { return std::accumulate(frame_mse.begin(), frame_mse.end(), 0.0); }

double rd_cost(double rate_bits, double mse_sum, double lambda) { return rate_bits + lambda * mse_sum; }

namespace {

int plane_levels(int width, int height, int luma_levels) {
  return std::min(luma_levels, max_levels(width, height));
}

bool in_rect(const BandRect& r, int x, int y) {
  return x >= r.x && x < r.x + r.width && y >= r.y && y < r.y + r.height;
}

BandRect coarsest_ll(int width, int height, int levels) {
  return levels > 0 ? band_rect(width, height, levels, Orientation::LL) : BandRect{0, 0, width, height};
}

IntPlane reconstruct_plane(const IntPlane& indices, int levels, SubbandSteps steps, const PictureCoding& pc) {
  if (pc.lossless && levels == 0) return indices;
  const BandRect ll = coarsest_ll(indices.width(), indices.height(), levels);
  RealPlane coeffs(indices.width(), indices.height());
  for (int y = 0; y < indices.height(); ++y) {
    for (int x = 0; x < indices.width(); ++x) {
      const std::int32_t i = indices(x, y);
      coeffs(x, y) = pc.lossless ? static_cast<double>(i)
                                 : dequantize(i, in_rect(ll, x, y) ? steps.lowpass_ll : steps.other);
    }
  }
  if (levels == 0) {
    IntPlane out(coeffs.width(), coeffs.height());
    auto src = coeffs.samples();
    auto dst = out.samples();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = static_cast<std::int32_t>(std::lround(src[k]));
    return out;
  }
  return inverse_dwt_rounded(SubbandImage(pc.kernel, levels, std::move(coeffs)));
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

float get_f32(std::span<const std::uint8_t> in) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(in[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

constexpr std::size_t kStepHeader = 8;

void resize_levels(TemporalSubbandPyramid& p) {
  p.highpass.assign(static_cast<std::size_t>(p.levels), {});
  p.motion.assign(static_cast<std::size_t>(p.levels), {});
  for (int j = 1; j <= p.levels; ++j) {
    p.highpass[j - 1].resize(static_cast<std::size_t>(p.gop_size >> j));
    p.motion[j - 1].resize(static_cast<std::size_t>(p.gop_size >> j));
  }
}

int tail_size(int remaining, int cap) {
  int g = 1;
  while (g * 2 <= remaining && g * 2 <= cap) g *= 2;
  return g;
}

std::vector<int> fixed_plan(int frames, int gop_size) {
  std::vector<int> sizes;
  int pos = 0;
  while (pos < frames) {
    const int g = frames - pos >= gop_size ? gop_size : tail_size(frames - pos, gop_size);
    sizes.push_back(g);
    pos += g;
  }
  return sizes;
}

double effective_lambda(const CodecConfig& config, int width, int height) {
  return interpolate_lambda(config.quant.q, config.quant) * static_cast<double>(width) * height;
}

EncodeResult encode_with_plan(const VideoSequence& video, const CodecConfig& config, std::span<const int> plan,
                              bool keep_pyramids) {
  const int width = video.width();
  const int height = video.height();
  const int bit_depth = video.bit_depth();
  const PictureCoding pc{config.kernel, luma_spatial_levels(width, height, config), config.lossless};

  StreamHeader header;
  header.width = static_cast<std::uint32_t>(width);
  header.height = static_cast<std::uint32_t>(height);
  header.bit_depth = static_cast<std::uint8_t>(bit_depth);
  header.frame_count = static_cast<std::uint32_t>(video.size());
  const FrameRate rate = video.frame_rate();
  if (rate.num > 0xFFFF || rate.den > 0xFFFF) fail(ErrorKind::Argument, "frame rate does not fit the stream header");
  header.rate_num = static_cast<std::uint16_t>(rate.num);
  header.rate_den = static_cast<std::uint16_t>(rate.den);
  header.kernel = config.kernel;
  header.spatial_levels = static_cast<std::uint8_t>(pc.luma_levels);
  header.q_fixed = config.lossless ? 0 : static_cast<std::uint16_t>(std::lround(config.quant.q * 256.0));
  header.gop_mode = static_cast<std::uint8_t>(config.gop.fixed_size);
  header.flags = config.lossless ? StreamHeader::kLosslessFlag : 0;

  EncodeResult result;
  result.cost.lambda = effective_lambda(config, width, height);
  std::vector<CodedUnit> units;
  std::vector<Frame> recon;
  recon.reserve(video.size());
  std::vector<MotionSearch> searches;
  for (int j = 1; j <= kMaxTemporalLevels; ++j) searches.push_back(config.motion_search(j));

  int first = 0;
  for (int gop_size : plan) {
    const GopPlan gp = make_gop_plan(gop_size);
    auto frames = std::span<const Frame>(video.frames()).subspan(static_cast<std::size_t>(first),
                                                                 static_cast<std::size_t>(gop_size));
    TemporalSubbandPyramid source = decompose_gop(frames, gp, searches);
    TemporalSubbandPyramid decoded;
    decoded.gop_size = gop_size;
    decoded.levels = gp.levels;
    resize_levels(decoded);

    const int J = gp.levels;
    units.push_back({UnitType::GopHeader, static_cast<std::uint8_t>(J), 0,
                     encode_gop_header({static_cast<std::uint16_t>(gop_size), static_cast<std::uint8_t>(J),
                                        static_cast<std::uint32_t>(first),
                                        static_cast<std::uint8_t>(config.block_size)})});
    CodedPicture lowpass = code_picture(source.lowpass, temporal_lowpass_steps(config.quant, J), pc);
    result.cost.subband_bits += 8.0 * static_cast<double>(lowpass.payload.size());
    decoded.lowpass = std::move(lowpass.decoded);
    units.push_back({UnitType::Lowpass, static_cast<std::uint8_t>(J), 0, std::move(lowpass.payload)});
    for (int j = J; j >= 1; --j) {
      const SubbandSteps steps = temporal_highpass_steps(config.quant, j);
      for (std::size_t i = 0; i < source.highpass[j - 1].size(); ++i) {
        const auto idx = static_cast<std::uint16_t>(i);
        auto mv = code_motion_field(source.motion[j - 1][i]);
        result.cost.motion_bits += 8.0 * static_cast<double>(mv.size());
        units.push_back({UnitType::Motion, static_cast<std::uint8_t>(j), idx, std::move(mv)});
        decoded.motion[j - 1][i] = source.motion[j - 1][i];
        CodedPicture hp = code_picture(source.highpass[j - 1][i], steps, pc);
        result.cost.subband_bits += 8.0 * static_cast<double>(hp.payload.size());
        decoded.highpass[j - 1][i] = std::move(hp.decoded);
        units.push_back({UnitType::Highpass, static_cast<std::uint8_t>(j), idx, std::move(hp.payload)});
      }
    }
    for (const PlaneSet& p : reconstruct_gop(decoded, 0)) {
      Frame f = frame_from_clipped(p, bit_depth);
      result.cost.frame_mse.push_back(mse(video.frame(recon.size()), f));
      recon.push_back(std::move(f));
    }
    result.gop_sizes.push_back(gop_size);
    if (keep_pyramids) result.gops.push_back({first, gop_size, std::move(source), std::move(decoded)});
    first += gop_size;
  }
  result.bytes = write_stream(header, units);
  result.reconstruction = VideoSequence(std::move(recon), rate);
  return result;
}

void check_video(const VideoSequence& video) {
  if (video.empty()) fail(ErrorKind::Argument, "cannot encode an empty sequence");
}

}  // namespace

CodedPicture code_picture(const PlaneSet& picture, SubbandSteps steps, const PictureCoding& pc) {
  CodedPicture out;
  if (pc.lossless) steps = {1.0, 1.0};
  const float ll_step = static_cast<float>(steps.lowpass_ll);
  const float other_step = static_cast<float>(steps.other);
  steps = {ll_step, other_step};

  RangeEncoder enc;
  PictureContexts ctx;
  for (int c = 0; c < 3; ++c) {
    const IntPlane& plane = picture[c];
    const int levels = plane_levels(plane.width(), plane.height(), pc.luma_levels);
    RealPlane coeffs = levels > 0 ? forward_dwt(plane, levels, pc.kernel).coefficients() : plane_cast<double>(plane);
    const BandRect ll = coarsest_ll(plane.width(), plane.height(), levels);
    IntPlane indices(plane.width(), plane.height());
    for (int y = 0; y < plane.height(); ++y) {
      for (int x = 0; x < plane.width(); ++x) {
        const double v = coeffs(x, y);
        indices(x, y) = pc.lossless ? static_cast<std::int32_t>(std::lround(v))
                                    : quantize_deadzone(v, in_rect(ll, x, y) ? steps.lowpass_ll : steps.other);
      }
    }
    encode_plane_indices(enc, ctx, c, indices, levels);
    out.decoded[c] = reconstruct_plane(indices, levels, steps, pc);
  }
  put_f32(out.payload, ll_step);
  put_f32(out.payload, other_step);
  const auto body = enc.finish();
  out.payload.insert(out.payload.end(), body.begin(), body.end());
  return out;
}

PlaneSet decode_picture(std::span<const std::uint8_t> payload, int width, int height, const PictureCoding& pc) {
  if (payload.size() < kStepHeader) fail(ErrorKind::Truncation, "picture payload shorter than its step header");
  const SubbandSteps steps{get_f32(payload), get_f32(payload.subspan(4))};
  if (!pc.lossless && (!(steps.lowpass_ll > 0.0) || !(steps.other > 0.0) || !std::isfinite(steps.lowpass_ll) ||
                       !std::isfinite(steps.other))) {
    fail(ErrorKind::Corruption, "invalid quantizer step");
  }
  RangeDecoder dec(payload.subspan(kStepHeader));
  PictureContexts ctx;
  PlaneSet out;
  for (int c = 0; c < 3; ++c) {
    const int w = c == 0 ? width : chroma_extent(width);
    const int h = c == 0 ? height : chroma_extent(height);
    const int levels = plane_levels(w, h, pc.luma_levels);
    const IntPlane indices = decode_plane_indices(dec, ctx, c, w, h, levels);
    out[c] = reconstruct_plane(indices, levels, steps, pc);
  }
  dec.finish();
  return out;
}

double gop_residual_score(std::span<const Frame> frames, const CodecConfig& config) {
  const GopPlan gp = make_gop_plan(static_cast<int>(frames.size()));
  if (gp.levels == 0) return 0.0;
  std::vector<MotionSearch> searches;
  for (int j = 1; j <= gp.levels; ++j) searches.push_back(config.motion_search(j));
  const TemporalSubbandPyramid pyr = decompose_gop(frames, gp, searches);
  const double norm = static_cast<double>(1 << (frames.front().bit_depth() - 8));
  double worst = 0.0;
  for (const auto& level : pyr.highpass) {
    double sum = 0.0;
    double count = 0.0;
    for (const PlaneSet& h : level) {
      for (std::int32_t v : h[0].samples()) sum += std::abs(v);
      count += static_cast<double>(h[0].size());
    }
    worst = std::max(worst, sum / count / norm);
  }
  return worst;
}

double trial_cost(std::span<const Frame> frames, int gop_size, const CodecConfig& config) {
  VideoSequence clip(std::vector<Frame>(frames.begin(), frames.end()), FrameRate{});
  const auto plan = fixed_plan(static_cast<int>(frames.size()), gop_size);
  const EncodeResult r = encode_with_plan(clip, config, plan, false);
  return rd_cost(r.cost.rate_bits(), r.cost.mse_sum(), r.cost.lambda);
}

int select_gop_size(std::span<const Frame> frames, std::span<const int> candidates, const CodecConfig& config) {
  if (frames.empty()) fail(ErrorKind::Argument, "GOP selection needs at least one frame");
  std::vector<int> usable;
  for (int g : candidates) {
    if (g <= static_cast<int>(frames.size())) usable.push_back(g);
  }
  std::sort(usable.begin(), usable.end());
  usable.erase(std::unique(usable.begin(), usable.end()), usable.end());
  if (usable.empty()) return tail_size(static_cast<int>(frames.size()), kMaxGopSize);

  if (config.gop.selection == GopSelection::Exhaustive) {
    const auto window = frames.first(static_cast<std::size_t>(usable.back()));
    int best = usable.back();
    double best_cost = std::numeric_limits<double>::infinity();
    for (auto it = usable.rbegin(); it != usable.rend(); ++it) {
      const double cost = trial_cost(window, *it, config);
      if (cost < best_cost) {
        best_cost = cost;
        best = *it;
      }
    }
    return best;
  }

  std::vector<double> scores;
  for (int g : usable) scores.push_back(gop_residual_score(frames.first(static_cast<std::size_t>(g)), config));
  for (double limit : {config.gop.threshold, config.gop.fallback_threshold}) {
    for (std::size_t k = usable.size(); k-- > 0;) {
      if (scores[k] <= limit) return usable[k];
    }
  }
  return frames.size() >= 2 ? 2 : 1;
}

std::vector<int> plan_gops(std::span<const Frame> frames, const CodecConfig& config) {
  const int n = static_cast<int>(frames.size());
  if (!config.gop.adaptive()) return fixed_plan(n, config.gop.fixed_size);
  std::vector<int> sizes;
  int pos = 0;
  while (pos < n) {
    const int g = select_gop_size(frames.subspan(static_cast<std::size_t>(pos)), config.gop.candidates, config);
    sizes.push_back(g);
    pos += g;
  }
  return sizes;
}

EncodeResult encode_sequence_detailed(const VideoSequence& video, const CodecConfig& config, bool keep_pyramids) {
  config.validate();
  check_video(video);
  luma_spatial_levels(video.width(), video.height(), config);
  const auto plan = plan_gops(video.frames(), config);
  return encode_with_plan(video, config, plan, keep_pyramids);
}

std::vector<std::uint8_t> encode_sequence(const VideoSequence& video, const CodecConfig& config) {
  return encode_sequence_detailed(video, config).bytes;
}

VideoSequence decode_sequence(std::span<const std::uint8_t> bytes, int drop) {
  ParsedStream stream = parse_stream(bytes);
  if (drop > 0) stream = drop_layers(stream, drop);
  const auto gops = split_gops(stream);
  const StreamHeader& h = stream.header;
  const int width = static_cast<int>(h.width);
  const int height = static_cast<int>(h.height);
  if (h.lossless() && h.kernel != Kernel::LeGall53) fail(ErrorKind::Format, "lossless stream with a real kernel");
  const int max_luma = max_levels(width, height);
  if (h.spatial_levels > max_luma) fail(ErrorKind::Format, "spatial levels exceed the frame size");
  const PictureCoding pc{h.kernel, h.spatial_levels, h.lossless()};

  std::vector<Frame> frames;
  std::uint32_t expected_first = 0;
  for (const GopView& g : gops) {
    if (!is_power_of_two(g.header.gop_size) || g.header.gop_size > kMaxGopSize ||
        g.header.levels != log2_exact(g.header.gop_size)) {
      fail(ErrorKind::Corruption, "GOP at frame " + std::to_string(g.header.first_frame) + ": invalid size");
    }
    if (g.header.first_frame != expected_first) {
      fail(ErrorKind::Corruption, "GOP at frame " + std::to_string(g.header.first_frame) + ": expected frame " +
                                      std::to_string(expected_first));
    }
    expected_first += g.header.gop_size;
    TemporalSubbandPyramid pyr;
    pyr.gop_size = g.header.gop_size;
    pyr.levels = g.header.levels;
    resize_levels(pyr);
    for (std::size_t i = g.unit_begin + 1; i < g.unit_end; ++i) {
      const CodedUnit& u = stream.units[i];
      try {
        switch (u.type) {
          case UnitType::Lowpass:
            pyr.lowpass = decode_picture(u.payload, width, height, pc);
            break;
          case UnitType::Highpass:
            pyr.highpass[u.temporal_level - 1][u.index] = decode_picture(u.payload, width, height, pc);
            break;
          case UnitType::Motion:
            pyr.motion[u.temporal_level - 1][u.index] =
                decode_motion_field(std::span<const std::uint8_t>(u.payload), g.header.block_size, width, height);
            break;
          case UnitType::GopHeader:
            break;
        }
      } catch (const Error& e) {
        throw Error(e.kind(), "unit " + std::to_string(i) + " (" + to_string(u.type) + ", level " +
                                  std::to_string(u.temporal_level) + ", index " + std::to_string(u.index) +
                                  "): " + e.what());
      }
    }
    for (const PlaneSet& p : reconstruct_gop(pyr, g.dropped)) frames.push_back(frame_from_clipped(p, h.bit_depth));
  }
  if (frames.size() != h.frame_count) {
    fail(ErrorKind::Corruption, "stream declares " + std::to_string(h.frame_count) + " frames but carries " +
                                    std::to_string(frames.size()));
  }
  return VideoSequence(std::move(frames), FrameRate{h.rate_num, h.rate_den});
}

}  // namespace lwvc
