#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lwvc/bitstream.hpp"
#include "lwvc/dwt2d.hpp"
#include "lwvc/mctf.hpp"
#include "lwvc/media_io.hpp"
#include "lwvc/quant.hpp"

namespace lwvc {

enum class GopSelection { Heuristic, Exhaustive };

struct GopPolicy {
  /// Fixed GOP size, or 0 for content-adaptive selection.
  int fixed_size = 16;
  std::vector<int> candidates{4, 8, 16};
  GopSelection selection = GopSelection::Heuristic;
  /// Mean absolute highpass per pixel (8-bit scale).
  double threshold = 3.0;
  double fallback_threshold = 6.0;

  bool adaptive() const { return fixed_size == 0; }
  int max_size() const;
};

struct CodecConfig {
  QuantConfig quant;
  GopPolicy gop;
  bool lossless = false;
  Kernel kernel = Kernel::Cdf97;
  /// Luma decomposition depth; 0 picks default_levels for the frame size.
  int spatial_levels = 0;
  int block_size = 8;
  /// Integer-pel search range per temporal level (index j-1).
  std::array<int, kMaxTemporalLevels> search_range{16, 16, 24, 32};

  /// Throws ErrorKind::Config (or Argument for an out-of-range q).
  void validate() const;
  MotionSearch motion_search(int level) const;
};

/// key = value lines; '#' starts a comment. Unknown keys are config errors.
CodecConfig parse_config(std::string_view text, CodecConfig base = {});
CodecConfig load_config(const std::string& path, CodecConfig base = {});

struct RDCost {
  double subband_bits = 0.0;
  double motion_bits = 0.0;
  std::vector<double> frame_mse;
  double lambda = 0.0;

  double rate_bits() const { return subband_bits + motion_bits; }
  double mse_sum() const;
};

/// J = rate_bits + lambda * mse_sum.
double rd_cost(double rate_bits, double mse_sum, double lambda);

struct GopRecord {
  int first_frame = 0;
  int gop_size = 1;
  TemporalSubbandPyramid source;
  /// What the decoder sees: dequantized subbands and the coded fields.
  TemporalSubbandPyramid decoded;
};

struct EncodeResult {
  std::vector<std::uint8_t> bytes;
  /// Encoder-side simulation of decode_sequence(bytes).
  VideoSequence reconstruction;
  std::vector<int> gop_sizes;
  RDCost cost;
  /// Only filled when requested.
  std::vector<GopRecord> gops;
};

EncodeResult encode_sequence_detailed(const VideoSequence& video, const CodecConfig& config,
                                      bool keep_pyramids = false);
std::vector<std::uint8_t> encode_sequence(const VideoSequence& video, const CodecConfig& config);

/// Removes `drop` temporal layers before decoding.
VideoSequence decode_sequence(std::span<const std::uint8_t> bytes, int drop = 0);

/// Heuristic score of coding `frames` as one GOP: the largest mean absolute
/// luma highpass per pixel over its temporal levels, 8-bit scale.
double gop_residual_score(std::span<const Frame> frames, const CodecConfig& config);

/// GOP size for the frames starting at the front of `frames`. Candidates
/// larger than frames.size() are ignored.
int select_gop_size(std::span<const Frame> frames, std::span<const int> candidates, const CodecConfig& config);

/// Lagrangian cost of coding `frames` with a fixed GOP size (tails split
/// into smaller powers of two). Used by exhaustive selection.
double trial_cost(std::span<const Frame> frames, int gop_size, const CodecConfig& config);

/// GOP sizes covering the whole sequence.
std::vector<int> plan_gops(std::span<const Frame> frames, const CodecConfig& config);

/// Luma spatial levels used for a given frame size and config.
int luma_spatial_levels(int width, int height, const CodecConfig& config);

/// How one temporal subband picture (all three planes) is coded. Chroma
/// planes use min(luma_levels, what their size supports).
struct PictureCoding {
  Kernel kernel = Kernel::LeGall53;
  int luma_levels = 0;
  bool lossless = false;
};

struct CodedPicture {
  /// f32 LL step, f32 step for the other bands, range-coded indices.
  std::vector<std::uint8_t> payload;
  /// The picture as the decoder will reconstruct it.
  PlaneSet decoded;
};

/// Spatial DWT, deadzone quantization and entropy coding. The coarsest LL
/// band uses steps.lowpass_ll, every other band steps.other.
CodedPicture code_picture(const PlaneSet& picture, SubbandSteps steps, const PictureCoding& coding);
PlaneSet decode_picture(std::span<const std::uint8_t> payload, int width, int height, const PictureCoding& coding);

}  // namespace lwvc
