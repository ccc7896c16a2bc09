#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lwvc/media_io.hpp"
#include "lwvc/motion.hpp"

namespace lwvc {

/// round(num / den) with ties away from zero; den > 0.
std::int64_t round_half_away(std::int64_t num, std::int64_t den);

/// h = odd - MC(even). `shift` is the plane's chroma subsampling shift.
IntPlane mctf_predict(const IntPlane& even, const IntPlane& odd, const MotionField& field, int shift = 0);

/// l = even + round(MC^-1(h) / 2); unconnected pixels keep l = even.
IntPlane mctf_update(const IntPlane& even, const IntPlane& highpass, const MotionField& field,
                     int shift = 0);

/// Undoes update then predict; returns (even, odd).
std::pair<IntPlane, IntPlane> mctf_inverse(const IntPlane& lowpass, const IntPlane& highpass,
                                           const MotionField& field, int shift = 0);

PlaneSet mctf_predict(const PlaneSet& even, const PlaneSet& odd, const MotionField& field);
PlaneSet mctf_update(const PlaneSet& even, const PlaneSet& highpass, const MotionField& field);
std::pair<PlaneSet, PlaneSet> mctf_inverse(const PlaneSet& lowpass, const PlaneSet& highpass,
                                           const MotionField& field);

/// Which GOP positions meet at each temporal level. At level j (1-based)
/// the pair (even, odd) holds source-frame indices of the lowpass inputs.
struct GopPlan {
  int gop_size = 1;
  int levels = 0;
  std::vector<std::vector<std::pair<int, int>>> pairs;
};

bool is_power_of_two(int v);
int log2_exact(int v);

/// Plan for a dyadic GOP; sizes other than 1, 2, 4, 8, 16 are rejected.
GopPlan make_gop_plan(int gop_size);

inline constexpr int kMaxGopSize = 16;

struct TemporalSubbandPyramid {
  int gop_size = 1;
  int levels = 0;
  /// highpass[j-1][i] is h_i^(j); motion[j-1][i] is its field.
  std::vector<std::vector<PlaneSet>> highpass;
  std::vector<std::vector<MotionField>> motion;
  /// l_0^(J), the only lowpass needed for reconstruction.
  PlaneSet lowpass;
  /// Forward-pass lowpasses per level (trace[j-1][i] == l_i^(j)). Filled by
  /// decompose_gop for inspection; reconstruct_gop ignores it.
  std::vector<std::vector<PlaneSet>> trace;
};

/// Recursive temporal decomposition. `per_level[j-1]` configures motion
/// search at level j; the vector must cover every level of the GOP.
TemporalSubbandPyramid decompose_gop(std::span<const PlaneSet> frames, const GopPlan& plan,
                                     std::span<const MotionSearch> per_level);
TemporalSubbandPyramid decompose_gop(std::span<const Frame> frames, const GopPlan& plan,
                                     std::span<const MotionSearch> per_level);

/// Inverts levels J..dropped+1 and returns the gop_size / 2^dropped lowpass
/// pictures of level `dropped` (the input frames when dropped == 0).
std::vector<PlaneSet> reconstruct_gop(const TemporalSubbandPyramid& pyramid, int dropped = 0);

}  // namespace lwvc
