#include "lwvc/mctf.hpp"

#include <bit>
#include <string>

#include "lwvc/error.hpp"

namespace lwvc {

std::int64_t round_half_away(std::int64_t num, std::int64_t den) {
  return num >= 0 ? (2 * num + den) / (2 * den) : -((-2 * num + den) / (2 * den));
}

namespace {

void check_same(const IntPlane& a, const IntPlane& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    fail(ErrorKind::Argument, "mctf: plane dimensions differ");
  }
}

// round(MC^-1(h) / 2) at every pixel, 0 where nothing lands.
IntPlane half_update(const IntPlane& highpass, const MotionField& field, int shift) {
  const InverseCompensation inv = inverse_motion_compensate(highpass, field, shift);
  IntPlane out(highpass.width(), highpass.height());
  auto acc = inv.accum.samples();
  auto w = inv.weight.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = w[i] > 0 ? static_cast<std::int32_t>(round_half_away(acc[i], 2 * static_cast<std::int64_t>(w[i])))
                      : 0;
  }
  return out;
}

}  // namespace

IntPlane mctf_predict(const IntPlane& even, const IntPlane& odd, const MotionField& field, int shift) {
  check_same(even, odd);
  IntPlane h = motion_compensate(even, field, shift);
  auto o = odd.samples();
  auto d = h.samples();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = o[i] - d[i];
  return h;
}

IntPlane mctf_update(const IntPlane& even, const IntPlane& highpass, const MotionField& field, int shift) {
  check_same(even, highpass);
  IntPlane l = half_update(highpass, field, shift);
  auto e = even.samples();
  auto d = l.samples();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += e[i];
  return l;
}

std::pair<IntPlane, IntPlane> mctf_inverse(const IntPlane& lowpass, const IntPlane& highpass,
                                           const MotionField& field, int shift) {
  check_same(lowpass, highpass);
  IntPlane even = half_update(highpass, field, shift);
  {
    auto l = lowpass.samples();
    auto d = even.samples();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = l[i] - d[i];
  }
  IntPlane odd = motion_compensate(even, field, shift);
  auto h = highpass.samples();
  auto d = odd.samples();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += h[i];
  return {std::move(even), std::move(odd)};
}

PlaneSet mctf_predict(const PlaneSet& even, const PlaneSet& odd, const MotionField& field) {
  return {mctf_predict(even[0], odd[0], field, 0), mctf_predict(even[1], odd[1], field, 1),
          mctf_predict(even[2], odd[2], field, 1)};
}

PlaneSet mctf_update(const PlaneSet& even, const PlaneSet& highpass, const MotionField& field) {
  return {mctf_update(even[0], highpass[0], field, 0), mctf_update(even[1], highpass[1], field, 1),
          mctf_update(even[2], highpass[2], field, 1)};
}

std::pair<PlaneSet, PlaneSet> mctf_inverse(const PlaneSet& lowpass, const PlaneSet& highpass,
                                           const MotionField& field) {
  std::pair<PlaneSet, PlaneSet> out;
  for (int c = 0; c < 3; ++c) {
    auto [even, odd] = mctf_inverse(lowpass[c], highpass[c], field, plane_shift(c));
    out.first[c] = std::move(even);
    out.second[c] = std::move(odd);
  }
  return out;
}

bool is_power_of_two(int v) { return v > 0 && std::has_single_bit(static_cast<unsigned>(v)); }

int log2_exact(int v) { return std::countr_zero(static_cast<unsigned>(v)); }

GopPlan make_gop_plan(int gop_size) {
  if (!is_power_of_two(gop_size) || gop_size > kMaxGopSize) {
    fail(ErrorKind::Plan, "GOP size " + std::to_string(gop_size) + " is not a power of two up to " +
                              std::to_string(kMaxGopSize));
  }
  GopPlan plan{gop_size, log2_exact(gop_size), {}};
  for (int j = 1; j <= plan.levels; ++j) {
    const int stride = 1 << j;
    std::vector<std::pair<int, int>> level;
    for (int even = 0; even < gop_size; even += stride) level.emplace_back(even, even + stride / 2);
    plan.pairs.push_back(std::move(level));
  }
  return plan;
}

TemporalSubbandPyramid decompose_gop(std::span<const PlaneSet> frames, const GopPlan& plan,
                                     std::span<const MotionSearch> per_level) {
  if (static_cast<int>(frames.size()) != plan.gop_size) {
    fail(ErrorKind::Plan, "GOP expects " + std::to_string(plan.gop_size) + " frames, got " +
                              std::to_string(frames.size()));
  }
  if (static_cast<int>(per_level.size()) < plan.levels) {
    fail(ErrorKind::Config, "motion search parameters missing for some temporal levels");
  }
  TemporalSubbandPyramid pyr;
  pyr.gop_size = plan.gop_size;
  pyr.levels = plan.levels;
  std::vector<PlaneSet> current(frames.begin(), frames.end());
  for (int j = 1; j <= plan.levels; ++j) {
    std::vector<PlaneSet> next, highs;
    std::vector<MotionField> fields;
    for (std::size_t i = 0; i + 1 < current.size(); i += 2) {
      const PlaneSet& even = current[i];
      const PlaneSet& odd = current[i + 1];
      MotionField field = estimate_motion(even[0], odd[0], per_level[j - 1]);
      PlaneSet h = mctf_predict(even, odd, field);
      next.push_back(mctf_update(even, h, field));
      highs.push_back(std::move(h));
      fields.push_back(std::move(field));
    }
    pyr.highpass.push_back(std::move(highs));
    pyr.motion.push_back(std::move(fields));
    pyr.trace.push_back(next);
    current = std::move(next);
  }
  pyr.lowpass = std::move(current.front());
  return pyr;
}

TemporalSubbandPyramid decompose_gop(std::span<const Frame> frames, const GopPlan& plan,
                                     std::span<const MotionSearch> per_level) {
  std::vector<PlaneSet> sets;
  sets.reserve(frames.size());
  for (const auto& f : frames) sets.push_back(f.planes());
  return decompose_gop(std::span<const PlaneSet>(sets), plan, per_level);
}

std::vector<PlaneSet> reconstruct_gop(const TemporalSubbandPyramid& pyramid, int dropped) {
  if (dropped < 0 || dropped > pyramid.levels) {
    fail(ErrorKind::Argument, "cannot drop " + std::to_string(dropped) + " temporal levels from a GOP with " +
                                  std::to_string(pyramid.levels));
  }
  std::vector<PlaneSet> current{pyramid.lowpass};
  for (int j = pyramid.levels; j > dropped; --j) {
    const auto& highs = pyramid.highpass.at(j - 1);
    const auto& fields = pyramid.motion.at(j - 1);
    if (highs.size() != current.size() || fields.size() != current.size()) {
      fail(ErrorKind::Consistency, "temporal level " + std::to_string(j) + " has " +
                                       std::to_string(highs.size()) + " highpasses, expected " +
                                       std::to_string(current.size()));
    }
    std::vector<PlaneSet> next;
    next.reserve(current.size() * 2);
    for (std::size_t i = 0; i < current.size(); ++i) {
      auto [even, odd] = mctf_inverse(current[i], highs[i], fields[i]);
      next.push_back(std::move(even));
      next.push_back(std::move(odd));
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace lwvc
