#include "lwvc/motion.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <limits>
#include <string>
#include <tuple>

#include "lwvc/error.hpp"

namespace lwvc {

MotionField::MotionField(int block_size, int width, int height)
    : block_size_(block_size), width_(width), height_(height),
      cols_((width + block_size - 1) / block_size), rows_((height + block_size - 1) / block_size),
      vectors_(static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_)) {
  if (block_size < 1) fail(ErrorKind::Config, "motion: block size must be positive");
}

namespace {

int median3(int a, int b, int c) { return std::max(std::min(a, b), std::min(std::max(a, b), c)); }

}  // namespace

MotionVector median_predictor(const MotionField& field, int bx, int by) {
  if (by == 0) return bx == 0 ? MotionVector{} : field.at(bx - 1, 0);
  const MotionVector top = field.at(bx, by - 1);
  const MotionVector left = bx > 0 ? field.at(bx - 1, by) : top;
  const MotionVector corner = bx + 1 < field.cols() ? field.at(bx + 1, by - 1)
                              : bx > 0               ? field.at(bx - 1, by - 1)
                                                     : top;
  return {median3(left.dx, top.dx, corner.dx), median3(left.dy, top.dy, corner.dy)};
}

int signed_golomb_bits(int value) {
  const auto mapped = static_cast<std::uint32_t>(value > 0 ? 2 * value - 1 : -2 * value);
  return 2 * (std::bit_width(mapped + 1) - 1) + 1;
}

std::int32_t sample_bilinear(const IntPlane& plane, int x4, int y4) {
  const int ix = x4 >> 2, iy = y4 >> 2;
  const int fx = x4 & 3, fy = y4 & 3;
  const std::int32_t a = plane.clamped(ix, iy);
  if (fx == 0 && fy == 0) return a;
  const std::int32_t b = plane.clamped(ix + 1, iy);
  const std::int32_t c = plane.clamped(ix, iy + 1);
  const std::int32_t d = plane.clamped(ix + 1, iy + 1);
  return ((4 - fx) * (4 - fy) * a + fx * (4 - fy) * b + (4 - fx) * fy * c + fx * fy * d + 8) >> 4;
}

namespace {

struct Candidate {
  MotionVector v;
  double cost = std::numeric_limits<double>::infinity();
};

auto tie_key(const MotionVector& v) {
  return std::make_tuple(std::abs(v.dx) + std::abs(v.dy), std::abs(v.dy), std::abs(v.dx), v.dy, v.dx);
}

bool better(const Candidate& a, const Candidate& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  return tie_key(a.v) < tie_key(b.v);
}

// Reference interpolated onto the half-pel grid; reads outside clamp.
class HalfPelReference {
 public:
  explicit HalfPelReference(const IntPlane& ref)
      : up_(2 * ref.width() - 1, 2 * ref.height() - 1) {
    for (int y = 0; y < up_.height(); ++y) {
      for (int x = 0; x < up_.width(); ++x) up_(x, y) = sample_bilinear(ref, 2 * x, 2 * y);
    }
  }
  std::int32_t operator()(int hx, int hy) const { return up_.clamped(hx, hy); }

 private:
  IntPlane up_;
};

struct BlockRegion {
  int x0, y0, x1, y1;
};

class BlockSearcher {
 public:
  BlockSearcher(const IntPlane& reference, const IntPlane& current, const MotionSearch& search,
                const MotionField& field)
      : ref_(reference), cur_(current), search_(search), field_(field) {}

  void begin_block(int bx, int by) {
    const int bs = field_.block_size();
    region_ = {bx * bs, by * bs, std::min((bx + 1) * bs, cur_.width()), std::min((by + 1) * bs, cur_.height())};
    pred_ = median_predictor(field_, bx, by);
    best_ = Candidate{};
  }

  bool in_range(const MotionVector& v) const {
    const int limit = 2 * search_.search_range;
    return std::abs(v.dx) <= limit && std::abs(v.dy) <= limit;
  }

  void consider(const MotionVector& v) {
    if (!in_range(v)) return;
    Candidate c{v, search_.lambda_mv * (signed_golomb_bits(v.dx - pred_.dx) +
                                        signed_golomb_bits(v.dy - pred_.dy))};
    if (c.cost > best_.cost) return;
    std::int64_t sad = 0;
    for (int y = region_.y0; y < region_.y1; ++y) {
      const auto row = cur_.row(y);
      for (int x = region_.x0; x < region_.x1; ++x) {
        sad += std::abs(row[x] - ref_(2 * x + v.dx, 2 * y + v.dy));
      }
      if (static_cast<double>(sad) + c.cost > best_.cost) return;
    }
    c.cost += static_cast<double>(sad);
    if (better(c, best_)) best_ = c;
  }

  const Candidate& best() const { return best_; }
  const MotionVector& predictor() const { return pred_; }

 private:
  HalfPelReference ref_;
  const IntPlane& cur_;
  const MotionSearch& search_;
  const MotionField& field_;
  BlockRegion region_{};
  MotionVector pred_{};
  Candidate best_{};
};

IntPlane downsample2(const IntPlane& p) {
  IntPlane out((p.width() + 1) / 2, (p.height() + 1) / 2);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out(x, y) = (p.clamped(2 * x, 2 * y) + p.clamped(2 * x + 1, 2 * y) + p.clamped(2 * x, 2 * y + 1) +
                   p.clamped(2 * x + 1, 2 * y + 1) + 2) >> 2;
    }
  }
  return out;
}

// Integer full search on the half-resolution pair; returns the best coarse
// displacement in coarse pixels.
MotionVector coarse_search(const IntPlane& cref, const IntPlane& ccur, int bx, int by, int cbs,
                           int range, double lambda, const MotionVector& pred) {
  const int x0 = bx * cbs, y0 = by * cbs;
  const int x1 = std::min(x0 + cbs, ccur.width()), y1 = std::min(y0 + cbs, ccur.height());
  Candidate best;
  if (x0 >= x1 || y0 >= y1) return {};
  for (int uy = -range; uy <= range; ++uy) {
    for (int ux = -range; ux <= range; ++ux) {
      const MotionVector full{4 * ux, 4 * uy};
      Candidate c{{ux, uy}, lambda / 4.0 * (signed_golomb_bits(full.dx - pred.dx) +
                                            signed_golomb_bits(full.dy - pred.dy))};
      std::int64_t sad = 0;
      for (int y = y0; y < y1 && static_cast<double>(sad) + c.cost <= best.cost; ++y) {
        for (int x = x0; x < x1; ++x) sad += std::abs(ccur(x, y) - cref.clamped(x + ux, y + uy));
      }
      c.cost += static_cast<double>(sad);
      if (better(c, best)) best = c;
    }
  }
  return best.v;
}

constexpr int kExhaustiveRange = 4;

}  // namespace

MotionField estimate_motion(const IntPlane& reference, const IntPlane& current, const MotionSearch& search) {
  if (reference.width() != current.width() || reference.height() != current.height()) {
    fail(ErrorKind::Argument, "motion: reference and current geometry differ");
  }
  if (search.block_size < 1 || search.block_size > current.width() || search.block_size > current.height()) {
    fail(ErrorKind::Config, "motion: block size " + std::to_string(search.block_size) +
                                " does not fit a " + std::to_string(current.width()) + "x" +
                                std::to_string(current.height()) + " frame");
  }
  if (search.search_range < 1) fail(ErrorKind::Config, "motion: search range must be at least 1");
  if (search.lambda_mv < 0.0) fail(ErrorKind::Config, "motion: lambda_mv must be nonnegative");

  MotionField field(search.block_size, current.width(), current.height());
  BlockSearcher searcher(reference, current, search, field);
  const int range = search.search_range;

  if (range <= kExhaustiveRange) {
    for (int by = 0; by < field.rows(); ++by) {
      for (int bx = 0; bx < field.cols(); ++bx) {
        searcher.begin_block(bx, by);
        for (int dy = -2 * range; dy <= 2 * range; ++dy) {
          for (int dx = -2 * range; dx <= 2 * range; ++dx) searcher.consider({dx, dy});
        }
        field.at(bx, by) = searcher.best().v;
      }
    }
    return field;
  }

  const IntPlane cref = downsample2(reference);
  const IntPlane ccur = downsample2(current);
  const int cbs = std::max(1, search.block_size / 2);
  const int crange = (range + 1) / 2;
  for (int by = 0; by < field.rows(); ++by) {
    for (int bx = 0; bx < field.cols(); ++bx) {
      searcher.begin_block(bx, by);
      const MotionVector pred = searcher.predictor();
      const MotionVector coarse = coarse_search(cref, ccur, bx, by, cbs, crange, search.lambda_mv, pred);
      for (int j = -1; j <= 1; ++j) {
        for (int i = -1; i <= 1; ++i) searcher.consider({4 * coarse.dx + 2 * i, 4 * coarse.dy + 2 * j});
      }
      searcher.consider({0, 0});
      searcher.consider({pred.dx & ~1, pred.dy & ~1});
      const MotionVector integer = searcher.best().v;
      for (int j = -1; j <= 1; ++j) {
        for (int i = -1; i <= 1; ++i) {
          if (i != 0 || j != 0) searcher.consider({integer.dx + i, integer.dy + j});
        }
      }
      field.at(bx, by) = searcher.best().v;
    }
  }
  return field;
}

MotionField estimate_motion(const Frame& reference, const Frame& current, const MotionSearch& search) {
  return estimate_motion(reference.luma(), current.luma(), search);
}

namespace {

void check_field(const IntPlane& plane, const MotionField& field, int shift) {
  if (((field.width() + shift) >> shift) != plane.width() ||
      ((field.height() + shift) >> shift) != plane.height()) {
    fail(ErrorKind::Consistency, "motion field geometry does not match plane");
  }
}

template <typename Visit>
void for_each_displaced(const IntPlane& plane, const MotionField& field, int shift, Visit visit) {
  const int bs = field.block_size();
  for (int y = 0; y < plane.height(); ++y) {
    const int by = (y << shift) / bs;
    for (int x = 0; x < plane.width(); ++x) {
      const MotionVector v = field.at((x << shift) / bs, by);
      // half-pel luma units -> quarter-sample units of this plane
      visit(x, y, 4 * x + ((2 * v.dx) >> shift), 4 * y + ((2 * v.dy) >> shift));
    }
  }
}

}  // namespace

IntPlane motion_compensate(const IntPlane& reference, const MotionField& field, int shift) {
  check_field(reference, field, shift);
  IntPlane out(reference.width(), reference.height());
  for_each_displaced(reference, field, shift, [&](int x, int y, int x4, int y4) {
    out(x, y) = sample_bilinear(reference, x4, y4);
  });
  return out;
}

InverseCompensation inverse_motion_compensate(const IntPlane& highpass, const MotionField& field, int shift) {
  check_field(highpass, field, shift);
  InverseCompensation inv{Plane<std::int64_t>(highpass.width(), highpass.height()),
                          Plane<std::int32_t>(highpass.width(), highpass.height())};
  auto splat = [&](int x, int y, int w, std::int64_t value) {
    if (w == 0) return;
    x = std::clamp(x, 0, highpass.width() - 1);
    y = std::clamp(y, 0, highpass.height() - 1);
    inv.accum(x, y) += w * value;
    inv.weight(x, y) += w;
  };
  for_each_displaced(highpass, field, shift, [&](int x, int y, int x4, int y4) {
    const std::int64_t h = highpass(x, y);
    const int ix = x4 >> 2, iy = y4 >> 2;
    const int fx = x4 & 3, fy = y4 & 3;
    splat(ix, iy, (4 - fx) * (4 - fy), h);
    splat(ix + 1, iy, fx * (4 - fy), h);
    splat(ix, iy + 1, (4 - fx) * fy, h);
    splat(ix + 1, iy + 1, fx * fy, h);
  });
  return inv;
}

double InverseCompensation::update(int x, int y) const {
  const std::int32_t w = weight(x, y);
  return w > 0 ? static_cast<double>(accum(x, y)) / w : 0.0;
}

RealPlane InverseCompensation::update_plane() const {
  RealPlane out(accum.width(), accum.height());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) out(x, y) = update(x, y);
  }
  return out;
}

RealPlane InverseCompensation::coverage() const {
  RealPlane out(weight.width(), weight.height());
  auto src = weight.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<double>(src[i]) / kUnitWeight;
  return out;
}

}  // namespace lwvc
