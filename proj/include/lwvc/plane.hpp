#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lwvc {

/// Row-major 2D sample array.
template <typename T>
class Plane {
 public:
  using value_type = T;

  Plane() = default;
  Plane(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& at(int x, int y) { return data_[index(x, y)]; }
  const T& at(int x, int y) const { return data_[index(x, y)]; }
  T& operator()(int x, int y) { return at(x, y); }
  const T& operator()(int x, int y) const { return at(x, y); }

  /// Edge-clamped read.
  const T& clamped(int x, int y) const {
    x = x < 0 ? 0 : (x >= width_ ? width_ - 1 : x);
    y = y < 0 ? 0 : (y >= height_ ? height_ - 1 : y);
    return at(x, y);
  }

  std::span<T> row(int y) {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<const T> row(int y) const {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }

  std::span<T> samples() noexcept { return data_; }
  std::span<const T> samples() const noexcept { return data_; }

  bool operator==(const Plane&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using IntPlane = Plane<std::int32_t>;
using RealPlane = Plane<double>;

template <typename To, typename From>
Plane<To> plane_cast(const Plane<From>& in) {
  Plane<To> out(in.width(), in.height());
  auto src = in.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<To>(src[i]);
  return out;
}

}  // namespace lwvc
