#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rmis/mask.hpp"

namespace rmis {

/// Per-pixel Euclidean distance to the nearest pixel of a source set.
/// Stored squared: squared distances between pixel centres are integers, so
/// tolerance tests against them are exact.
class DistanceField {
 public:
  DistanceField(int width, int height, std::vector<double> squared)
      : width_(width), height_(height), squared_(std::move(squared)) {}

  int width() const { return width_; }
  int height() const { return height_; }

  double squared(int row, int col) const {
    return squared_[static_cast<std::size_t>(row) * width_ + col];
  }
  double at(int row, int col) const { return std::sqrt(squared(row, col)); }

  /// +infinity everywhere when the source set was empty.
  const std::vector<double>& squared_values() const { return squared_; }

 private:
  int width_;
  int height_;
  std::vector<double> squared_;
};

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas for one line, in place. `v` and `z` are scratch.
inline void edt_1d(double* f, std::ptrdiff_t stride, int n, std::vector<double>& d,
                   std::vector<int>& v, std::vector<double>& z) {
  d.resize(n);
  v.resize(n);
  z.resize(n + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    const double fq = f[q * stride];
    if (fq == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = 0;
    // z[0] is -inf, so k never drops below 0.
    while (true) {
      const int p = v[k];
      s = ((fq + double(q) * q) - (f[p * stride] + double(p) * p)) / (2.0 * (q - p));
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) return;  // whole line is +inf
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j] * stride];
  }
  for (int q = 0; q < n; ++q) f[q * stride] = d[q];
}

}  // namespace detail

/// Exact squared Euclidean distance transform of a source bitmap
/// (nonzero = source). Separable lower-envelope algorithm, O(width*height).
inline std::vector<double> squared_distance_transform(std::span<const std::uint8_t> source,
                                                      int width, int height) {
  std::vector<double> f(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    f[i] = source[i] != 0 ? 0.0 : detail::kInf;
  }
  std::vector<double> d;
  std::vector<int> v;
  std::vector<double> z;
  for (int c = 0; c < width; ++c) detail::edt_1d(f.data() + c, width, height, d, v, z);
  for (int r = 0; r < height; ++r) {
    detail::edt_1d(f.data() + static_cast<std::ptrdiff_t>(r) * width, 1, width, d, v, z);
  }
  return f;
}

inline DistanceField distance_field(std::span<const Pixel> source, int width, int height) {
  std::vector<std::uint8_t> bitmap(static_cast<std::size_t>(width) * height);
  for (const auto& p : source) bitmap[static_cast<std::size_t>(p.row) * width + p.col] = 1;
  return {width, height, squared_distance_transform(bitmap, width, height)};
}

}  // namespace rmis
