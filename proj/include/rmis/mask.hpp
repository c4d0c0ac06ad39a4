#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rmis/error.hpp"

namespace rmis {

using Label = std::uint16_t;

struct Pixel {
  int row = 0;
  int col = 0;

  friend constexpr bool operator==(const Pixel&, const Pixel&) = default;
  friend constexpr auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Row-major grid of instance ids; 0 is background.
class LabelMask {
 public:
  LabelMask() = default;

  LabelMask(int width, int height, std::vector<Label> labels)
      : width_(width), height_(height), labels_(std::move(labels)) {
    if (width <= 0 || height <= 0) {
      throw ShapeError("mask dimensions must be positive, got " +
                       std::to_string(width) + "x" + std::to_string(height));
    }
    if (labels_.size() != static_cast<std::size_t>(width) * height) {
      throw ShapeError("label grid has " + std::to_string(labels_.size()) +
                       " entries, expected " +
                       std::to_string(static_cast<std::size_t>(width) * height));
    }
  }

  static LabelMask zeros(int width, int height) {
    return {width, height,
            std::vector<Label>(static_cast<std::size_t>(width) * height, 0)};
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  Label at(int row, int col) const {
    return labels_[static_cast<std::size_t>(row) * width_ + col];
  }
  Label& at(int row, int col) {
    return labels_[static_cast<std::size_t>(row) * width_ + col];
  }

  const std::vector<Label>& labels() const { return labels_; }

  std::size_t foreground_count() const {
    return static_cast<std::size_t>(
        std::count_if(labels_.begin(), labels_.end(),
                      [](Label v) { return v != 0; }));
  }

  bool same_shape(const LabelMask& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const LabelMask&, const LabelMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Label> labels_;
};

inline void require_same_shape(const LabelMask& a, const LabelMask& b) {
  if (!a.same_shape(b)) {
    throw ShapeError("mask shapes differ: " + std::to_string(a.width()) + "x" +
                     std::to_string(a.height()) + " vs " +
                     std::to_string(b.width()) + "x" +
                     std::to_string(b.height()));
  }
}

/// All pixels carrying one label. Pixels are kept in row-major order.
struct InstanceView {
  Label label = 0;
  int width = 0;   // parent mask bounds
  int height = 0;
  std::vector<Pixel> pixels;
};

/// Metadata for one evaluated frame.
struct CaseRecord {
  std::string case_id;
  int stage = 1;
  std::string surgery_type;
  std::string team;
  int instrument_count = 0;
};

/// One view per distinct nonzero label, ascending by label. Instances are
/// defined by label value only; disconnected blobs sharing a label form one
/// instance.
inline std::vector<InstanceView> instances(const LabelMask& mask) {
  std::map<Label, std::vector<Pixel>> groups;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (const Label v = mask.at(r, c); v != 0) groups[v].push_back({r, c});
    }
  }
  std::vector<InstanceView> out;
  out.reserve(groups.size());
  for (auto& [label, pixels] : groups) {
    out.push_back({label, mask.width(), mask.height(), std::move(pixels)});
  }
  return out;
}

inline LabelMask binarize(const LabelMask& mask) {
  std::vector<Label> out(mask.labels().size());
  std::transform(mask.labels().begin(), mask.labels().end(), out.begin(),
                 [](Label v) { return static_cast<Label>(v != 0); });
  return {mask.width(), mask.height(), std::move(out)};
}

/// Binary mask holding only the pixels of `view`.
inline LabelMask to_mask(const InstanceView& view) {
  LabelMask m = LabelMask::zeros(view.width, view.height);
  for (const auto& p : view.pixels) m.at(p.row, p.col) = 1;
  return m;
}

/// Foreground pixels that are 4-adjacent to background. Cells outside the
/// image count as background. Returned row-major.
inline std::vector<Pixel> boundary_of_bitmap(const std::vector<std::uint8_t>& fg,
                                             int width, int height) {
  std::vector<Pixel> out;
  auto is_fg = [&](int r, int c) {
    return r >= 0 && r < height && c >= 0 && c < width &&
           fg[static_cast<std::size_t>(r) * width + c] != 0;
  };
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (!is_fg(r, c)) continue;
      if (!is_fg(r - 1, c) || !is_fg(r + 1, c) || !is_fg(r, c - 1) ||
          !is_fg(r, c + 1)) {
        out.push_back({r, c});
      }
    }
  }
  return out;
}

inline std::vector<Pixel> boundary(const LabelMask& mask) {
  std::vector<std::uint8_t> fg(mask.size());
  std::transform(mask.labels().begin(), mask.labels().end(), fg.begin(),
                 [](Label v) { return static_cast<std::uint8_t>(v != 0); });
  return boundary_of_bitmap(fg, mask.width(), mask.height());
}

/// Boundary of an arbitrary pixel set, computed on its bounding box so that
/// small instances in large frames stay cheap. Same rule as for bitmaps:
/// anything outside the set (including outside the image) is background.
inline std::vector<Pixel> boundary_of_pixels(std::span<const Pixel> pixels) {
  if (pixels.empty()) return {};
  int r0 = pixels.front().row, r1 = r0, c0 = pixels.front().col, c1 = c0;
  for (const auto& p : pixels) {
    r0 = std::min(r0, p.row);
    r1 = std::max(r1, p.row);
    c0 = std::min(c0, p.col);
    c1 = std::max(c1, p.col);
  }
  const int w = c1 - c0 + 1;
  const int h = r1 - r0 + 1;
  std::vector<std::uint8_t> local(static_cast<std::size_t>(w) * h);
  for (const auto& p : pixels) {
    local[static_cast<std::size_t>(p.row - r0) * w + (p.col - c0)] = 1;
  }
  auto out = boundary_of_bitmap(local, w, h);
  for (auto& p : out) {
    p.row += r0;
    p.col += c0;
  }
  return out;
}

inline std::vector<Pixel> boundary(const InstanceView& view) {
  return boundary_of_pixels(view.pixels);
}

/// Relabels every 4-connected component of every instance with its own id
/// (1, 2, ... in row-major order of first pixel). This is a reporting aid;
/// evaluation itself never splits labels.
inline LabelMask split_connected_components(const LabelMask& mask) {
  LabelMask out = LabelMask::zeros(mask.width(), mask.height());
  std::vector<Pixel> stack;
  int next = 0;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      const Label v = mask.at(r, c);
      if (v == 0 || out.at(r, c) != 0) continue;
      if (++next > 0xFFFF) {
        throw FormatError("more than 65535 connected components");
      }
      const auto id = static_cast<Label>(next);
      out.at(r, c) = id;
      stack.push_back({r, c});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        constexpr int dr[] = {-1, 1, 0, 0};
        constexpr int dc[] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
          const int nr = p.row + dr[k];
          const int nc = p.col + dc[k];
          if (nr < 0 || nr >= mask.height() || nc < 0 || nc >= mask.width())
            continue;
          if (mask.at(nr, nc) == v && out.at(nr, nc) == 0) {
            out.at(nr, nc) = id;
            stack.push_back({nr, nc});
          }
        }
      }
    }
  }
  return out;
}

}  // namespace rmis
