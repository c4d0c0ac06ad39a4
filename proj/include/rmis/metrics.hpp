#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rmis/distance.hpp"
#include "rmis/error.hpp"
#include "rmis/mask.hpp"

namespace rmis {

/// Tolerances shared by the segmentation and detection metrics.
struct MetricConfig {
  double tau = 13.0;  // NSD boundary tolerance, pixels
  double xi = 0.3;    // detection IoU threshold (strict >)

  void validate() const {
    if (!(tau >= 0.0)) throw ConfigError("tau must be >= 0, got " + std::to_string(tau));
    if (!(xi > 0.0 && xi < 1.0)) {
      throw ConfigError("xi must lie in (0, 1), got " + std::to_string(xi));
    }
  }
};

struct OverlapCounts {
  std::size_t reference = 0;
  std::size_t prediction = 0;
  std::size_t intersection = 0;

  std::size_t union_size() const { return reference + prediction - intersection; }
};

/// Nonzero pixels are foreground in both masks.
inline OverlapCounts overlap_counts(const LabelMask& y, const LabelMask& yhat) {
  require_same_shape(y, yhat);
  OverlapCounts c;
  const auto& a = y.labels();
  const auto& b = yhat.labels();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool in_a = a[i] != 0;
    const bool in_b = b[i] != 0;
    c.reference += in_a;
    c.prediction += in_b;
    c.intersection += in_a && in_b;
  }
  return c;
}

/// Both views must list pixels in row-major order (as `instances` does).
inline OverlapCounts overlap_counts(const InstanceView& y, const InstanceView& yhat) {
  OverlapCounts c{y.pixels.size(), yhat.pixels.size(), 0};
  auto i = y.pixels.begin();
  auto j = yhat.pixels.begin();
  while (i != y.pixels.end() && j != yhat.pixels.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++c.intersection;
      ++i;
      ++j;
    }
  }
  return c;
}

// Both-empty is perfect agreement on absence.
inline double dsc(const OverlapCounts& c) {
  const std::size_t total = c.reference + c.prediction;
  if (total == 0) return 1.0;
  return 2.0 * static_cast<double>(c.intersection) / static_cast<double>(total);
}

inline double iou(const OverlapCounts& c) {
  const std::size_t u = c.union_size();
  if (u == 0) return 1.0;
  return static_cast<double>(c.intersection) / static_cast<double>(u);
}

inline double dsc(const LabelMask& y, const LabelMask& yhat) { return dsc(overlap_counts(y, yhat)); }
inline double iou(const LabelMask& y, const LabelMask& yhat) { return iou(overlap_counts(y, yhat)); }
inline double dsc(const InstanceView& y, const InstanceView& yhat) { return dsc(overlap_counts(y, yhat)); }
inline double iou(const InstanceView& y, const InstanceView& yhat) { return iou(overlap_counts(y, yhat)); }

/// Squared distance from every point of each boundary to the nearest point
/// of the other, in input order. Both sets must be non-empty. Distances are
/// computed on the bounding box of both sets, which contains every candidate
/// nearest point, so the crop is exact.
struct BoundaryDistances {
  std::vector<double> ref_to_pred;
  std::vector<double> pred_to_ref;
};

inline BoundaryDistances squared_boundary_distances(std::span<const Pixel> boundary_ref,
                                                    std::span<const Pixel> boundary_pred) {
  if (boundary_ref.empty() || boundary_pred.empty()) {
    throw InputError("boundary distances need two non-empty boundaries");
  }
  int r0 = boundary_ref.front().row, r1 = r0;
  int c0 = boundary_ref.front().col, c1 = c0;
  for (auto set : {boundary_ref, boundary_pred}) {
    for (const auto& p : set) {
      r0 = std::min(r0, p.row);
      r1 = std::max(r1, p.row);
      c0 = std::min(c0, p.col);
      c1 = std::max(c1, p.col);
    }
  }
  const int w = c1 - c0 + 1;
  const int h = r1 - r0 + 1;
  auto index = [&](const Pixel& p) {
    return static_cast<std::size_t>(p.row - r0) * w + (p.col - c0);
  };
  std::vector<std::uint8_t> bitmap(static_cast<std::size_t>(w) * h);
  for (const auto& p : boundary_pred) bitmap[index(p)] = 1;
  const auto to_pred = squared_distance_transform(bitmap, w, h);
  std::fill(bitmap.begin(), bitmap.end(), 0);
  for (const auto& p : boundary_ref) bitmap[index(p)] = 1;
  const auto to_ref = squared_distance_transform(bitmap, w, h);

  BoundaryDistances out;
  out.ref_to_pred.reserve(boundary_ref.size());
  out.pred_to_ref.reserve(boundary_pred.size());
  for (const auto& p : boundary_ref) out.ref_to_pred.push_back(to_pred[index(p)]);
  for (const auto& p : boundary_pred) out.pred_to_ref.push_back(to_ref[index(p)]);
  return out;
}

/// Fraction of the two boundaries lying within `tau` of the other boundary
/// (inclusive). Both empty gives 1, exactly one empty gives 0.
inline double surface_dice(std::span<const Pixel> boundary_ref,
                           std::span<const Pixel> boundary_pred, double tau) {
  if (!(tau >= 0.0)) throw ConfigError("tau must be >= 0");
  if (boundary_ref.empty() && boundary_pred.empty()) return 1.0;
  if (boundary_ref.empty() || boundary_pred.empty()) return 0.0;
  const auto d = squared_boundary_distances(boundary_ref, boundary_pred);
  const double tau2 = tau * tau;
  std::size_t within = 0;
  for (double v : d.ref_to_pred) within += v <= tau2;
  for (double v : d.pred_to_ref) within += v <= tau2;
  return static_cast<double>(within) /
         static_cast<double>(boundary_ref.size() + boundary_pred.size());
}

/// Normalized surface dice of two masks (nonzero = foreground).
inline double nsd(const LabelMask& y, const LabelMask& yhat, double tau) {
  require_same_shape(y, yhat);
  const auto by = boundary(y);
  const auto bp = boundary(yhat);
  return surface_dice(by, bp, tau);
}

inline double nsd(const InstanceView& y, const InstanceView& yhat, double tau) {
  const auto by = boundary(y);
  const auto bp = boundary(yhat);
  return surface_dice(by, bp, tau);
}

}  // namespace rmis
