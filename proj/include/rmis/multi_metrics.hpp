#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "rmis/error.hpp"
#include "rmis/mask.hpp"
#include "rmis/matching.hpp"
#include "rmis/metrics.hpp"

namespace rmis {

namespace detail {

inline const InstanceView& view_by_label(const std::vector<InstanceView>& views, Label label) {
  auto it = std::lower_bound(views.begin(), views.end(), label,
                             [](const InstanceView& v, Label l) { return v.label < l; });
  return *it;
}

template <typename PairScore>
double mean_over_instances(const std::vector<InstanceView>& refs,
                           const std::vector<InstanceView>& preds, MatchScore match,
                           PairScore&& pair_score) {
  if (refs.empty() && preds.empty()) return 1.0;
  const Assignment a = match_instances(refs, preds, match);
  double sum = 0.0;
  for (const auto& p : a.pairs) {
    sum += pair_score(view_by_label(refs, p.ref), view_by_label(preds, p.pred), p.score);
  }
  // Unmatched instances on either side contribute zeros.
  const std::size_t denom = a.pairs.size() + a.unmatched_refs.size() + a.unmatched_preds.size();
  return sum / static_cast<double>(denom);
}

}  // namespace detail

/// Multi-instance DSC: mean pair DSC over the instance assignment, with every
/// unmatched reference or predicted instance counted as a zero.
inline double mi_dsc(const LabelMask& ref, const LabelMask& pred,
                     MatchScore match = MatchScore::Dsc) {
  require_same_shape(ref, pred);
  return detail::mean_over_instances(
      instances(ref), instances(pred), match,
      [match](const InstanceView& r, const InstanceView& p, double score) {
        return match == MatchScore::Dsc ? score : dsc(r, p);
      });
}

inline double mi_nsd(const LabelMask& ref, const LabelMask& pred, double tau,
                     MatchScore match = MatchScore::Dsc) {
  require_same_shape(ref, pred);
  if (!(tau >= 0.0)) throw ConfigError("tau must be >= 0");
  return detail::mean_over_instances(
      instances(ref), instances(pred), match,
      [tau](const InstanceView& r, const InstanceView& p, double) { return nsd(r, p, tau); });
}

/// TP/FP/FN for one frame, matching on IoU.
inline DetectionOutcome detection_outcome(const LabelMask& ref, const LabelMask& pred, double xi) {
  return classify_detections(match_instances(ref, pred, MatchScore::Iou), xi);
}

struct DetectionRecord {
  std::string case_id;
  InstanceView instance;
  double confidence = 1.0;
};

struct PRPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct PRCurve {
  std::vector<PRPoint> points;  // one per detection, in sweep order
  double ap = 0.0;
};

/// Every instance of `pred` becomes a detection with the given confidence.
inline std::vector<DetectionRecord> detections_from_mask(const std::string& case_id,
                                                         const LabelMask& pred,
                                                         double confidence = 1.0) {
  std::vector<DetectionRecord> out;
  for (auto& v : instances(pred)) out.push_back({case_id, std::move(v), confidence});
  return out;
}

/// Average precision over all frames. Detections are matched to reference
/// instances per frame on IoU; a matched detection above `xi` is a TP, any
/// other detection an FP. The global sweep orders detections by confidence
/// (descending), then case id, then instance label. AP is the all-point
/// interpolated area under the precision/recall curve.
inline PRCurve average_precision(const std::vector<DetectionRecord>& detections,
                                 const std::map<std::string, LabelMask>& refs, double xi) {
  struct Scored {
    double confidence;
    std::string case_id;
    Label label;
    bool tp;
  };

  std::map<std::string, std::vector<const DetectionRecord*>> by_case;
  for (const auto& d : detections) {
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
      throw InputError("detection confidence outside [0, 1] in case " + d.case_id);
    }
    if (!refs.contains(d.case_id)) throw InputError("detection for unknown case id " + d.case_id);
    by_case[d.case_id].push_back(&d);
  }

  std::size_t total_refs = 0;
  std::map<std::string, std::vector<InstanceView>> ref_views;
  for (const auto& [id, mask] : refs) {
    auto views = instances(mask);
    total_refs += views.size();
    ref_views.emplace(id, std::move(views));
  }

  std::vector<Scored> scored;
  scored.reserve(detections.size());
  for (auto& [id, dets] : by_case) {
    std::sort(dets.begin(), dets.end(), [](auto* a, auto* b) {
      return a->instance.label < b->instance.label;
    });
    std::vector<InstanceView> preds;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (i > 0 && dets[i]->instance.label == dets[i - 1]->instance.label) {
        throw InputError("duplicate detection label " + std::to_string(dets[i]->instance.label) +
                         " in case " + id);
      }
      preds.push_back(dets[i]->instance);
    }
    const Assignment a = match_instances(ref_views.at(id), preds, MatchScore::Iou);
    for (const auto* d : dets) {
      auto it = std::find_if(a.pairs.begin(), a.pairs.end(),
                             [&](const MatchedPair& p) { return p.pred == d->instance.label; });
      const bool tp = it != a.pairs.end() && it->score > xi;
      scored.push_back({d->confidence, id, d->instance.label, tp});
    }
  }

  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return std::tie(a.case_id, a.label) < std::tie(b.case_id, b.label);
  });

  PRCurve curve;
  if (total_refs == 0) {
    // Nothing to find: perfect only if nothing was claimed.
    curve.ap = scored.empty() ? 1.0 : 0.0;
    for (std::size_t i = 0; i < scored.size(); ++i) curve.points.push_back({0.0, 0.0});
    return curve;
  }

  std::size_t tp = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    tp += scored[i].tp;
    curve.points.push_back({static_cast<double>(tp) / static_cast<double>(total_refs),
                            static_cast<double>(tp) / static_cast<double>(i + 1)});
  }
  std::vector<double> envelope(curve.points.size());
  double running = 0.0;
  for (std::size_t i = curve.points.size(); i-- > 0;) {
    running = std::max(running, curve.points[i].precision);
    envelope[i] = running;
  }
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    curve.ap += (curve.points[i].recall - prev_recall) * envelope[i];
    prev_recall = curve.points[i].recall;
  }
  return curve;
}

}  // namespace rmis
