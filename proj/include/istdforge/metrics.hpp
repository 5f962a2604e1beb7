#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "istdforge/components.hpp"
#include "istdforge/image.hpp"

namespace istdforge {

struct ConfusionCounts {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
    long long tn = 0;

    long long total() const { return tp + fp + fn + tn; }

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
};

/// Component matching rule for detection metrics: a predicted blob counts as
/// a hit when its centroid lies within match_radius pixels of an unmatched
/// ground-truth blob's centroid. Components are 8-connected.
struct DetectionParams {
    double match_radius = 3.0;
};

struct PerImageStats {
    std::string id;
    ConfusionCounts counts;
    double iou = 0.0;
    int truth_components = 0;
    int matched_components = 0;
    long long false_alarm_pixels = 0;  // pixels of unmatched predicted blobs
};

/// The six headline numbers plus per-image breakdowns.
/// Conventions (the common ones in the small-target literature):
///   pixacc = dataset-pooled target-pixel recall, sum tp / sum (tp + fn)
///   miou   = dataset-pooled IoU, sum tp / sum (tp + fp + fn)
///   niou   = per-image IoU averaged over images
///   f1     = pooled 2 tp / (2 tp + fp + fn)
///   pd     = matched truth components / total truth components
///   fa     = unmatched predicted-component pixels / total pixels
struct EvalReport {
    double pixacc = 0.0;
    double miou = 0.0;
    double niou = 0.0;
    double pd = 0.0;
    double fa = 0.0;
    double f1 = 0.0;
    std::vector<PerImageStats> per_image;
};

/// Exact pixel counting; pred and truth must share dimensions.
inline ConfusionCounts confusion_counts(const Mask& pred, const Mask& truth) {
    if (!pred.same_dims(truth))
        throw argument_error("confusion_counts: mask dimensions differ");
    ConfusionCounts c;
    for (int y = 0; y < pred.height(); ++y) {
        for (int x = 0; x < pred.width(); ++x) {
            const bool p = pred(x, y);
            const bool t = truth(x, y);
            if (p && t) ++c.tp;
            else if (p && !t) ++c.fp;
            else if (!p && t) ++c.fn;
            else ++c.tn;
        }
    }
    return c;
}

namespace detail {

/// ratio with the vacuous-perfection convention: 0/0 = 1.
inline double safe_ratio(double num, double den) {
    return den > 0.0 ? num / den : 1.0;
}

} // namespace detail

/// Per-pair target-pixel recall; empty truth counts as perfect.
inline double pixel_accuracy(const Mask& pred, const Mask& truth) {
    const ConfusionCounts c = confusion_counts(pred, truth);
    return detail::safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
}

/// Per-pair intersection over union; empty-vs-empty counts as perfect.
inline double iou(const Mask& pred, const Mask& truth) {
    const ConfusionCounts c = confusion_counts(pred, truth);
    return detail::safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp + c.fn));
}

struct PixelMetrics {
    double pixacc = 0.0;
    double miou = 0.0;
    double niou = 0.0;
    double f1 = 0.0;
};

/// Dataset-level pixel metrics over (pred, truth) pairs.
inline PixelMetrics pixel_metrics(const std::vector<std::pair<Mask, Mask>>& pairs) {
    if (pairs.empty()) throw argument_error("pixel_metrics: empty dataset");
    ConfusionCounts pooled;
    double iou_sum = 0.0;
    for (const auto& [pred, truth] : pairs) {
        const ConfusionCounts c = confusion_counts(pred, truth);
        pooled += c;
        iou_sum += detail::safe_ratio(static_cast<double>(c.tp),
                                      static_cast<double>(c.tp + c.fp + c.fn));
    }
    PixelMetrics m;
    m.pixacc = detail::safe_ratio(static_cast<double>(pooled.tp),
                                  static_cast<double>(pooled.tp + pooled.fn));
    m.miou = detail::safe_ratio(static_cast<double>(pooled.tp),
                                static_cast<double>(pooled.tp + pooled.fp + pooled.fn));
    m.niou = iou_sum / static_cast<double>(pairs.size());
    m.f1 = detail::safe_ratio(2.0 * static_cast<double>(pooled.tp),
                              static_cast<double>(2 * pooled.tp + pooled.fp + pooled.fn));
    return m;
}

struct DetectionMetrics {
    double pd = 0.0;
    double fa = 0.0;
};

namespace detail {

struct ImageDetection {
    int truth_components = 0;
    int matched = 0;
    long long false_pixels = 0;
    long long total_pixels = 0;
};

/// Greedy centroid matching for one image: candidate (truth, pred) pairs are
/// taken in ascending distance order, each component used at most once.
inline ImageDetection match_components(const Mask& pred, const Mask& truth,
                                       const DetectionParams& params) {
    if (!pred.same_dims(truth))
        throw argument_error("detection_metrics: mask dimensions differ");

    const auto truth_comps = label_components(truth);
    const auto pred_comps = label_components(pred);

    struct Cand {
        double dist;
        int ti;
        int pi;
    };
    std::vector<Cand> cands;
    for (int ti = 0; ti < static_cast<int>(truth_comps.size()); ++ti) {
        for (int pi = 0; pi < static_cast<int>(pred_comps.size()); ++pi) {
            const double d = std::hypot(truth_comps[ti].centroid_x - pred_comps[pi].centroid_x,
                                        truth_comps[ti].centroid_y - pred_comps[pi].centroid_y);
            if (d <= params.match_radius) cands.push_back({d, ti, pi});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        return std::tie(a.dist, a.ti, a.pi) < std::tie(b.dist, b.ti, b.pi);
    });

    std::vector<bool> truth_used(truth_comps.size(), false);
    std::vector<bool> pred_used(pred_comps.size(), false);
    ImageDetection out;
    out.truth_components = static_cast<int>(truth_comps.size());
    out.total_pixels = static_cast<long long>(pred.size());
    for (const Cand& c : cands) {
        if (truth_used[static_cast<std::size_t>(c.ti)] || pred_used[static_cast<std::size_t>(c.pi)]) continue;
        truth_used[static_cast<std::size_t>(c.ti)] = true;
        pred_used[static_cast<std::size_t>(c.pi)] = true;
        ++out.matched;
    }
    for (std::size_t pi = 0; pi < pred_comps.size(); ++pi)
        if (!pred_used[pi]) out.false_pixels += pred_comps[pi].pixel_count;
    return out;
}

} // namespace detail

/// Dataset-pooled detection probability and false-alarm rate.
inline DetectionMetrics detection_metrics(const std::vector<std::pair<Mask, Mask>>& pairs,
                                          const DetectionParams& params = {}) {
    if (pairs.empty()) throw argument_error("detection_metrics: empty dataset");
    long long truth_total = 0, matched = 0, false_pixels = 0, pixels = 0;
    for (const auto& [pred, truth] : pairs) {
        const auto d = detail::match_components(pred, truth, params);
        truth_total += d.truth_components;
        matched += d.matched;
        false_pixels += d.false_pixels;
        pixels += d.total_pixels;
    }
    DetectionMetrics m;
    m.pd = detail::safe_ratio(static_cast<double>(matched), static_cast<double>(truth_total));
    m.fa = pixels > 0 ? static_cast<double>(false_pixels) / static_cast<double>(pixels) : 0.0;
    return m;
}

/// Full report over a dataset; ids (optional) label the per-image rows.
inline EvalReport evaluate_dataset(const std::vector<std::pair<Mask, Mask>>& pairs,
                                   const DetectionParams& params = {},
                                   const std::vector<std::string>* ids = nullptr) {
    if (pairs.empty()) throw argument_error("evaluate_dataset: empty dataset");
    EvalReport r;
    const PixelMetrics pm = pixel_metrics(pairs);
    const DetectionMetrics dm = detection_metrics(pairs, params);
    r.pixacc = pm.pixacc;
    r.miou = pm.miou;
    r.niou = pm.niou;
    r.f1 = pm.f1;
    r.pd = dm.pd;
    r.fa = dm.fa;
    r.per_image.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        PerImageStats s;
        s.id = ids && i < ids->size() ? (*ids)[i] : std::to_string(i);
        s.counts = confusion_counts(pairs[i].first, pairs[i].second);
        s.iou = detail::safe_ratio(static_cast<double>(s.counts.tp),
                                   static_cast<double>(s.counts.tp + s.counts.fp + s.counts.fn));
        const auto d = detail::match_components(pairs[i].first, pairs[i].second, params);
        s.truth_components = d.truth_components;
        s.matched_components = d.matched;
        s.false_alarm_pixels = d.false_pixels;
        r.per_image.push_back(std::move(s));
    }
    return r;
}

} // namespace istdforge
