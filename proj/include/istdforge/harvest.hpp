#pragma once

#include <string>
#include <vector>

#include "istdforge/components.hpp"
#include "istdforge/image.hpp"
#include "istdforge/metrics.hpp"

namespace istdforge {

/// One evaluated training frame: the source image, its ground truth, and an
/// externally produced (already thresholded) prediction.
struct PredictionPair {
    Mask pred;
    Mask truth;
    Image image;
    std::string id;

    bool dims_consistent() const {
        return pred.same_dims(truth) && pred.width() == image.width() &&
               pred.height() == image.height();
    }
};

/// Hard-sample selection thresholds and patch extraction padding.
struct HarvestConfig {
    double pixacc_threshold = 0.5;  // keep pairs scoring below this recall
    double iou_threshold = 0.5;     // ... and below this IoU
    int patch_pad = 8;              // context ring kept around each target box
};

/// One cut-out target: image window, the component's mask bits in that
/// window, and where it came from. usage_count tracks how many composites
/// have consumed this patch.
struct TargetPatch {
    Image pixels;
    Mask mask;
    Rect origin;
    std::string source_id;
    int usage_count = 0;
};

/// Keeps exactly the pairs the model handled poorly: per-pair recall below
/// pixacc_threshold AND IoU below iou_threshold. Order is preserved.
inline std::vector<PredictionPair> select_hard(const std::vector<PredictionPair>& pairs,
                                               const HarvestConfig& cfg = {}) {
    if (pairs.empty()) throw argument_error("select_hard: empty pair list");
    std::vector<PredictionPair> out;
    for (const PredictionPair& p : pairs) {
        if (!p.dims_consistent())
            throw argument_error("select_hard: dimension mismatch in pair " + p.id);
        if (pixel_accuracy(p.pred, p.truth) < cfg.pixacc_threshold &&
            iou(p.pred, p.truth) < cfg.iou_threshold)
            out.push_back(p);
    }
    return out;
}

/// Cuts one patch per 8-connected target in the truth mask. The bounding box
/// grows by patch_pad on every side (clamped to the image) so the blender
/// downstream has boundary context. An empty mask yields an empty list.
inline std::vector<TargetPatch> extract_targets(const PredictionPair& pair,
                                                const HarvestConfig& cfg = {}) {
    if (!pair.dims_consistent())
        throw argument_error("extract_targets: dimension mismatch in pair " + pair.id);

    basic_grid<std::int32_t> labels;
    const auto comps = label_components(pair.truth, &labels);

    std::vector<TargetPatch> out;
    out.reserve(comps.size());
    for (const ComponentStats& c : comps) {
        const int x0 = std::max(0, c.bbox.x - cfg.patch_pad);
        const int y0 = std::max(0, c.bbox.y - cfg.patch_pad);
        const int x1 = std::min(pair.image.width(), c.bbox.right() + cfg.patch_pad);
        const int y1 = std::min(pair.image.height(), c.bbox.bottom() + cfg.patch_pad);
        const Rect window{x0, y0, x1 - x0, y1 - y0};

        TargetPatch patch;
        patch.pixels = pair.image.crop(window);
        patch.mask = Mask(window.w, window.h);
        for (int y = 0; y < window.h; ++y)
            for (int x = 0; x < window.w; ++x)
                patch.mask.set(x, y, labels(window.x + x, window.y + y) == c.label);
        patch.origin = window;
        patch.source_id = pair.id;
        out.push_back(std::move(patch));
    }
    return out;
}

} // namespace istdforge
