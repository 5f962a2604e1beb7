#pragma once

#include <cstdint>
#include <vector>

#include "istdforge/grid.hpp"
#include "istdforge/image.hpp"

namespace istdforge {

/// One 8-connected blob of positive mask pixels.
struct ComponentStats {
    int label = 0;           // 1-based label in the label grid
    long long pixel_count = 0;
    double centroid_x = 0.0;
    double centroid_y = 0.0;
    Rect bbox;               // tight bounding box
};

/// Labels 8-connected components of a binary mask. Returns per-component
/// stats; `labels` gets 0 for background and the 1-based component label
/// elsewhere. Iterative BFS, so deep blobs cannot overflow the stack.
inline std::vector<ComponentStats> label_components(const Mask& mask,
                                                    basic_grid<std::int32_t>* labels_out = nullptr) {
    const int w = mask.width();
    const int h = mask.height();
    basic_grid<std::int32_t> labels(w, h, 0);
    std::vector<ComponentStats> comps;
    std::vector<std::pair<int, int>> stack;

    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            if (!mask(sx, sy) || labels(sx, sy) != 0) continue;
            const int label = static_cast<int>(comps.size()) + 1;
            ComponentStats c;
            c.label = label;
            int min_x = sx, max_x = sx, min_y = sy, max_y = sy;
            double sum_x = 0.0, sum_y = 0.0;

            labels(sx, sy) = label;
            stack.emplace_back(sx, sy);
            while (!stack.empty()) {
                const auto [x, y] = stack.back();
                stack.pop_back();
                ++c.pixel_count;
                sum_x += x;
                sum_y += y;
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx;
                        const int ny = y + dy;
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                        if (!mask(nx, ny) || labels(nx, ny) != 0) continue;
                        labels(nx, ny) = label;
                        stack.emplace_back(nx, ny);
                    }
                }
            }
            c.centroid_x = sum_x / static_cast<double>(c.pixel_count);
            c.centroid_y = sum_y / static_cast<double>(c.pixel_count);
            c.bbox = Rect{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
            comps.push_back(c);
        }
    }
    if (labels_out) *labels_out = std::move(labels);
    return comps;
}

} // namespace istdforge
