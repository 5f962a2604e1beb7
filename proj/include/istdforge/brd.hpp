#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "istdforge/filters.hpp"
#include "istdforge/image.hpp"
#include "istdforge/rng.hpp"
#include "istdforge/wavelet.hpp"

namespace istdforge {

/// Non-overlapping block partition used for background scoring. Blocks are
/// block_size x block_size; any remainder at the right/bottom edge is ignored.
struct GridSpec {
    int block_size = 64;

    int rows(int image_height) const { return image_height / block_size; }
    int cols(int image_width) const { return image_width / block_size; }
};

/// Per-block background-tendency scores in [0, 1]. Lower means flatter, i.e.
/// more background-like. scores(x, y) is block column x, block row y.
struct ProbabilityMap {
    Grid scores;
    GridSpec grid;
    double edge_weight = 0.5;
    double lap_weight = 0.5;
};

enum class CropPolicy {
    ArgMin,    // crop around the lowest-scoring block
    Random,    // uniform random valid origin (ablation baseline)
};

struct BrdConfig {
    CropPolicy policy = CropPolicy::ArgMin;
    double tau_b = 0.5;   // threshold for multi-crop extraction
    int crop_size = 126;
    bool use_wmf = true;  // filter before scoring
};

struct BrdResult {
    Image crop;
    Rect origin;
    ProbabilityMap map;
};

namespace detail {

/// Raw per-block features before normalization:
/// edge = mean Sobel magnitude over the block, lap = sum of |Laplacian|.
inline std::pair<Grid, Grid> block_raw_features(const Image& img, const GridSpec& grid) {
    const int gc = grid.cols(img.width());
    const int gr = grid.rows(img.height());
    if (gc < 1 || gr < 1)
        throw argument_error("image smaller than one scoring block");

    const auto [gx, gy] = sobel_grid(img.grid());
    const Grid lap = laplacian_grid(img.grid());
    const int s = grid.block_size;
    const double inv_area = 1.0 / (static_cast<double>(s) * s);

    Grid edge(gc, gr);
    Grid lap_sum(gc, gr);
    for (int by = 0; by < gr; ++by) {
        for (int bx = 0; bx < gc; ++bx) {
            double e = 0.0, l = 0.0;
            for (int y = by * s; y < (by + 1) * s; ++y) {
                for (int x = bx * s; x < (bx + 1) * s; ++x) {
                    e += std::hypot(gx(x, y), gy(x, y));
                    l += std::abs(lap(x, y));
                }
            }
            edge(bx, by) = e * inv_area;
            lap_sum(bx, by) = l;
        }
    }
    return {std::move(edge), std::move(lap_sum)};
}

/// Min-max normalization over all blocks; a feature that is constant across
/// blocks normalizes to 0 everywhere, so flat images score 0.
inline void minmax_normalize(Grid& g) {
    const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
    const double low = *lo;  // copied before the loop overwrites the element
    const double range = *hi - low;
    if (range <= 0.0) {
        for (double& v : g) v = 0.0;
        return;
    }
    for (double& v : g) v = (v - low) / range;
}

inline std::pair<int, int> argmin_block(const Grid& scores) {
    int best_bx = 0, best_by = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int by = 0; by < scores.height(); ++by)
        for (int bx = 0; bx < scores.width(); ++bx)
            if (scores(bx, by) < best) {  // strict: ties keep the first block in row-major order
                best = scores(bx, by);
                best_bx = bx;
                best_by = by;
            }
    return {best_bx, best_by};
}

/// Crop window of the configured size centered on the block, clamped to bounds.
inline Rect centered_crop(const Image& img, const GridSpec& grid, int bx, int by, int crop) {
    const double cx = bx * grid.block_size + grid.block_size / 2.0;
    const double cy = by * grid.block_size + grid.block_size / 2.0;
    int ox = static_cast<int>(std::lround(cx - crop / 2.0));
    int oy = static_cast<int>(std::lround(cy - crop / 2.0));
    ox = std::clamp(ox, 0, img.width() - crop);
    oy = std::clamp(oy, 0, img.height() - crop);
    return Rect{ox, oy, crop, crop};
}

} // namespace detail

/// Scores every block: 0.5 * normalized edge density + 0.5 * normalized
/// absolute Laplacian response, each min-max normalized across the image's
/// blocks. Low scores mark low-texture background candidates.
inline ProbabilityMap block_scores(const Image& img, const GridSpec& grid = {}) {
    auto [edge, lap] = detail::block_raw_features(img, grid);
    detail::minmax_normalize(edge);
    detail::minmax_normalize(lap);

    ProbabilityMap map;
    map.grid = grid;
    map.scores = Grid(edge.width(), edge.height());
    for (int by = 0; by < edge.height(); ++by)
        for (int bx = 0; bx < edge.width(); ++bx)
            map.scores(bx, by) = map.edge_weight * edge(bx, by) + map.lap_weight * lap(bx, by);
    return map;
}

/// Finds the most background-like region and crops it from the ORIGINAL
/// pixels. When use_wmf is on, scoring runs on the denoised image so random
/// noise does not masquerade as texture, but the crop itself stays unfiltered.
/// The Random policy ignores the scores and picks a uniform valid origin.
inline BrdResult detect_background(const Image& img, const BrdConfig& cfg = {},
                                   const WmfConfig& wmf_cfg = {}, const GridSpec& grid = {},
                                   Rng* rng = nullptr) {
    if (cfg.crop_size < 1 || cfg.crop_size > img.width() || cfg.crop_size > img.height())
        throw argument_error("crop_size does not fit inside the image");

    const Image scored = cfg.use_wmf ? wmf_denoise(img, wmf_cfg) : img;
    ProbabilityMap map = block_scores(scored, grid);

    Rect origin;
    if (cfg.policy == CropPolicy::Random) {
        if (!rng) throw argument_error("random crop policy requires an rng");
        origin.w = origin.h = cfg.crop_size;
        origin.x = static_cast<int>(rng->below(static_cast<std::uint64_t>(img.width() - cfg.crop_size + 1)));
        origin.y = static_cast<int>(rng->below(static_cast<std::uint64_t>(img.height() - cfg.crop_size + 1)));
    } else {
        const auto [bx, by] = detail::argmin_block(map.scores);
        origin = detail::centered_crop(img, grid, bx, by, cfg.crop_size);
    }
    return BrdResult{img.crop(origin), origin, std::move(map)};
}

/// Threshold mode: one centered crop per block whose score falls below tau_b.
/// Useful for harvesting several background candidates from a single frame.
inline std::vector<std::pair<Image, Rect>> threshold_crops(const Image& img, const BrdConfig& cfg = {},
                                                           const WmfConfig& wmf_cfg = {},
                                                           const GridSpec& grid = {}) {
    if (cfg.crop_size < 1 || cfg.crop_size > img.width() || cfg.crop_size > img.height())
        throw argument_error("crop_size does not fit inside the image");

    const Image scored = cfg.use_wmf ? wmf_denoise(img, wmf_cfg) : img;
    const ProbabilityMap map = block_scores(scored, grid);

    std::vector<std::pair<Image, Rect>> out;
    for (int by = 0; by < map.scores.height(); ++by)
        for (int bx = 0; bx < map.scores.width(); ++bx)
            if (map.scores(bx, by) < cfg.tau_b) {
                const Rect r = detail::centered_crop(img, grid, bx, by, cfg.crop_size);
                out.emplace_back(img.crop(r), r);
            }
    return out;
}

/// Delegates to bilinear resize; kept as a named step because background
/// crops are always blown back up to the source resolution downstream.
inline Image upsample_background(const Image& crop, int target_w, int target_h) {
    return resize_bilinear(crop, target_w, target_h);
}

/// Nearest-neighbor rendering of the score map at block resolution, one
/// block_size x block_size tile per block.
inline Image score_heatmap(const ProbabilityMap& map) {
    const int s = map.grid.block_size;
    Grid out(map.scores.width() * s, map.scores.height() * s);
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x)
            out(x, y) = map.scores(x / s, y / s);
    return Image::from_grid(std::move(out));
}

} // namespace istdforge
