#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "istdforge/filters.hpp"
#include "istdforge/image.hpp"
#include "istdforge/rng.hpp"

namespace istdforge {

/// Window geometry and acceptance thresholds for harvesting flat noise
/// regions. Zero window/stride values resolve per image: windows default to
/// width/12 by height/15 and the stride defaults to the window extent
/// (non-overlapping tiling).
struct NoiseRegionConfig {
    int window_w = 0;
    int window_h = 0;
    int stride = 0;
    double sigma_max = 0.05;  // population std dev ceiling: flat texture
    double mu_min = 0.05;     // mean floor: rejects dead black borders
};

/// One harvested noise patch, upsampled to its source resolution.
struct NoisePatch {
    Image pixels;
    std::string source_id;
    Rect window;   // accepted window in source coordinates
    double sigma = 0.0;
    double mu = 0.0;
};

struct NoiseLibrary {
    std::vector<NoisePatch> patches;
};

namespace detail {

struct WindowStats {
    double mu = 0.0;
    double sigma = 0.0;
};

inline WindowStats window_stats(const Image& img, const Rect& r) {
    const double n = static_cast<double>(r.w) * static_cast<double>(r.h);
    double sum = 0.0;
    for (int y = r.y; y < r.bottom(); ++y)
        for (int x = r.x; x < r.right(); ++x) sum += img(x, y);
    const double mu = sum / n;
    double ss = 0.0;
    for (int y = r.y; y < r.bottom(); ++y) {
        for (int x = r.x; x < r.right(); ++x) {
            const double d = img(x, y) - mu;
            ss += d * d;
        }
    }
    return {mu, std::sqrt(ss / n)};
}

} // namespace detail

/// Scans one image and returns its flattest qualifying window (lowest sigma,
/// ties to the smallest (y, x) origin), or false if no window qualifies.
inline bool find_noise_window(const Image& img, const NoiseRegionConfig& cfg, Rect& window_out,
                              double& sigma_out, double& mu_out) {
    int ww = cfg.window_w > 0 ? cfg.window_w : img.width() / 12;
    int wh = cfg.window_h > 0 ? cfg.window_h : img.height() / 15;
    if (ww < 2 || wh < 2 || ww > img.width() || wh > img.height())
        throw argument_error("find_noise_window: window does not fit the image");
    const int sx = cfg.stride > 0 ? cfg.stride : ww;
    const int sy = cfg.stride > 0 ? cfg.stride : wh;

    bool found = false;
    double best_sigma = 0.0;
    for (int y = 0; y + wh <= img.height(); y += sy) {
        for (int x = 0; x + ww <= img.width(); x += sx) {
            const Rect r{x, y, ww, wh};
            const auto s = detail::window_stats(img, r);
            if (s.sigma > cfg.sigma_max || s.mu < cfg.mu_min) continue;
            if (!found || s.sigma < best_sigma) {
                found = true;
                best_sigma = s.sigma;
                window_out = r;
                sigma_out = s.sigma;
                mu_out = s.mu;
            }
        }
    }
    return found;
}

/// Harvests at most one patch per image: the flattest qualifying window,
/// stretched back to the full source resolution so it can stand in for the
/// image's background noise field. Throws if no image yields a window.
inline NoiseLibrary build_noise_library(const std::vector<Image>& images,
                                        const std::vector<std::string>& ids,
                                        const NoiseRegionConfig& cfg = {}) {
    if (images.size() != ids.size())
        throw argument_error("build_noise_library: images and ids differ in length");
    NoiseLibrary lib;
    for (std::size_t i = 0; i < images.size(); ++i) {
        Rect window;
        double sigma = 0.0, mu = 0.0;
        if (!find_noise_window(images[i], cfg, window, sigma, mu)) continue;
        NoisePatch p;
        p.pixels = resize_bilinear(images[i].crop(window), images[i].width(), images[i].height());
        p.source_id = ids[i];
        p.window = window;
        p.sigma = sigma;
        p.mu = mu;
        lib.patches.push_back(std::move(p));
    }
    if (lib.patches.empty())
        throw argument_error("build_noise_library: no qualifying noise window in any image");
    return lib;
}

enum class MixPolicy { Fixed, UniformRandom };

struct MixConfig {
    MixPolicy policy = MixPolicy::Fixed;
    double lambda = 0.5;  // used by Fixed; UniformRandom draws from [0, 1)
};

struct MixResult {
    Image image;
    int patch_index = -1;
    double lambda_used = 0.0;
};

/// Convex blend of a randomly chosen library patch into the source image:
/// X = lambda * patch + (1 - lambda) * source. Both inputs live in [0, 1]
/// and lambda in [0, 1], so the blend needs no clamping; lambda 0 and 1
/// reproduce the source and the resized patch exactly.
inline MixResult mix_noise(const Image& source, const NoiseLibrary& lib, const MixConfig& cfg,
                           Rng& rng) {
    if (lib.patches.empty()) throw argument_error("mix_noise: empty noise library");
    if (cfg.policy == MixPolicy::Fixed && (cfg.lambda < 0.0 || cfg.lambda > 1.0))
        throw argument_error("mix_noise: lambda must lie in [0, 1]");

    const int idx = static_cast<int>(rng.below(lib.patches.size()));
    const Image patch =
        resize_bilinear(lib.patches[static_cast<std::size_t>(idx)].pixels, source.width(), source.height());
    const double lambda = cfg.policy == MixPolicy::Fixed ? cfg.lambda : rng.uniform();

    Grid out(source.width(), source.height());
    for (int y = 0; y < source.height(); ++y)
        for (int x = 0; x < source.width(); ++x)
            out(x, y) = lambda * patch(x, y) + (1.0 - lambda) * source(x, y);
    return {Image::from_grid(std::move(out)), idx, lambda};
}

} // namespace istdforge
