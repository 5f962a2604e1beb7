#pragma once

#include <algorithm>
#include <array>
#include <utility>

#include "istdforge/filters.hpp"
#include "istdforge/image.hpp"

namespace istdforge {

enum class WaveletFamily { Haar };

/// Settings for the wavelet multi-frequency filter.
struct WmfConfig {
    double epsilon = 1e-6;  // keeps the gradient normalization finite
    WaveletFamily family = WaveletFamily::Haar;
};

/// Single-level 2D decomposition: one low-frequency baseband plus three
/// oriented detail subbands (horizontal, vertical, diagonal). All four are
/// ceil(w/2) x ceil(h/2); odd sources are replicate-padded before analysis
/// and cropped back on reconstruction.
struct WaveletPyramid {
    Grid low;
    std::array<Grid, 3> high;  // [0] horizontal detail, [1] vertical, [2] diagonal
    int parent_width = 0;
    int parent_height = 0;

    bool dims_consistent() const {
        const int sw = (parent_width + 1) / 2;
        const int sh = (parent_height + 1) / 2;
        if (low.width() != sw || low.height() != sh) return false;
        for (const Grid& g : high)
            if (!g.same_dims(low)) return false;
        return parent_width >= 2 && parent_height >= 2;
    }
};

namespace detail {

/// Replicate-pads the right column / bottom row when a dimension is odd.
inline Grid pad_to_even(const Grid& g) {
    const int w = g.width() + (g.width() % 2);
    const int h = g.height() + (g.height() % 2);
    if (w == g.width() && h == g.height()) return g;
    Grid out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out(x, y) = g.at_clamped(x, y);
    return out;
}

} // namespace detail

/// Orthonormal Haar analysis. Per 2x2 block [[a,b],[c,d]]:
/// low = (a+b+c+d)/2 and the three details are signed half-differences,
/// so energy is preserved exactly.
inline WaveletPyramid wavelet_decompose(const Image& img, const WmfConfig& cfg = {}) {
    (void)cfg;  // Haar is the only family so far
    if (img.width() < 2 || img.height() < 2)
        throw argument_error("wavelet_decompose requires at least a 2x2 image");

    const Grid padded = detail::pad_to_even(img.grid());
    const int sw = padded.width() / 2;
    const int sh = padded.height() / 2;

    WaveletPyramid pyr;
    pyr.low = Grid(sw, sh);
    pyr.high = {Grid(sw, sh), Grid(sw, sh), Grid(sw, sh)};
    pyr.parent_width = img.width();
    pyr.parent_height = img.height();

    for (int by = 0; by < sh; ++by) {
        for (int bx = 0; bx < sw; ++bx) {
            const double a = padded(2 * bx, 2 * by);
            const double b = padded(2 * bx + 1, 2 * by);
            const double c = padded(2 * bx, 2 * by + 1);
            const double d = padded(2 * bx + 1, 2 * by + 1);
            pyr.low(bx, by) = (a + b + c + d) / 2.0;
            pyr.high[0](bx, by) = (a - b + c - d) / 2.0;
            pyr.high[1](bx, by) = (a + b - c - d) / 2.0;
            pyr.high[2](bx, by) = (a - b - c + d) / 2.0;
        }
    }
    return pyr;
}

/// Low-frequency-guided attenuation of the detail bands: each coefficient is
/// scaled by the baseband's Sobel gradient magnitude normalized to [0, 1).
/// Flat basebands therefore silence the detail bands entirely, while strong
/// edges pass through almost untouched.
inline WaveletPyramid edge_aware_filter(WaveletPyramid pyr, const WmfConfig& cfg = {}) {
    if (!pyr.dims_consistent())
        throw argument_error("edge_aware_filter: inconsistent pyramid");

    const Grid mag = detail::sobel_magnitude(pyr.low);
    const double peak = *std::max_element(mag.begin(), mag.end());
    const double denom = peak + cfg.epsilon;

    for (Grid& band : pyr.high)
        for (int y = 0; y < band.height(); ++y)
            for (int x = 0; x < band.width(); ++x)
                band(x, y) *= mag(x, y) / denom;
    return pyr;
}

/// Inverse Haar synthesis, cropped back to the parent dimensions and clamped
/// to [0, 1]. Round-tripping an unfiltered pyramid reproduces the source to
/// floating-point accuracy.
inline Image wavelet_reconstruct(const WaveletPyramid& pyr) {
    if (!pyr.dims_consistent())
        throw argument_error("wavelet_reconstruct: inconsistent pyramid");

    Grid out(pyr.parent_width, pyr.parent_height);
    const int sw = pyr.low.width();
    const int sh = pyr.low.height();
    for (int by = 0; by < sh; ++by) {
        for (int bx = 0; bx < sw; ++bx) {
            const double lo = pyr.low(bx, by);
            const double dh = pyr.high[0](bx, by);
            const double dv = pyr.high[1](bx, by);
            const double dd = pyr.high[2](bx, by);
            const double a = (lo + dh + dv + dd) / 2.0;
            const double b = (lo - dh + dv - dd) / 2.0;
            const double c = (lo + dh - dv - dd) / 2.0;
            const double d = (lo - dh - dv + dd) / 2.0;
            const int x0 = 2 * bx;
            const int y0 = 2 * by;
            out(x0, y0) = a;
            if (x0 + 1 < out.width()) out(x0 + 1, y0) = b;
            if (y0 + 1 < out.height()) out(x0, y0 + 1) = c;
            if (x0 + 1 < out.width() && y0 + 1 < out.height()) out(x0 + 1, y0 + 1) = d;
        }
    }
    return Image::from_grid(std::move(out));
}

/// The full wavelet multi-frequency filter: decompose, attenuate detail
/// bands where the baseband is flat, reconstruct.
inline Image wmf_denoise(const Image& img, const WmfConfig& cfg = {}) {
    return wavelet_reconstruct(edge_aware_filter(wavelet_decompose(img, cfg), cfg));
}

} // namespace istdforge
