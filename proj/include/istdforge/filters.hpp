#pragma once

#include <cmath>
#include <utility>

#include "istdforge/image.hpp"

namespace istdforge {

namespace detail {

/// Bilinear sample at a real coordinate, sample centers at integer positions,
/// out-of-range taps replicated.
template <typename G>
double bilinear_sample(const G& g, double x, double y) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    const double v00 = g.at_clamped(x0, y0);
    const double v10 = g.at_clamped(x0 + 1, y0);
    const double v01 = g.at_clamped(x0, y0 + 1);
    const double v11 = g.at_clamped(x0 + 1, y0 + 1);
    return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) +
           fy * ((1.0 - fx) * v01 + fx * v11);
}

inline Grid resize_bilinear_grid(const Grid& src, int new_w, int new_h) {
    if (new_w < 1 || new_h < 1)
        throw argument_error("resize dimensions must be >= 1");
    Grid out(new_w, new_h);
    const double sx = static_cast<double>(src.width()) / new_w;
    const double sy = static_cast<double>(src.height()) / new_h;
    for (int y = 0; y < new_h; ++y) {
        const double src_y = (y + 0.5) * sy - 0.5;
        for (int x = 0; x < new_w; ++x) {
            const double src_x = (x + 0.5) * sx - 0.5;
            out(x, y) = bilinear_sample(src, src_x, src_y);
        }
    }
    return out;
}

/// 3x3 Sobel pair on a raw grid, replicate padding. Tolerates grids smaller
/// than the kernel (clamped taps collapse and the response goes to zero),
/// which the half-resolution wavelet baseband relies on.
inline std::pair<Grid, Grid> sobel_grid(const Grid& g) {
    const int w = g.width();
    const int h = g.height();
    Grid gx(w, h);
    Grid gy(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double tl = g.at_clamped(x - 1, y - 1);
            const double tc = g.at_clamped(x, y - 1);
            const double tr = g.at_clamped(x + 1, y - 1);
            const double ml = g.at_clamped(x - 1, y);
            const double mr = g.at_clamped(x + 1, y);
            const double bl = g.at_clamped(x - 1, y + 1);
            const double bc = g.at_clamped(x, y + 1);
            const double br = g.at_clamped(x + 1, y + 1);
            gx(x, y) = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
            gy(x, y) = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
        }
    }
    return {std::move(gx), std::move(gy)};
}

inline Grid sobel_magnitude(const Grid& g) {
    auto [gx, gy] = sobel_grid(g);
    Grid mag(g.width(), g.height());
    for (int y = 0; y < g.height(); ++y)
        for (int x = 0; x < g.width(); ++x)
            mag(x, y) = std::hypot(gx(x, y), gy(x, y));
    return mag;
}

inline Grid laplacian_grid(const Grid& g) {
    const int w = g.width();
    const int h = g.height();
    Grid out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out(x, y) = g.at_clamped(x - 1, y) + g.at_clamped(x + 1, y) +
                        g.at_clamped(x, y - 1) + g.at_clamped(x, y + 1) -
                        4.0 * g(x, y);
    return out;
}

} // namespace detail

/// Bilinear resize, sample centers at (i + 0.5) / n. Exact on constants and
/// never leaves the input value range.
inline Image resize_bilinear(const Image& img, int new_w, int new_h) {
    return Image::from_grid(detail::resize_bilinear_grid(img.grid(), new_w, new_h));
}

/// Horizontal and vertical 3x3 Sobel responses with replicate padding.
/// Unnormalized kernel: a unit step produces a response of 4.
inline std::pair<Grid, Grid> sobel_gradients(const Image& img) {
    if (img.width() < 3 || img.height() < 3)
        throw argument_error("sobel_gradients requires an image of at least 3x3");
    return detail::sobel_grid(img.grid());
}

/// 4-neighbor Laplacian [[0,1,0],[1,-4,1],[0,1,0]] with replicate padding.
inline Grid laplacian(const Image& img) {
    if (img.width() < 3 || img.height() < 3)
        throw argument_error("laplacian requires an image of at least 3x3");
    return detail::laplacian_grid(img.grid());
}

/// Dense 2D correlation with replicate padding. Kernels used here are
/// point-symmetric, so correlation and convolution coincide.
inline Grid correlate(const Grid& g, const Grid& kernel) {
    const int kw = kernel.width();
    const int kh = kernel.height();
    const int ax = kw / 2;
    const int ay = kh / 2;
    Grid out(g.width(), g.height());
    for (int y = 0; y < g.height(); ++y) {
        for (int x = 0; x < g.width(); ++x) {
            double acc = 0.0;
            for (int ky = 0; ky < kh; ++ky)
                for (int kx = 0; kx < kw; ++kx)
                    acc += kernel(kx, ky) * g.at_clamped(x + kx - ax, y + ky - ay);
            out(x, y) = acc;
        }
    }
    return out;
}

} // namespace istdforge
