#pragma once

#include <cstdint>
#include <utility>

#include "istdforge/grid.hpp"

namespace istdforge {

inline double clamp01(double v) {
    // NaN lands on 0 so the unit-range invariant survives bad arithmetic.
    if (!(v >= 0.0)) return 0.0;
    if (v > 1.0) return 1.0;
    return v;
}

/// Single-channel luminance image. Every pixel is guaranteed to lie in
/// [0, 1] after construction; mutation goes through set() or from_grid(),
/// both of which clamp.
class Image {
public:
    Image() = default;

    Image(int width, int height, double fill = 0.0)
        : grid_(width, height, clamp01(fill)) {}

    /// Takes ownership of a real grid and clamps it into [0, 1].
    static Image from_grid(Grid g) {
        for (double& v : g) v = clamp01(v);
        Image img;
        img.grid_ = std::move(g);
        return img;
    }

    int width() const { return grid_.width(); }
    int height() const { return grid_.height(); }
    std::size_t size() const { return grid_.size(); }
    bool empty() const { return grid_.empty(); }

    double operator()(int x, int y) const { return grid_(x, y); }
    double at(int x, int y) const { return grid_.at(x, y); }
    double at_clamped(int x, int y) const { return grid_.at_clamped(x, y); }

    void set(int x, int y, double v) { grid_.at(x, y) = clamp01(v); }

    const Grid& grid() const { return grid_; }

    bool same_dims(const Image& other) const { return grid_.same_dims(other.grid_); }

    friend bool operator==(const Image& a, const Image& b) { return a.grid_ == b.grid_; }

    /// Crops a window; the rect must lie fully inside the image.
    Image crop(const Rect& r) const {
        if (!r.inside(width(), height()))
            throw argument_error("crop rect outside image bounds");
        Grid out(r.w, r.h);
        for (int y = 0; y < r.h; ++y)
            for (int x = 0; x < r.w; ++x)
                out(x, y) = grid_(r.x + x, r.y + y);
        return from_grid(std::move(out));
    }

private:
    Grid grid_;
};

/// Binary annotation grid: 0 = background, 1 = target.
class Mask {
public:
    Mask() = default;

    Mask(int width, int height, bool fill = false)
        : bits_(width, height, fill ? std::uint8_t{1} : std::uint8_t{0}) {}

    int width() const { return bits_.width(); }
    int height() const { return bits_.height(); }
    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }

    bool operator()(int x, int y) const { return bits_(x, y) != 0; }
    void set(int x, int y, bool v) { bits_.at(x, y) = v ? 1 : 0; }

    std::size_t positive_count() const {
        std::size_t n = 0;
        for (auto b : bits_) n += b;
        return n;
    }

    bool same_dims(const Mask& other) const { return bits_.same_dims(other.bits_); }

    friend bool operator==(const Mask& a, const Mask& b) { return a.bits_ == b.bits_; }

    Mask crop(const Rect& r) const {
        if (!r.inside(width(), height()))
            throw argument_error("crop rect outside mask bounds");
        Mask out(r.w, r.h);
        for (int y = 0; y < r.h; ++y)
            for (int x = 0; x < r.w; ++x)
                out.bits_(x, y) = bits_(r.x + x, r.y + y);
        return out;
    }

private:
    basic_grid<std::uint8_t> bits_;
};

} // namespace istdforge
