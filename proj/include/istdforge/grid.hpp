#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "istdforge/errors.hpp"

namespace istdforge {

/// Dense row-major 2D array. The workhorse behind images, masks, subbands
/// and score maps. (x, y) indexing with x = column, y = row.
template <typename T>
class basic_grid {
public:
    basic_grid() = default;

    basic_grid(int width, int height, T fill = T{})
        : width_(width), height_(height),
          data_(checked_size(width, height), fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(int x, int y) { return data_[idx(x, y)]; }
    const T& operator()(int x, int y) const { return data_[idx(x, y)]; }

    /// Bounds-checked access.
    T& at(int x, int y) {
        check_bounds(x, y);
        return data_[idx(x, y)];
    }
    const T& at(int x, int y) const {
        check_bounds(x, y);
        return data_[idx(x, y)];
    }

    /// Reads with indices clamped into range; realizes replicate padding.
    const T& at_clamped(int x, int y) const {
        x = std::clamp(x, 0, width_ - 1);
        y = std::clamp(y, 0, height_ - 1);
        return data_[idx(x, y)];
    }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    bool same_dims(const basic_grid& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const basic_grid& a, const basic_grid& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
    }

private:
    static std::size_t checked_size(int w, int h) {
        if (w <= 0 || h <= 0)
            throw argument_error("grid dimensions must be positive");
        return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    }

    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    void check_bounds(int x, int y) const {
        if (x < 0 || x >= width_ || y < 0 || y >= height_)
            throw argument_error("grid index out of range");
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// Real-valued field: gradients, wavelet subbands, kernels, score maps.
using Grid = basic_grid<double>;

/// Axis-aligned pixel rectangle, top-left anchored.
struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    int right() const { return x + w; }   // one past the last column
    int bottom() const { return y + h; }  // one past the last row

    bool contains(int px, int py) const {
        return px >= x && px < right() && py >= y && py < bottom();
    }

    /// True when the rect fits inside a width*height parent.
    bool inside(int parent_w, int parent_h) const {
        return x >= 0 && y >= 0 && w > 0 && h > 0 &&
               right() <= parent_w && bottom() <= parent_h;
    }

    friend bool operator==(const Rect&, const Rect&) = default;
};

} // namespace istdforge
