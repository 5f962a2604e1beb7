#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "istdforge/filters.hpp"
#include "istdforge/image.hpp"
#include "istdforge/rng.hpp"

namespace istdforge {

/// Line blur: `length` unit-weight points spread along `angle_deg` through
/// the kernel center. Angles 180 degrees apart describe the same line.
struct MotionBlurSpec {
    int length = 5;
    double angle_deg = 45.0;
};

enum class NoiseKind { Gaussian, SaltPepper, Speckle, Uniform, Poisson, Composite };

/// One scalar `amount` budget, interpreted per family: std dev for Gaussian
/// and Speckle, flip fraction for SaltPepper, amplitude for Uniform, inverse
/// peak count for Poisson. Composite spends amount/5 on each of the five.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::Composite;
    double amount = 0.05;
};

/// Benchmark policy: a seeded shuffle splits the corpus, each split blurs a
/// (1 - natural_fraction) subset, and every test image is noised. Train blur
/// is fixed; test blur keeps the train length but draws its angle from
/// test_angles. Masks pass through untouched.
struct DegradationSpec {
    double natural_fraction = 0.70;
    MotionBlurSpec train_blur;
    std::vector<double> test_angles = {25.0, 45.0, 90.0, 135.0, 150.0};
    NoiseSpec test_noise;
    double split_fraction = 0.5;
    std::uint64_t seed = 0;
};

/// Builds the normalized line kernel: odd-sized, bilinear point splatting,
/// weights sum to 1. Exposed separately so the geometry is testable.
inline Grid motion_blur_kernel(const MotionBlurSpec& spec) {
    if (spec.length < 1) throw argument_error("motion_blur_kernel: length must be >= 1");
    const int l = spec.length;
    const int k = (l % 2 == 1) ? l : l + 1;
    const int half = (k - 1) / 2;
    const double theta = spec.angle_deg * std::acos(-1.0) / 180.0;
    const double dx = std::cos(theta);
    const double dy = std::sin(theta);

    Grid kernel(k, k, 0.0);
    const double w = 1.0 / static_cast<double>(l);
    for (int i = 0; i < l; ++i) {
        const double t = static_cast<double>(i) - (static_cast<double>(l) - 1.0) / 2.0;
        const double px = half + t * dx;
        const double py = half + t * dy;
        const int x0 = static_cast<int>(std::floor(px));
        const int y0 = static_cast<int>(std::floor(py));
        const double fx = px - x0;
        const double fy = py - y0;
        // Taps with zero weight may index one past the kernel edge; skip them.
        const double tw[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
        const int tx[4] = {x0, x0 + 1, x0, x0 + 1};
        const int ty[4] = {y0, y0, y0 + 1, y0 + 1};
        for (int tap = 0; tap < 4; ++tap) {
            if (tw[tap] == 0.0) continue;
            if (tx[tap] < 0 || tx[tap] >= k || ty[tap] < 0 || ty[tap] >= k)
                throw argument_error("motion_blur_kernel: splat outside kernel");
            kernel(tx[tap], ty[tap]) += w * tw[tap];
        }
    }

    const double total = std::accumulate(kernel.begin(), kernel.end(), 0.0);
    for (double& v : kernel) v /= total;
    return kernel;
}

inline Image motion_blur(const Image& img, const MotionBlurSpec& spec) {
    if (spec.length == 1) return img;
    return Image::from_grid(correlate(img.grid(), motion_blur_kernel(spec)));
}

namespace detail {

inline Image noise_single(const Image& img, NoiseKind kind, double amount, Rng& rng) {
    Grid out(img.width(), img.height());
    const int w = img.width();
    const int h = img.height();
    switch (kind) {
    case NoiseKind::Gaussian:
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) out(x, y) = img(x, y) + amount * rng.normal();
        break;
    case NoiseKind::SaltPepper:
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double u = rng.uniform();
                out(x, y) = u < amount * 0.5 ? 0.0 : (u < amount ? 1.0 : img(x, y));
            }
        }
        break;
    case NoiseKind::Speckle:
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) out(x, y) = img(x, y) * (1.0 + amount * rng.normal());
        break;
    case NoiseKind::Uniform:
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) out(x, y) = img(x, y) + rng.uniform(-amount, amount);
        break;
    case NoiseKind::Poisson: {
        const double peak = 1.0 / amount;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                out(x, y) = static_cast<double>(rng.poisson(img(x, y) * peak)) / peak;
        break;
    }
    case NoiseKind::Composite:
        throw argument_error("noise_single: composite handled by add_noise");
    }
    return Image::from_grid(std::move(out));
}

} // namespace detail

/// Applies one noise family, or all five in sequence for Composite with the
/// budget split evenly. Every stage clamps back into [0, 1]. A zero amount
/// is the identity for every family.
inline Image add_noise(const Image& img, const NoiseSpec& spec, Rng& rng) {
    if (spec.amount < 0.0 || spec.amount > 1.0)
        throw argument_error("add_noise: amount must lie in [0, 1]");
    if (spec.amount == 0.0) return img;
    if (spec.kind != NoiseKind::Composite) return detail::noise_single(img, spec.kind, spec.amount, rng);

    static constexpr NoiseKind sequence[] = {NoiseKind::Gaussian, NoiseKind::SaltPepper,
                                             NoiseKind::Speckle, NoiseKind::Uniform,
                                             NoiseKind::Poisson};
    Image out = img;
    for (NoiseKind k : sequence) out = detail::noise_single(out, k, spec.amount / 5.0, rng);
    return out;
}

enum class Split { Train, Test };

/// Everything needed to replay one image's degradation: the noise seed is
/// drawn at planning time so application order and thread count cannot
/// change the output.
struct DegradationRecord {
    std::string id;
    Split split = Split::Train;
    bool blurred = false;
    MotionBlurSpec blur;
    bool noised = false;
    NoiseSpec noise;
    std::uint64_t noise_seed = 0;
};

struct BenchmarkManifest {
    DegradationSpec spec;
    std::vector<DegradationRecord> records;  // train block then test block
};

/// Shuffles the ids, takes the first floor(split_fraction * N) as train, and
/// marks the leading floor((1 - natural_fraction) * count) of each split's
/// shuffled order as blurred. Test records draw their blur angle and a fresh
/// noise seed from the rng in record order.
inline BenchmarkManifest plan_benchmark(const std::vector<std::string>& ids,
                                        const DegradationSpec& spec, Rng& rng) {
    if (ids.empty()) throw argument_error("plan_benchmark: empty id list");
    if (spec.natural_fraction < 0.0 || spec.natural_fraction > 1.0 || spec.split_fraction < 0.0 ||
        spec.split_fraction > 1.0)
        throw argument_error("plan_benchmark: fractions must lie in [0, 1]");
    if (spec.test_angles.empty()) throw argument_error("plan_benchmark: empty test angle list");

    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);

    const auto n = ids.size();
    const auto n_train = static_cast<std::size_t>(std::floor(spec.split_fraction * static_cast<double>(n)));

    BenchmarkManifest manifest;
    manifest.spec = spec;
    manifest.records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool is_train = i < n_train;
        const std::size_t split_count = is_train ? n_train : n - n_train;
        const std::size_t split_pos = is_train ? i : i - n_train;
        const auto n_blur = static_cast<std::size_t>(
            std::floor((1.0 - spec.natural_fraction) * static_cast<double>(split_count)));

        DegradationRecord rec;
        rec.id = ids[order[i]];
        rec.split = is_train ? Split::Train : Split::Test;
        rec.blurred = split_pos < n_blur;
        if (rec.blurred) {
            rec.blur = spec.train_blur;
            if (!is_train)
                rec.blur.angle_deg = spec.test_angles[rng.below(spec.test_angles.size())];
        }
        if (!is_train) {
            rec.noised = true;
            rec.noise = spec.test_noise;
            rec.noise_seed = rng.next_u64();
        }
        manifest.records.push_back(std::move(rec));
    }
    return manifest;
}

/// Replays one record on its image: blur, then noise from the recorded seed.
inline Image apply_degradation(const Image& img, const DegradationRecord& rec) {
    Image out = rec.blurred ? motion_blur(img, rec.blur) : img;
    if (rec.noised) {
        Rng noise_rng(rec.noise_seed);
        out = add_noise(out, rec.noise, noise_rng);
    }
    return out;
}

/// In-memory benchmark input: the mask rides along untouched.
struct BenchmarkItem {
    Image image;
    Mask mask;
    std::string id;
};

inline BenchmarkManifest build_benchmark(const std::vector<BenchmarkItem>& items,
                                         const DegradationSpec& spec, Rng& rng) {
    if (items.empty()) throw argument_error("build_benchmark: empty input");
    std::vector<std::string> ids;
    ids.reserve(items.size());
    for (const auto& it : items) {
        if (it.image.width() != it.mask.width() || it.image.height() != it.mask.height())
            throw argument_error("build_benchmark: image and mask dimensions differ");
        ids.push_back(it.id);
    }
    return plan_benchmark(ids, spec, rng);
}

} // namespace istdforge
