#pragma once

#include <cmath>
#include <vector>

#include "istdforge/grid.hpp"
#include "istdforge/image.hpp"

namespace istdforge {

/// Floor/ceiling applied to predicted probabilities before the logs.
inline constexpr double kProbEpsilon = 1e-8;

/// Mean binary cross-entropy between a probability grid and a binary mask.
/// Predictions are clipped to [eps, 1 - eps], so exact 0/1 inputs are safe.
inline double bce(const Grid& pred, const Mask& truth, double eps = kProbEpsilon) {
    if (pred.width() != truth.width() || pred.height() != truth.height())
        throw argument_error("bce: prediction and truth dimensions differ");
    double sum = 0.0;
    for (int y = 0; y < pred.height(); ++y) {
        for (int x = 0; x < pred.width(); ++x) {
            const double p = std::min(std::max(pred(x, y), eps), 1.0 - eps);
            sum += truth(x, y) ? -std::log(p) : -std::log(1.0 - p);
        }
    }
    return sum / static_cast<double>(pred.size());
}

/// One decoder scale: a prediction, its matching truth, and its weight.
struct ScaleItem {
    Grid pred;
    Mask truth;
    double weight = 1.0;
};

using ScaleSet = std::vector<ScaleItem>;

/// Weighted sum of per-scale BCE terms. Linear in the weights.
inline double multiscale_bce(const ScaleSet& scales) {
    if (scales.empty()) throw argument_error("multiscale_bce: empty scale set");
    double total = 0.0;
    for (const ScaleItem& s : scales) {
        if (!std::isfinite(s.weight) || s.weight < 0.0)
            throw argument_error("multiscale_bce: weights must be finite and non-negative");
        total += s.weight * bce(s.pred, s.truth);
    }
    return total;
}

/// Two feature grids whose agreement is being scored.
struct FeaturePair {
    Grid clean;
    Grid noisy;
};

/// Mean squared difference over all elements; symmetric in the pair.
inline double feature_mse(const FeaturePair& pair) {
    if (!pair.clean.same_dims(pair.noisy))
        throw argument_error("feature_mse: grid dimensions differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < pair.clean.size(); ++i) {
        const double d = pair.clean.data()[i] - pair.noisy.data()[i];
        sum += d * d;
    }
    return sum / static_cast<double>(pair.clean.size());
}

inline double total_loss(double bce_val, double mse_val) { return bce_val + mse_val; }

} // namespace istdforge
