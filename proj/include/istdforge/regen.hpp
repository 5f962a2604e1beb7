#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "istdforge/harvest.hpp"
#include "istdforge/image.hpp"
#include "istdforge/rng.hpp"

namespace istdforge {

/// Structural-similarity constants on unit dynamic range, plus the window
/// search stride. SSIM here is a single window over the whole patch with
/// population statistics; the patches being matched are small.
struct SsimParams {
    double c1 = 0.01 * 0.01;
    double c2 = 0.03 * 0.03;
    int stride = 8;
};

/// Best placement found for one target patch in one background.
struct MatchResult {
    int target_index = -1;
    int background_index = -1;
    Rect pos;
    double score = -1.0;
};

struct RegenConfig {
    double ssim_threshold = 0.5;  // candidates below this never place
    int top_k = 10;               // pool shuffled before the usage gate
    int max_usage = 3;            // placements allowed per target patch
    double solver_tol = 1e-5;     // relative residual for the blend solver
    int solver_max_iter = 10000;
};

/// Single-window SSIM with population statistics. Identical inputs score
/// exactly 1; anti-correlated structure pulls the score down.
inline double ssim(const Image& a, const Image& b, const SsimParams& p = {}) {
    if (!a.same_dims(b)) throw argument_error("ssim: image dimensions differ");
    const std::size_t n = a.size();
    const double* pa = a.grid().data();
    const double* pb = b.grid().data();

    double sum_a = 0.0, sum_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum_a += pa[i];
        sum_b += pb[i];
    }
    const double mu_a = sum_a / static_cast<double>(n);
    const double mu_b = sum_b / static_cast<double>(n);

    double var_a = 0.0, var_b = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = pa[i] - mu_a;
        const double db = pb[i] - mu_b;
        var_a += da * da;
        var_b += db * db;
        cov += da * db;
    }
    var_a /= static_cast<double>(n);
    var_b /= static_cast<double>(n);
    cov /= static_cast<double>(n);

    const double num = (2.0 * mu_a * mu_b + p.c1) * (2.0 * cov + p.c2);
    const double den = (mu_a * mu_a + mu_b * mu_b + p.c1) * (var_a + var_b + p.c2);
    return num / den;
}

namespace detail {

/// Stride-aligned origins along one axis plus the end-aligned origin, sorted.
inline std::vector<int> window_origins(int extent, int window, int stride) {
    std::vector<int> xs;
    for (int x = 0; x + window <= extent; x += stride) xs.push_back(x);
    if (xs.empty() || xs.back() != extent - window) xs.push_back(extent - window);
    return xs;
}

} // namespace detail

/// Scans the background at the configured stride (plus right/bottom-aligned
/// windows) and returns the highest-SSIM placement for the patch. Ties go to
/// the smallest (y, x) origin.
inline MatchResult find_best_window(const Image& patch, const Image& background,
                                    const SsimParams& p = {}) {
    if (patch.width() >= background.width() || patch.height() >= background.height())
        throw argument_error("find_best_window: background must be strictly larger than the patch");
    if (p.stride < 1) throw argument_error("find_best_window: stride must be >= 1");

    const auto xs = detail::window_origins(background.width(), patch.width(), p.stride);
    const auto ys = detail::window_origins(background.height(), patch.height(), p.stride);

    MatchResult best;
    for (int y : ys) {
        for (int x : xs) {
            const Rect r{x, y, patch.width(), patch.height()};
            const double score = ssim(patch, background.crop(r), p);
            if (score > best.score) {
                best.score = score;
                best.pos = r;
            }
        }
    }
    return best;
}

/// Walks the backgrounds in order and gives each one at most one target:
/// score every target, keep those at or above the SSIM threshold, sort by
/// score (ties to the smaller target index), shuffle the top_k pool, then
/// place the first target still under max_usage. Mutates usage counts.
/// Deterministic for a fixed seed.
inline std::vector<MatchResult> assign_targets(std::vector<TargetPatch>& targets,
                                               const std::vector<Image>& backgrounds,
                                               const RegenConfig& cfg, const SsimParams& p,
                                               Rng& rng) {
    if (targets.empty() || backgrounds.empty())
        throw argument_error("assign_targets: targets and backgrounds must be non-empty");

    std::vector<MatchResult> results;
    for (int n = 0; n < static_cast<int>(backgrounds.size()); ++n) {
        std::vector<MatchResult> candidates;
        for (int m = 0; m < static_cast<int>(targets.size()); ++m) {
            MatchResult r = find_best_window(targets[static_cast<std::size_t>(m)].pixels,
                                             backgrounds[static_cast<std::size_t>(n)], p);
            r.target_index = m;
            r.background_index = n;
            if (r.score >= cfg.ssim_threshold) candidates.push_back(r);
        }
        std::sort(candidates.begin(), candidates.end(), [](const MatchResult& a, const MatchResult& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.target_index < b.target_index;
        });
        if (static_cast<int>(candidates.size()) > cfg.top_k) candidates.resize(static_cast<std::size_t>(cfg.top_k));
        rng.shuffle(candidates);

        for (const MatchResult& c : candidates) {
            TargetPatch& t = targets[static_cast<std::size_t>(c.target_index)];
            if (t.usage_count < cfg.max_usage) {
                ++t.usage_count;
                results.push_back(c);
                break;
            }
        }
    }
    return results;
}

namespace detail {

/// 5-point Dirichlet Laplacian applied to the interior unknowns of a
/// (iw+2) x (ih+2) window. Boundary contributions live on the RHS.
inline void apply_poisson_operator(const std::vector<double>& u, std::vector<double>& out,
                                   int iw, int ih) {
    for (int y = 0; y < ih; ++y) {
        for (int x = 0; x < iw; ++x) {
            const std::size_t k = static_cast<std::size_t>(y) * iw + x;
            double v = 4.0 * u[k];
            if (x > 0) v -= u[k - 1];
            if (x < iw - 1) v -= u[k + 1];
            if (y > 0) v -= u[k - static_cast<std::size_t>(iw)];
            if (y < ih - 1) v -= u[k + static_cast<std::size_t>(iw)];
            out[k] = v;
        }
    }
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace detail

/// Gradient-domain compositing: the patch's pixels are re-solved inside the
/// window so their Laplacian matches the patch while the 1-px window ring
/// (and everything outside it) stays bit-identical to the background.
/// Conjugate gradient on the SPD 5-point system; the patch itself seeds the
/// iteration, so a patch that already satisfies the system returns at once.
inline Image poisson_blend(const TargetPatch& patch, const Image& background, const Rect& pos,
                           const RegenConfig& cfg = {}) {
    if (!pos.inside(background.width(), background.height()))
        throw argument_error("poisson_blend: window outside background");
    if (pos.w != patch.pixels.width() || pos.h != patch.pixels.height())
        throw argument_error("poisson_blend: window does not match patch dimensions");
    const int iw = pos.w - 2;
    const int ih = pos.h - 2;
    if (iw < 1 || ih < 1)
        throw argument_error("poisson_blend: window has no interior");

    const Image& src = patch.pixels;
    const std::size_t n = static_cast<std::size_t>(iw) * static_cast<std::size_t>(ih);

    // RHS: guidance Laplacian of the patch plus the Dirichlet ring values.
    std::vector<double> b(n), u(n);
    for (int y = 0; y < ih; ++y) {
        for (int x = 0; x < iw; ++x) {
            const int px = x + 1;  // window-local coords of this unknown
            const int py = y + 1;
            double rhs = 4.0 * src(px, py) - src(px - 1, py) - src(px + 1, py) -
                         src(px, py - 1) - src(px, py + 1);
            if (px == 1) rhs += background(pos.x, pos.y + py);
            if (px == pos.w - 2) rhs += background(pos.x + pos.w - 1, pos.y + py);
            if (py == 1) rhs += background(pos.x + px, pos.y);
            if (py == pos.h - 2) rhs += background(pos.x + px, pos.y + pos.h - 1);
            b[static_cast<std::size_t>(y) * iw + x] = rhs;
            u[static_cast<std::size_t>(y) * iw + x] = src(px, py);
        }
    }

    const double b_norm = std::sqrt(detail::dot(b, b));
    const double denom = b_norm > 0.0 ? b_norm : 1.0;

    std::vector<double> r(n), q(n), d(n);
    detail::apply_poisson_operator(u, q, iw, ih);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    double rr = detail::dot(r, r);
    double rel = std::sqrt(rr) / denom;

    if (rel > cfg.solver_tol) {
        d = r;
        int it = 0;
        for (; it < cfg.solver_max_iter; ++it) {
            detail::apply_poisson_operator(d, q, iw, ih);
            const double alpha = rr / detail::dot(d, q);
            for (std::size_t i = 0; i < n; ++i) {
                u[i] += alpha * d[i];
                r[i] -= alpha * q[i];
            }
            const double rr_next = detail::dot(r, r);
            rel = std::sqrt(rr_next) / denom;
            if (rel <= cfg.solver_tol) break;
            const double beta = rr_next / rr;
            for (std::size_t i = 0; i < n; ++i) d[i] = r[i] + beta * d[i];
            rr = rr_next;
        }
        if (rel > cfg.solver_tol)
            throw convergence_error("poisson_blend: solver hit max iterations", rel);
    }

    Grid out = background.grid();
    for (int y = 0; y < ih; ++y)
        for (int x = 0; x < iw; ++x)
            out(pos.x + x + 1, pos.y + y + 1) = u[static_cast<std::size_t>(y) * iw + x];
    return Image::from_grid(std::move(out));
}

/// Assignment followed by blending: one composite image per placed target,
/// paired with a label mask carrying the patch's target bits at the placement.
inline std::vector<std::pair<Image, Mask>> regenerate(std::vector<TargetPatch>& targets,
                                                      const std::vector<Image>& backgrounds,
                                                      const RegenConfig& cfg, const SsimParams& p,
                                                      Rng& rng) {
    const auto matches = assign_targets(targets, backgrounds, cfg, p, rng);
    std::vector<std::pair<Image, Mask>> out;
    out.reserve(matches.size());
    for (const MatchResult& m : matches) {
        const TargetPatch& t = targets[static_cast<std::size_t>(m.target_index)];
        const Image& bg = backgrounds[static_cast<std::size_t>(m.background_index)];
        Image composite = poisson_blend(t, bg, m.pos, cfg);
        Mask label(bg.width(), bg.height());
        for (int y = 0; y < m.pos.h; ++y)
            for (int x = 0; x < m.pos.w; ++x)
                if (t.mask(x, y)) label.set(m.pos.x + x, m.pos.y + y, true);
        out.emplace_back(std::move(composite), std::move(label));
    }
    return out;
}

} // namespace istdforge
