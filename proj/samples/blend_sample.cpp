// Builds a synthetic target patch and a smooth background, picks the best
// placement window by structural similarity, and fuses the patch in with the
// gradient-domain blender. Writes the composite PNG into the working
// directory.

#include <cstdio>

#include "istdforge/istdforge.hpp"

using namespace istdforge;

int main() {
    Rng rng(11);

    // Background: a soft horizontal ramp with mild texture.
    const int bw = 160, bh = 120;
    Grid bg_grid(bw, bh);
    for (int y = 0; y < bh; ++y)
        for (int x = 0; x < bw; ++x)
            bg_grid(x, y) = 0.25 + 0.3 * x / (bw - 1.0) + rng.uniform(-0.02, 0.02);
    const Image background = Image::from_grid(std::move(bg_grid));

    // Target patch: a bright 3x3 core on a darker plate, mask marking the core.
    const int pw = 17, ph = 17;
    Grid patch_grid(pw, ph, 0.3);
    Mask patch_mask(pw, ph);
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            patch_grid(pw / 2 + dx, ph / 2 + dy) = 0.9;
            patch_mask.set(pw / 2 + dx, ph / 2 + dy, true);
        }
    }
    TargetPatch target;
    target.pixels = Image::from_grid(std::move(patch_grid));
    target.mask = std::move(patch_mask);
    target.origin = Rect{0, 0, pw, ph};
    target.source_id = "synthetic";

    const MatchResult match = find_best_window(target.pixels, background);
    std::printf("placement: (%d, %d), similarity %.4f\n", match.pos.x, match.pos.y, match.score);

    const Image composite = poisson_blend(target, background, match.pos);
    save_image(composite, "blend_composite.png");
    std::printf("wrote blend_composite.png\n");
    return 0;
}
