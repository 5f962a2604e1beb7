#include "commands.hpp"

#include <cinttypes>
#include <cstdio>
#include <set>

namespace istdforge::cli {

namespace {

/// Stems present in every index, sorted; everything else goes to `unmatched`
/// as "dir_label/stem" lines.
std::vector<std::string> common_stems(
    const std::vector<std::pair<std::string, std::map<std::string, fs::path>>>& indexed,
    std::vector<std::string>& unmatched) {
    std::set<std::string> common;
    for (const auto& [stem, path] : indexed.front().second) common.insert(stem);
    for (std::size_t i = 1; i < indexed.size(); ++i) {
        std::set<std::string> keep;
        for (const auto& [stem, path] : indexed[i].second)
            if (common.count(stem)) keep.insert(stem);
        common.swap(keep);
    }
    for (const auto& [label, index] : indexed)
        for (const auto& [stem, path] : index)
            if (!common.count(stem)) unmatched.push_back(label + "/" + stem);
    for (const auto& entry : unmatched)
        std::fprintf(stderr, "warning: unmatched file excluded: %s\n", entry.c_str());
    return {common.begin(), common.end()};
}

} // namespace

int run_wmf(const fs::path& in_dir, const fs::path& out_dir, const RunContext& ctx) {
    const auto files = list_images(in_dir);
    if (files.empty()) {
        std::fprintf(stderr, "error: no images found in %s\n", in_dir.string().c_str());
        return 1;
    }
    ensure_dir(out_dir);

    const std::size_t n = files.size();
    std::vector<std::string> stems(n), errors(n), outputs(n);
    for (std::size_t i = 0; i < n; ++i) stems[i] = files[i].stem().string();

    parallel_for(n, ctx.jobs, [&](std::size_t i) {
        try {
            const Image img = load_image(files[i].string());
            const fs::path out_path = out_dir / files[i].filename();
            save_image(wmf_denoise(img, ctx.cfg.wmf), out_path.string());
            outputs[i] = out_path.filename().generic_string();
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    ordered_json params;
    params["epsilon"] = ctx.cfg.wmf.epsilon;
    params["family"] = "haar";
    ordered_json inputs;
    inputs["in_dir"] = in_dir.generic_string();
    ordered_json m = manifest_header("wmf", ctx.seed, ctx.jobs, params, inputs);

    ordered_json records = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i].empty()) continue;
        ordered_json rec;
        rec["input"] = files[i].filename().generic_string();
        rec["output"] = outputs[i];
        records.push_back(std::move(rec));
    }
    m["records"] = std::move(records);

    const auto failures = gather_failures(errors, stems);
    write_manifest(std::move(m), failures, out_dir / "wmf_manifest.json");
    return failures.empty() ? 0 : 1;
}

int run_brd(const fs::path& in_dir, const fs::path& out_dir, const RunContext& ctx) {
    const auto files = list_images(in_dir);
    if (files.empty()) {
        std::fprintf(stderr, "error: no images found in %s\n", in_dir.string().c_str());
        return 1;
    }
    ensure_dir(out_dir / "crops");
    ensure_dir(out_dir / "heatmaps");
    ensure_dir(out_dir / "upsampled");

    const std::size_t n = files.size();
    std::vector<std::string> stems(n), errors(n);
    std::vector<ordered_json> records(n);
    for (std::size_t i = 0; i < n; ++i) stems[i] = files[i].stem().string();

    const Rng root(ctx.seed);
    parallel_for(n, ctx.jobs, [&](std::size_t i) {
        try {
            const Image img = load_image(files[i].string());
            Rng item_rng = root.split(static_cast<std::uint64_t>(i));
            const BrdResult res =
                detect_background(img, ctx.cfg.brd, ctx.cfg.wmf, ctx.cfg.grid, &item_rng);

            const std::string name = stems[i] + ".png";
            save_image(res.crop, (out_dir / "crops" / name).string());
            save_image(score_heatmap(res.map), (out_dir / "heatmaps" / name).string());
            save_image(upsample_background(res.crop, img.width(), img.height()),
                       (out_dir / "upsampled" / name).string());

            ordered_json rec;
            rec["input"] = files[i].filename().generic_string();
            rec["origin"] = rect_json(res.origin);
            rec["crop"] = "crops/" + name;
            rec["heatmap"] = "heatmaps/" + name;
            rec["upsampled"] = "upsampled/" + name;
            ordered_json scores = ordered_json::array();
            for (int by = 0; by < res.map.scores.height(); ++by) {
                ordered_json row = ordered_json::array();
                for (int bx = 0; bx < res.map.scores.width(); ++bx)
                    row.push_back(res.map.scores(bx, by));
                scores.push_back(std::move(row));
            }
            rec["block_scores"] = std::move(scores);
            records[i] = std::move(rec);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    ordered_json params;
    params["block_size"] = ctx.cfg.grid.block_size;
    params["crop_size"] = ctx.cfg.brd.crop_size;
    params["policy"] = ctx.cfg.brd.policy == CropPolicy::ArgMin ? "argmin" : "random";
    params["use_wmf"] = ctx.cfg.brd.use_wmf;
    params["wmf_epsilon"] = ctx.cfg.wmf.epsilon;
    ordered_json inputs;
    inputs["in_dir"] = in_dir.generic_string();
    ordered_json m = manifest_header("brd", ctx.seed, ctx.jobs, params, inputs);

    ordered_json recs = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i)
        if (errors[i].empty()) recs.push_back(std::move(records[i]));
    m["records"] = std::move(recs);

    const auto failures = gather_failures(errors, stems);
    write_manifest(std::move(m), failures, out_dir / "brd_manifest.json");
    return failures.empty() ? 0 : 1;
}

int run_harvest(const fs::path& pred_dir, const fs::path& truth_dir, const fs::path& image_dir,
                const fs::path& out_dir, const RunContext& ctx) {
    std::vector<std::string> unmatched;
    const auto pred_index = stem_index(list_images(pred_dir));
    const auto truth_index = stem_index(list_images(truth_dir));
    const auto image_index = stem_index(list_images(image_dir));
    const auto stems = common_stems(
        {{"pred", pred_index}, {"truth", truth_index}, {"images", image_index}}, unmatched);
    if (stems.empty()) {
        std::fprintf(stderr, "error: no matching prediction/truth/image triples\n");
        return 1;
    }
    ensure_dir(out_dir / "patches");
    ensure_dir(out_dir / "masks");

    const std::size_t n = stems.size();
    std::vector<std::string> errors(n);
    std::vector<ordered_json> records(n);
    std::vector<char> selected(n, 0);

    parallel_for(n, ctx.jobs, [&](std::size_t i) {
        try {
            PredictionPair pair;
            pair.pred = load_mask(pred_index.at(stems[i]).string());
            pair.truth = load_mask(truth_index.at(stems[i]).string());
            pair.image = load_image(image_index.at(stems[i]).string());
            pair.id = stems[i];
            if (!pair.dims_consistent())
                throw argument_error("prediction, truth, and image dimensions differ");

            const auto hard = select_hard({pair}, ctx.cfg.harvest);
            if (hard.empty()) return;
            selected[i] = 1;

            ordered_json rec;
            rec["id"] = stems[i];
            rec["pixacc"] = pixel_accuracy(pair.pred, pair.truth);
            rec["iou"] = iou(pair.pred, pair.truth);
            ordered_json targets = ordered_json::array();
            const auto patches = extract_targets(pair, ctx.cfg.harvest);
            for (std::size_t k = 0; k < patches.size(); ++k) {
                const std::string name = stems[i] + "_t" + std::to_string(k) + ".png";
                save_image(patches[k].pixels, (out_dir / "patches" / name).string());
                save_mask(patches[k].mask, (out_dir / "masks" / name).string());
                ordered_json t;
                t["patch"] = "patches/" + name;
                t["mask"] = "masks/" + name;
                t["window"] = rect_json(patches[k].origin);
                targets.push_back(std::move(t));
            }
            rec["targets"] = std::move(targets);
            records[i] = std::move(rec);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    ordered_json params;
    params["pixacc_threshold"] = ctx.cfg.harvest.pixacc_threshold;
    params["iou_threshold"] = ctx.cfg.harvest.iou_threshold;
    params["patch_pad"] = ctx.cfg.harvest.patch_pad;
    ordered_json inputs;
    inputs["pred_dir"] = pred_dir.generic_string();
    inputs["truth_dir"] = truth_dir.generic_string();
    inputs["image_dir"] = image_dir.generic_string();
    ordered_json m = manifest_header("harvest", ctx.seed, ctx.jobs, params, inputs);

    ordered_json recs = ordered_json::array();
    std::size_t kept = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i].empty() && selected[i]) {
            recs.push_back(std::move(records[i]));
            ++kept;
        }
    }
    m["examined"] = n;
    m["selected"] = kept;
    m["unmatched"] = unmatched;
    m["records"] = std::move(recs);

    const auto failures = gather_failures(errors, stems);
    write_manifest(std::move(m), failures, out_dir / "harvest_manifest.json");
    return failures.empty() ? 0 : 1;
}

int run_regen(const fs::path& target_dir, const fs::path& background_dir, const fs::path& out_dir,
              const RunContext& ctx) {
    std::vector<std::string> unmatched;
    const auto patch_index = stem_index(list_images(target_dir / "patches"));
    const auto mask_index = stem_index(list_images(target_dir / "masks"));
    const auto target_stems =
        common_stems({{"patches", patch_index}, {"masks", mask_index}}, unmatched);
    if (target_stems.empty()) {
        std::fprintf(stderr, "error: no patch/mask pairs under %s\n", target_dir.string().c_str());
        return 1;
    }
    const auto bg_files = list_images(background_dir);
    if (bg_files.empty()) {
        std::fprintf(stderr, "error: no backgrounds in %s\n", background_dir.string().c_str());
        return 1;
    }

    std::vector<TargetPatch> targets;
    targets.reserve(target_stems.size());
    for (const auto& stem : target_stems) {
        TargetPatch t;
        t.pixels = load_image(patch_index.at(stem).string());
        t.mask = load_mask(mask_index.at(stem).string());
        if (t.pixels.width() != t.mask.width() || t.pixels.height() != t.mask.height())
            throw argument_error("patch and mask dimensions differ for " + stem);
        t.origin = Rect{0, 0, t.pixels.width(), t.pixels.height()};
        t.source_id = stem;
        targets.push_back(std::move(t));
    }
    std::vector<Image> backgrounds;
    std::vector<std::string> bg_stems;
    backgrounds.reserve(bg_files.size());
    for (const auto& f : bg_files) {
        backgrounds.push_back(load_image(f.string()));
        bg_stems.push_back(f.stem().string());
    }

    Rng rng(ctx.seed);
    std::vector<MatchResult> matches;
    try {
        matches = assign_targets(targets, backgrounds, ctx.cfg.regen, ctx.cfg.ssim, rng);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }

    ensure_dir(out_dir / "composites");
    ensure_dir(out_dir / "masks");

    const std::size_t n = matches.size();
    std::vector<std::string> errors(n), names(n);
    std::vector<ordered_json> records(n);
    parallel_for(n, ctx.jobs, [&](std::size_t i) {
        try {
            const MatchResult& match = matches[i];
            const TargetPatch& t = targets[static_cast<std::size_t>(match.target_index)];
            const Image& bg = backgrounds[static_cast<std::size_t>(match.background_index)];
            const std::string name =
                bg_stems[static_cast<std::size_t>(match.background_index)] + "__" + t.source_id + ".png";
            names[i] = name;

            const Image composite = poisson_blend(t, bg, match.pos, ctx.cfg.regen);
            Mask label(bg.width(), bg.height());
            for (int y = 0; y < match.pos.h; ++y)
                for (int x = 0; x < match.pos.w; ++x)
                    if (t.mask(x, y)) label.set(match.pos.x + x, match.pos.y + y, true);

            save_image(composite, (out_dir / "composites" / name).string());
            save_mask(label, (out_dir / "masks" / name).string());

            ordered_json rec;
            rec["background"] = bg_stems[static_cast<std::size_t>(match.background_index)];
            rec["target"] = t.source_id;
            rec["window"] = rect_json(match.pos);
            rec["score"] = match.score;
            rec["composite"] = "composites/" + name;
            rec["mask"] = "masks/" + name;
            records[i] = std::move(rec);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    ordered_json params;
    params["ssim_threshold"] = ctx.cfg.regen.ssim_threshold;
    params["top_k"] = ctx.cfg.regen.top_k;
    params["max_usage"] = ctx.cfg.regen.max_usage;
    params["solver_tol"] = ctx.cfg.regen.solver_tol;
    params["solver_max_iter"] = ctx.cfg.regen.solver_max_iter;
    params["stride"] = ctx.cfg.ssim.stride;
    ordered_json inputs;
    inputs["target_dir"] = target_dir.generic_string();
    inputs["background_dir"] = background_dir.generic_string();
    ordered_json m = manifest_header("regen", ctx.seed, ctx.jobs, params, inputs);

    ordered_json recs = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i)
        if (errors[i].empty()) recs.push_back(std::move(records[i]));
    m["targets_available"] = targets.size();
    m["backgrounds_available"] = backgrounds.size();
    m["unmatched"] = unmatched;
    m["records"] = std::move(recs);

    const auto failures = gather_failures(errors, names);
    write_manifest(std::move(m), failures, out_dir / "regen_manifest.json");
    return failures.empty() ? 0 : 1;
}

int run_noise_build(const fs::path& in_dir, const fs::path& out_dir, const RunContext& ctx) {
    const auto files = list_images(in_dir);
    if (files.empty()) {
        std::fprintf(stderr, "error: no images found in %s\n", in_dir.string().c_str());
        return 1;
    }

    const std::size_t n = files.size();
    std::vector<std::string> stems(n), errors(n);
    std::vector<char> accepted(n, 0);
    std::vector<Rect> windows(n);
    std::vector<double> sigmas(n), mus(n);
    std::vector<Image> patches(n);
    for (std::size_t i = 0; i < n; ++i) stems[i] = files[i].stem().string();

    parallel_for(n, ctx.jobs, [&](std::size_t i) {
        try {
            const Image img = load_image(files[i].string());
            Rect window;
            double sigma = 0.0, mu = 0.0;
            if (!find_noise_window(img, ctx.cfg.noise, window, sigma, mu)) return;
            accepted[i] = 1;
            windows[i] = window;
            sigmas[i] = sigma;
            mus[i] = mu;
            patches[i] = resize_bilinear(img.crop(window), img.width(), img.height());
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    const bool any = std::any_of(accepted.begin(), accepted.end(), [](char c) { return c != 0; });
    if (!any) {
        std::fprintf(stderr, "error: no qualifying noise window in any image\n");
        return 1;
    }
    ensure_dir(out_dir / "library");

    ordered_json records = ordered_json::array();
    std::vector<std::string> skipped;
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i].empty()) continue;
        if (!accepted[i]) {
            skipped.push_back(stems[i]);
            continue;
        }
        const std::string name = stems[i] + ".png";
        save_image(patches[i], (out_dir / "library" / name).string());
        ordered_json rec;
        rec["source"] = files[i].filename().generic_string();
        rec["patch"] = "library/" + name;
        rec["window"] = rect_json(windows[i]);
        rec["sigma"] = sigmas[i];
        rec["mu"] = mus[i];
        records.push_back(std::move(rec));
    }

    ordered_json params;
    params["window_w"] = ctx.cfg.noise.window_w;
    params["window_h"] = ctx.cfg.noise.window_h;
    params["stride"] = ctx.cfg.noise.stride;
    params["sigma_max"] = ctx.cfg.noise.sigma_max;
    params["mu_min"] = ctx.cfg.noise.mu_min;
    ordered_json inputs;
    inputs["in_dir"] = in_dir.generic_string();
    ordered_json m = manifest_header("noise build", ctx.seed, ctx.jobs, params, inputs);
    m["skipped"] = skipped;
    m["records"] = std::move(records);

    const auto failures = gather_failures(errors, stems);
    write_manifest(std::move(m), failures, out_dir / "library.json");
    return failures.empty() ? 0 : 1;
}

int run_noise_mix(const fs::path& in_dir, const fs::path& library_dir, const fs::path& out_dir,
                  const RunContext& ctx) {
    const auto files = list_images(in_dir);
    if (files.empty()) {
        std::fprintf(stderr, "error: no images found in %s\n", in_dir.string().c_str());
        return 1;
    }

    // Prefer the library manifest; fall back to scanning library/ directly.
    NoiseLibrary lib;
    const fs::path manifest_path = library_dir / "library.json";
    if (fs::is_regular_file(manifest_path)) {
        std::ifstream in(manifest_path);
        const ordered_json j = ordered_json::parse(in);
        for (const auto& rec : j.at("records")) {
            NoisePatch p;
            p.pixels = load_image((library_dir / rec.at("patch").get<std::string>()).string());
            p.source_id = rec.at("source").get<std::string>();
            const auto& w = rec.at("window");
            p.window = Rect{w.at("x").get<int>(), w.at("y").get<int>(), w.at("w").get<int>(),
                            w.at("h").get<int>()};
            p.sigma = rec.at("sigma").get<double>();
            p.mu = rec.at("mu").get<double>();
            lib.patches.push_back(std::move(p));
        }
    } else {
        const fs::path patch_dir = fs::is_directory(library_dir / "library") ? library_dir / "library"
                                                                             : library_dir;
        for (const auto& f : list_images(patch_dir)) {
            NoisePatch p;
            p.pixels = load_image(f.string());
            p.source_id = f.stem().string();
            p.window = Rect{0, 0, p.pixels.width(), p.pixels.height()};
            lib.patches.push_back(std::move(p));
        }
    }
    if (lib.patches.empty()) {
        std::fprintf(stderr, "error: noise library is empty: %s\n", library_dir.string().c_str());
        return 1;
    }
    ensure_dir(out_dir / "mixed");

    const std::size_t n = files.size();
    std::vector<std::string> stems(n), errors(n);
    std::vector<ordered_json> records(n);
    for (std::size_t i = 0; i < n; ++i) stems[i] = files[i].stem().string();

    const Rng root(ctx.seed);
    parallel_for(n, ctx.jobs, [&](std::size_t i) {
        try {
            const Image img = load_image(files[i].string());
            Rng item_rng = root.split(static_cast<std::uint64_t>(i));
            const MixResult res = mix_noise(img, lib, ctx.cfg.mix, item_rng);
            const std::string name = stems[i] + ".png";
            save_image(res.image, (out_dir / "mixed" / name).string());

            ordered_json rec;
            rec["input"] = files[i].filename().generic_string();
            rec["output"] = "mixed/" + name;
            rec["patch_index"] = res.patch_index;
            rec["patch_source"] = lib.patches[static_cast<std::size_t>(res.patch_index)].source_id;
            rec["lambda"] = res.lambda_used;
            records[i] = std::move(rec);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    ordered_json params;
    params["policy"] = ctx.cfg.mix.policy == MixPolicy::Fixed ? "fixed" : "uniform";
    params["lambda"] = ctx.cfg.mix.lambda;
    ordered_json inputs;
    inputs["in_dir"] = in_dir.generic_string();
    inputs["library_dir"] = library_dir.generic_string();
    ordered_json m = manifest_header("noise mix", ctx.seed, ctx.jobs, params, inputs);
    m["library_size"] = lib.patches.size();

    ordered_json recs = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i)
        if (errors[i].empty()) recs.push_back(std::move(records[i]));
    m["records"] = std::move(recs);

    const auto failures = gather_failures(errors, stems);
    write_manifest(std::move(m), failures, out_dir / "mix_manifest.json");
    return failures.empty() ? 0 : 1;
}

int run_degrade(const fs::path& image_dir, const fs::path& mask_dir, const fs::path& out_dir,
                const RunContext& ctx) {
    std::vector<std::string> unmatched;
    const auto image_index = stem_index(list_images(image_dir));
    const auto mask_index = stem_index(list_images(mask_dir));
    const auto stems = common_stems({{"images", image_index}, {"masks", mask_index}}, unmatched);
    if (stems.empty()) {
        std::fprintf(stderr, "error: no matching image/mask pairs\n");
        return 1;
    }

    DegradationSpec spec = ctx.cfg.degrade;
    spec.seed = ctx.seed;
    Rng rng(ctx.seed);
    const BenchmarkManifest plan = plan_benchmark(stems, spec, rng);

    for (const char* split : {"train", "test"}) {
        ensure_dir(out_dir / split / "images");
        ensure_dir(out_dir / split / "masks");
    }

    const std::size_t n = plan.records.size();
    std::vector<std::string> ids(n), errors(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = plan.records[i].id;

    parallel_for(n, ctx.jobs, [&](std::size_t i) {
        try {
            const DegradationRecord& rec = plan.records[i];
            const char* split = rec.split == Split::Train ? "train" : "test";
            const Image degraded = apply_degradation(load_image(image_index.at(rec.id).string()), rec);
            save_image(degraded, (out_dir / split / "images" / (rec.id + ".png")).string());
            save_mask(load_mask(mask_index.at(rec.id).string()),
                      (out_dir / split / "masks" / (rec.id + ".png")).string());
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    ordered_json params;
    params["natural_fraction"] = spec.natural_fraction;
    params["split_fraction"] = spec.split_fraction;
    ordered_json blur;
    blur["length"] = spec.train_blur.length;
    blur["angle_deg"] = spec.train_blur.angle_deg;
    params["train_blur"] = std::move(blur);
    params["test_angles"] = spec.test_angles;
    ordered_json tn;
    tn["kind"] = noise_kind_name(spec.test_noise.kind);
    tn["amount"] = spec.test_noise.amount;
    params["test_noise"] = std::move(tn);
    ordered_json inputs;
    inputs["image_dir"] = image_dir.generic_string();
    inputs["mask_dir"] = mask_dir.generic_string();
    ordered_json m = manifest_header("degrade", ctx.seed, ctx.jobs, params, inputs);

    ordered_json records = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i].empty()) continue;
        const DegradationRecord& rec = plan.records[i];
        const std::string split = rec.split == Split::Train ? "train" : "test";
        ordered_json r;
        r["id"] = rec.id;
        r["split"] = split;
        if (rec.blurred) {
            ordered_json b;
            b["length"] = rec.blur.length;
            b["angle_deg"] = rec.blur.angle_deg;
            r["blur"] = std::move(b);
        } else {
            r["blur"] = nullptr;
        }
        if (rec.noised) {
            ordered_json nz;
            nz["kind"] = noise_kind_name(rec.noise.kind);
            nz["amount"] = rec.noise.amount;
            nz["seed"] = rec.noise_seed;
            r["noise"] = std::move(nz);
        } else {
            r["noise"] = nullptr;
        }
        r["image"] = split + "/images/" + rec.id + ".png";
        r["mask"] = split + "/masks/" + rec.id + ".png";
        records.push_back(std::move(r));
    }
    m["unmatched"] = unmatched;
    m["records"] = std::move(records);

    const auto failures = gather_failures(errors, ids);
    write_manifest(std::move(m), failures, out_dir / "benchmark.json");
    return failures.empty() ? 0 : 1;
}

int run_eval(const fs::path& pred_dir, const fs::path& truth_dir, const fs::path& report_path,
             bool with_losses, const RunContext& ctx) {
    std::vector<std::string> unmatched;
    const auto pred_index = stem_index(list_images(pred_dir));
    const auto truth_index = stem_index(list_images(truth_dir));
    const auto stems = common_stems({{"pred", pred_index}, {"truth", truth_index}}, unmatched);
    if (stems.empty()) {
        std::fprintf(stderr, "error: no matching prediction/truth pairs\n");
        return 1;
    }

    const std::size_t n = stems.size();
    std::vector<std::string> errors(n);
    std::vector<std::pair<Mask, Mask>> slots(n);
    std::vector<double> bce_vals(n), mse_vals(n);

    parallel_for(n, ctx.jobs, [&](std::size_t i) {
        try {
            Mask pred = load_mask(pred_index.at(stems[i]).string());
            Mask truth = load_mask(truth_index.at(stems[i]).string());
            if (!pred.same_dims(truth)) throw argument_error("prediction and truth dimensions differ");
            if (with_losses) {
                // The prediction files double as soft probability grids here.
                const Image soft = load_image(pred_index.at(stems[i]).string());
                bce_vals[i] = bce(soft.grid(), truth);
                Grid truth_grid(truth.width(), truth.height());
                for (int y = 0; y < truth.height(); ++y)
                    for (int x = 0; x < truth.width(); ++x) truth_grid(x, y) = truth(x, y) ? 1.0 : 0.0;
                mse_vals[i] = feature_mse(FeaturePair{soft.grid(), std::move(truth_grid)});
            }
            slots[i] = {std::move(pred), std::move(truth)};
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    std::vector<std::pair<Mask, Mask>> pairs;
    std::vector<std::string> ids;
    double bce_sum = 0.0, mse_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i].empty()) {
            std::fprintf(stderr, "warning: %s: %s\n", stems[i].c_str(), errors[i].c_str());
            continue;
        }
        pairs.push_back(std::move(slots[i]));
        ids.push_back(stems[i]);
        bce_sum += bce_vals[i];
        mse_sum += mse_vals[i];
    }
    if (pairs.empty()) {
        std::fprintf(stderr, "error: no evaluable pairs\n");
        return 1;
    }

    const EvalReport report = evaluate_dataset(pairs, ctx.cfg.eval, &ids);

    std::printf("images: %zu\n", pairs.size());
    std::printf("%-10s %-10s %-10s %-10s %-12s %-10s\n", "PixAcc", "mIoU", "nIoU", "Pd", "Fa(1e-6)",
                "F1");
    std::printf("%-10.2f %-10.2f %-10.2f %-10.2f %-12.2f %-10.2f\n", report.pixacc * 100.0,
                report.miou * 100.0, report.niou * 100.0, report.pd * 100.0, report.fa * 1e6,
                report.f1 * 100.0);

    const double mean_bce = bce_sum / static_cast<double>(pairs.size());
    const double mean_mse = mse_sum / static_cast<double>(pairs.size());
    if (with_losses) {
        std::printf("bce: %.6f\n", mean_bce);
        std::printf("feature_mse: %.6f\n", mean_mse);
        std::printf("total_loss: %.6f\n", total_loss(mean_bce, mean_mse));
    }

    if (!report_path.empty()) {
        ordered_json params;
        params["match_radius"] = ctx.cfg.eval.match_radius;
        ordered_json inputs;
        inputs["pred_dir"] = pred_dir.generic_string();
        inputs["truth_dir"] = truth_dir.generic_string();
        ordered_json m = manifest_header("eval", ctx.seed, ctx.jobs, params, inputs);

        ordered_json conventions;
        conventions["pixacc"] = "dataset-pooled target-pixel recall";
        conventions["miou"] = "dataset-pooled intersection over union";
        conventions["niou"] = "per-image intersection over union, averaged";
        conventions["pd_fa"] = "8-connected components, centroid match within match_radius";
        m["conventions"] = std::move(conventions);

        ordered_json metrics;
        metrics["pixacc"] = report.pixacc;
        metrics["miou"] = report.miou;
        metrics["niou"] = report.niou;
        metrics["pd"] = report.pd;
        metrics["fa"] = report.fa;
        metrics["f1"] = report.f1;
        m["metrics"] = std::move(metrics);
        if (with_losses) {
            ordered_json losses;
            losses["bce"] = mean_bce;
            losses["feature_mse"] = mean_mse;
            losses["total"] = total_loss(mean_bce, mean_mse);
            m["losses"] = std::move(losses);
        }

        ordered_json rows = ordered_json::array();
        for (const PerImageStats& s : report.per_image) {
            ordered_json row;
            row["id"] = s.id;
            row["tp"] = s.counts.tp;
            row["fp"] = s.counts.fp;
            row["fn"] = s.counts.fn;
            row["tn"] = s.counts.tn;
            row["iou"] = s.iou;
            row["truth_components"] = s.truth_components;
            row["matched_components"] = s.matched_components;
            row["false_alarm_pixels"] = s.false_alarm_pixels;
            rows.push_back(std::move(row));
        }
        m["per_image"] = std::move(rows);
        m["unmatched"] = unmatched;
        write_manifest(std::move(m), {}, report_path);
    }
    return 0;
}

} // namespace istdforge::cli
