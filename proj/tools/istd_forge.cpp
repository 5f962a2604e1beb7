#include <cstdio>
#include <functional>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"

using namespace istdforge;
using namespace istdforge::cli;

int main(int argc, char** argv) {
    CLI::App app{"Infrared small-target data tooling: background detection, sample synthesis, "
                 "noise libraries, benchmark degradation, and evaluation"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kToolVersion);

    std::string config_path;
    std::uint64_t seed_flag = 0;
    int jobs_flag = 0;
    auto* config_opt = app.add_option("--config", config_path, "JSON config file")
                           ->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed_flag, "override the global seed");
    app.add_option("--jobs", jobs_flag, "worker threads (default: ISTD_FORGE_JOBS or 1)");

    std::function<int(RunContext&)> action;

    // wmf
    {
        auto* cmd = app.add_subcommand("wmf", "denoise images with the wavelet band filter");
        auto in = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto epsilon = std::make_shared<double>(0.0);
        cmd->add_option("--in", *in, "input image directory")->required();
        cmd->add_option("--out", *out, "output directory")->required();
        auto* eps_opt = cmd->add_option("--epsilon", *epsilon, "edge-scale stabilizer");
        cmd->callback([&action, in, out, epsilon, eps_opt] {
            action = [=](RunContext& ctx) {
                if (eps_opt->count()) ctx.cfg.wmf.epsilon = *epsilon;
                return run_wmf(*in, *out, ctx);
            };
        });
    }

    // brd
    {
        auto* cmd = app.add_subcommand("brd", "detect and crop low-texture background regions");
        auto in = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto block = std::make_shared<int>(0);
        auto crop = std::make_shared<int>(0);
        auto tau = std::make_shared<double>(0.0);
        auto policy = std::make_shared<std::string>();
        auto no_wmf = std::make_shared<bool>(false);
        cmd->add_option("--in", *in, "input image directory")->required();
        cmd->add_option("--out", *out, "output directory")->required();
        auto* block_opt = cmd->add_option("--block-size", *block, "scoring block size");
        auto* crop_opt = cmd->add_option("--crop-size", *crop, "emitted crop size");
        auto* tau_opt = cmd->add_option("--tau-b", *tau, "multi-crop score threshold");
        auto* policy_opt = cmd->add_option("--policy", *policy, "crop policy: argmin or random")
                               ->check(CLI::IsMember({"argmin", "random"}));
        cmd->add_flag("--no-wmf", *no_wmf, "score raw pixels without the wavelet filter");
        cmd->callback([&action, in, out, block, crop, tau, policy, no_wmf, block_opt, crop_opt,
                       tau_opt, policy_opt] {
            action = [=](RunContext& ctx) {
                if (block_opt->count()) ctx.cfg.grid.block_size = *block;
                if (crop_opt->count()) ctx.cfg.brd.crop_size = *crop;
                if (tau_opt->count()) ctx.cfg.brd.tau_b = *tau;
                if (policy_opt->count())
                    ctx.cfg.brd.policy = *policy == "random" ? CropPolicy::Random : CropPolicy::ArgMin;
                if (*no_wmf) ctx.cfg.brd.use_wmf = false;
                return run_brd(*in, *out, ctx);
            };
        });
    }

    // harvest
    {
        auto* cmd = app.add_subcommand("harvest", "select hard samples and cut out their targets");
        auto pred = std::make_shared<std::string>();
        auto truth = std::make_shared<std::string>();
        auto images = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto tp = std::make_shared<double>(0.0);
        auto ti = std::make_shared<double>(0.0);
        auto pad = std::make_shared<int>(0);
        cmd->add_option("--pred", *pred, "predicted mask directory")->required();
        cmd->add_option("--truth", *truth, "ground-truth mask directory")->required();
        cmd->add_option("--images", *images, "source image directory")->required();
        cmd->add_option("--out", *out, "output directory")->required();
        auto* tp_opt = cmd->add_option("--pixacc-threshold", *tp, "recall must fall below this");
        auto* ti_opt = cmd->add_option("--iou-threshold", *ti, "IoU must fall below this");
        auto* pad_opt = cmd->add_option("--patch-pad", *pad, "context padding around targets");
        cmd->callback([&action, pred, truth, images, out, tp, ti, pad, tp_opt, ti_opt, pad_opt] {
            action = [=](RunContext& ctx) {
                if (tp_opt->count()) ctx.cfg.harvest.pixacc_threshold = *tp;
                if (ti_opt->count()) ctx.cfg.harvest.iou_threshold = *ti;
                if (pad_opt->count()) ctx.cfg.harvest.patch_pad = *pad;
                return run_harvest(*pred, *truth, *images, *out, ctx);
            };
        });
    }

    // regen
    {
        auto* cmd = app.add_subcommand("regen", "blend harvested targets into matched backgrounds");
        auto targets = std::make_shared<std::string>();
        auto backgrounds = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto thr = std::make_shared<double>(0.0);
        auto top_k = std::make_shared<int>(0);
        auto max_usage = std::make_shared<int>(0);
        auto stride = std::make_shared<int>(0);
        auto tol = std::make_shared<double>(0.0);
        cmd->add_option("--targets", *targets, "harvest output directory (patches/ + masks/)")
            ->required();
        cmd->add_option("--backgrounds", *backgrounds, "background image directory")->required();
        cmd->add_option("--out", *out, "output directory")->required();
        auto* thr_opt = cmd->add_option("--ssim-threshold", *thr, "minimum placement similarity");
        auto* topk_opt = cmd->add_option("--top-k", *top_k, "candidate pool size per background");
        auto* usage_opt = cmd->add_option("--max-usage", *max_usage, "placements allowed per target");
        auto* stride_opt = cmd->add_option("--stride", *stride, "window search stride");
        auto* tol_opt = cmd->add_option("--solver-tol", *tol, "blend solver relative residual");
        cmd->callback([&action, targets, backgrounds, out, thr, top_k, max_usage, stride, tol,
                       thr_opt, topk_opt, usage_opt, stride_opt, tol_opt] {
            action = [=](RunContext& ctx) {
                if (thr_opt->count()) ctx.cfg.regen.ssim_threshold = *thr;
                if (topk_opt->count()) ctx.cfg.regen.top_k = *top_k;
                if (usage_opt->count()) ctx.cfg.regen.max_usage = *max_usage;
                if (stride_opt->count()) ctx.cfg.ssim.stride = *stride;
                if (tol_opt->count()) ctx.cfg.regen.solver_tol = *tol;
                return run_regen(*targets, *backgrounds, *out, ctx);
            };
        });
    }

    // noise build | mix
    {
        auto* noise = app.add_subcommand("noise", "real-domain noise library tools");
        noise->require_subcommand(1);
        noise->fallthrough();

        auto* build = noise->add_subcommand("build", "harvest flat noise windows into a library");
        auto bin = std::make_shared<std::string>();
        auto bout = std::make_shared<std::string>();
        auto sigma = std::make_shared<double>(0.0);
        auto mu = std::make_shared<double>(0.0);
        auto ww = std::make_shared<int>(0);
        auto wh = std::make_shared<int>(0);
        auto wstride = std::make_shared<int>(0);
        build->add_option("--in", *bin, "input image directory")->required();
        build->add_option("--out", *bout, "output directory")->required();
        auto* sigma_opt = build->add_option("--sigma-max", *sigma, "window std dev ceiling");
        auto* mu_opt = build->add_option("--mu-min", *mu, "window mean floor");
        auto* ww_opt = build->add_option("--window-w", *ww, "window width (0 = width/12)");
        auto* wh_opt = build->add_option("--window-h", *wh, "window height (0 = height/15)");
        auto* ws_opt = build->add_option("--stride", *wstride, "scan stride (0 = window extent)");
        build->callback([&action, bin, bout, sigma, mu, ww, wh, wstride, sigma_opt, mu_opt, ww_opt,
                         wh_opt, ws_opt] {
            action = [=](RunContext& ctx) {
                if (sigma_opt->count()) ctx.cfg.noise.sigma_max = *sigma;
                if (mu_opt->count()) ctx.cfg.noise.mu_min = *mu;
                if (ww_opt->count()) ctx.cfg.noise.window_w = *ww;
                if (wh_opt->count()) ctx.cfg.noise.window_h = *wh;
                if (ws_opt->count()) ctx.cfg.noise.stride = *wstride;
                return run_noise_build(*bin, *bout, ctx);
            };
        });

        auto* mix = noise->add_subcommand("mix", "blend library noise into images");
        auto min_dir = std::make_shared<std::string>();
        auto mlib = std::make_shared<std::string>();
        auto mout = std::make_shared<std::string>();
        auto lambda = std::make_shared<double>(0.0);
        auto mpolicy = std::make_shared<std::string>();
        mix->add_option("--in", *min_dir, "input image directory")->required();
        mix->add_option("--library", *mlib, "noise library directory")->required();
        mix->add_option("--out", *mout, "output directory")->required();
        auto* lambda_opt = mix->add_option("--lambda", *lambda, "fixed blend weight");
        auto* mpolicy_opt = mix->add_option("--policy", *mpolicy, "fixed or uniform")
                                ->check(CLI::IsMember({"fixed", "uniform"}));
        mix->callback([&action, min_dir, mlib, mout, lambda, mpolicy, lambda_opt, mpolicy_opt] {
            action = [=](RunContext& ctx) {
                if (lambda_opt->count()) ctx.cfg.mix.lambda = *lambda;
                if (mpolicy_opt->count())
                    ctx.cfg.mix.policy =
                        *mpolicy == "uniform" ? MixPolicy::UniformRandom : MixPolicy::Fixed;
                return run_noise_mix(*min_dir, *mlib, *mout, ctx);
            };
        });
    }

    // degrade
    {
        auto* cmd = app.add_subcommand("degrade", "build a blur/noise benchmark from clean pairs");
        auto images = std::make_shared<std::string>();
        auto masks = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto natural = std::make_shared<double>(0.0);
        auto split = std::make_shared<double>(0.0);
        auto blen = std::make_shared<int>(0);
        auto bang = std::make_shared<double>(0.0);
        auto nkind = std::make_shared<std::string>();
        auto namount = std::make_shared<double>(0.0);
        cmd->add_option("--images", *images, "clean image directory")->required();
        cmd->add_option("--masks", *masks, "mask directory")->required();
        cmd->add_option("--out", *out, "output directory")->required();
        auto* nat_opt = cmd->add_option("--natural-fraction", *natural, "fraction left unblurred");
        auto* split_opt = cmd->add_option("--split-fraction", *split, "train fraction");
        auto* blen_opt = cmd->add_option("--blur-length", *blen, "train blur length");
        auto* bang_opt = cmd->add_option("--blur-angle", *bang, "train blur angle (degrees)");
        auto* nkind_opt =
            cmd->add_option("--noise-kind", *nkind, "test noise family")
                ->check(CLI::IsMember(
                    {"gaussian", "salt_pepper", "speckle", "uniform", "poisson", "composite"}));
        auto* namount_opt = cmd->add_option("--noise-amount", *namount, "test noise amount");
        cmd->callback([&action, images, masks, out, natural, split, blen, bang, nkind, namount,
                       nat_opt, split_opt, blen_opt, bang_opt, nkind_opt, namount_opt] {
            action = [=](RunContext& ctx) {
                if (nat_opt->count()) ctx.cfg.degrade.natural_fraction = *natural;
                if (split_opt->count()) ctx.cfg.degrade.split_fraction = *split;
                if (blen_opt->count()) ctx.cfg.degrade.train_blur.length = *blen;
                if (bang_opt->count()) ctx.cfg.degrade.train_blur.angle_deg = *bang;
                if (nkind_opt->count()) ctx.cfg.degrade.test_noise.kind = noise_kind_from(*nkind);
                if (namount_opt->count()) ctx.cfg.degrade.test_noise.amount = *namount;
                return run_degrade(*images, *masks, *out, ctx);
            };
        });
    }

    // eval
    {
        auto* cmd = app.add_subcommand("eval", "score predicted masks against ground truth");
        auto pred = std::make_shared<std::string>();
        auto truth = std::make_shared<std::string>();
        auto report = std::make_shared<std::string>();
        auto radius = std::make_shared<double>(0.0);
        auto with_losses = std::make_shared<bool>(false);
        cmd->add_option("--pred", *pred, "predicted mask directory")->required();
        cmd->add_option("--truth", *truth, "ground-truth mask directory")->required();
        cmd->add_option("--report", *report, "write a JSON report here");
        auto* radius_opt = cmd->add_option("--match-radius", *radius, "centroid match radius");
        cmd->add_flag("--with-bce", *with_losses, "also report loss values on the predictions");
        cmd->callback([&action, pred, truth, report, radius, with_losses, radius_opt] {
            action = [=](RunContext& ctx) {
                if (radius_opt->count()) ctx.cfg.eval.match_radius = *radius;
                return run_eval(*pred, *truth, *report, *with_losses, ctx);
            };
        });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        RunContext ctx;
        if (config_opt->count()) ctx.cfg = load_tool_config(config_path);
        ctx.seed = seed_opt->count() ? seed_flag : ctx.cfg.seed;
        ctx.jobs = resolve_jobs(jobs_flag);
        return action(ctx);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
