#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "cli_support.hpp"

namespace istdforge::cli {

/// Resolved invocation state shared by every subcommand: merged config,
/// effective seed, and worker count.
struct RunContext {
    ToolConfig cfg;
    std::uint64_t seed = 0;
    int jobs = 1;
};

int run_wmf(const fs::path& in_dir, const fs::path& out_dir, const RunContext& ctx);
int run_brd(const fs::path& in_dir, const fs::path& out_dir, const RunContext& ctx);
int run_harvest(const fs::path& pred_dir, const fs::path& truth_dir, const fs::path& image_dir,
                const fs::path& out_dir, const RunContext& ctx);
int run_regen(const fs::path& target_dir, const fs::path& background_dir, const fs::path& out_dir,
              const RunContext& ctx);
int run_noise_build(const fs::path& in_dir, const fs::path& out_dir, const RunContext& ctx);
int run_noise_mix(const fs::path& in_dir, const fs::path& library_dir, const fs::path& out_dir,
                  const RunContext& ctx);
int run_degrade(const fs::path& image_dir, const fs::path& mask_dir, const fs::path& out_dir,
                const RunContext& ctx);
int run_eval(const fs::path& pred_dir, const fs::path& truth_dir, const fs::path& report_path,
             bool with_losses, const RunContext& ctx);

} // namespace istdforge::cli
