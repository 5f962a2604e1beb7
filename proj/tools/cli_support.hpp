#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "istdforge/istdforge.hpp"

namespace istdforge::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "istd-forge";
inline constexpr const char* kToolVersion = "1.0.0";

/// All tunables reachable from the config file. Section names in the JSON
/// document mirror the subcommands; every field defaults to the library
/// default so an empty config is valid.
struct ToolConfig {
    std::uint64_t seed = 0;
    WmfConfig wmf;
    GridSpec grid;
    BrdConfig brd;
    HarvestConfig harvest;
    RegenConfig regen;
    SsimParams ssim;
    NoiseRegionConfig noise;
    MixConfig mix;
    DegradationSpec degrade;
    DetectionParams eval;
};

inline std::string noise_kind_name(NoiseKind k) {
    switch (k) {
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::SaltPepper: return "salt_pepper";
    case NoiseKind::Speckle: return "speckle";
    case NoiseKind::Uniform: return "uniform";
    case NoiseKind::Poisson: return "poisson";
    case NoiseKind::Composite: return "composite";
    }
    throw argument_error("noise_kind_name: unknown kind");
}

inline NoiseKind noise_kind_from(const std::string& s) {
    if (s == "gaussian") return NoiseKind::Gaussian;
    if (s == "salt_pepper") return NoiseKind::SaltPepper;
    if (s == "speckle") return NoiseKind::Speckle;
    if (s == "uniform") return NoiseKind::Uniform;
    if (s == "poisson") return NoiseKind::Poisson;
    if (s == "composite") return NoiseKind::Composite;
    throw argument_error("unknown noise kind: " + s);
}

namespace detail {

inline void check_keys(const ordered_json& j, const std::string& section,
                       std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) { ok = true; break; }
        if (!ok) throw argument_error("config: unknown key '" + item.key() + "' in section '" + section + "'");
    }
}

template <typename T>
void read_field(const ordered_json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace detail

/// Parses the JSON config document, rejecting unknown sections and keys so a
/// typo cannot silently fall back to a default.
inline ToolConfig load_tool_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file: " + path.string());
    ordered_json j = ordered_json::parse(in);

    detail::check_keys(j, "<top>", {"seed", "wmf", "brd", "harvest", "regen", "noise", "mix",
                                    "degrade", "eval"});
    ToolConfig cfg;
    detail::read_field(j, "seed", cfg.seed);

    if (j.contains("wmf")) {
        const auto& s = j.at("wmf");
        detail::check_keys(s, "wmf", {"epsilon"});
        detail::read_field(s, "epsilon", cfg.wmf.epsilon);
    }
    if (j.contains("brd")) {
        const auto& s = j.at("brd");
        detail::check_keys(s, "brd", {"block_size", "crop_size", "tau_b", "use_wmf", "policy"});
        detail::read_field(s, "block_size", cfg.grid.block_size);
        detail::read_field(s, "crop_size", cfg.brd.crop_size);
        detail::read_field(s, "tau_b", cfg.brd.tau_b);
        detail::read_field(s, "use_wmf", cfg.brd.use_wmf);
        if (s.contains("policy")) {
            const std::string p = s.at("policy").get<std::string>();
            if (p == "argmin") cfg.brd.policy = CropPolicy::ArgMin;
            else if (p == "random") cfg.brd.policy = CropPolicy::Random;
            else throw argument_error("config: brd.policy must be 'argmin' or 'random'");
        }
    }
    if (j.contains("harvest")) {
        const auto& s = j.at("harvest");
        detail::check_keys(s, "harvest", {"pixacc_threshold", "iou_threshold", "patch_pad"});
        detail::read_field(s, "pixacc_threshold", cfg.harvest.pixacc_threshold);
        detail::read_field(s, "iou_threshold", cfg.harvest.iou_threshold);
        detail::read_field(s, "patch_pad", cfg.harvest.patch_pad);
    }
    if (j.contains("regen")) {
        const auto& s = j.at("regen");
        detail::check_keys(s, "regen", {"ssim_threshold", "top_k", "max_usage", "solver_tol",
                                        "solver_max_iter", "stride", "c1", "c2"});
        detail::read_field(s, "ssim_threshold", cfg.regen.ssim_threshold);
        detail::read_field(s, "top_k", cfg.regen.top_k);
        detail::read_field(s, "max_usage", cfg.regen.max_usage);
        detail::read_field(s, "solver_tol", cfg.regen.solver_tol);
        detail::read_field(s, "solver_max_iter", cfg.regen.solver_max_iter);
        detail::read_field(s, "stride", cfg.ssim.stride);
        detail::read_field(s, "c1", cfg.ssim.c1);
        detail::read_field(s, "c2", cfg.ssim.c2);
    }
    if (j.contains("noise")) {
        const auto& s = j.at("noise");
        detail::check_keys(s, "noise", {"window_w", "window_h", "stride", "sigma_max", "mu_min"});
        detail::read_field(s, "window_w", cfg.noise.window_w);
        detail::read_field(s, "window_h", cfg.noise.window_h);
        detail::read_field(s, "stride", cfg.noise.stride);
        detail::read_field(s, "sigma_max", cfg.noise.sigma_max);
        detail::read_field(s, "mu_min", cfg.noise.mu_min);
    }
    if (j.contains("mix")) {
        const auto& s = j.at("mix");
        detail::check_keys(s, "mix", {"policy", "lambda"});
        if (s.contains("policy")) {
            const std::string p = s.at("policy").get<std::string>();
            if (p == "fixed") cfg.mix.policy = MixPolicy::Fixed;
            else if (p == "uniform") cfg.mix.policy = MixPolicy::UniformRandom;
            else throw argument_error("config: mix.policy must be 'fixed' or 'uniform'");
        }
        detail::read_field(s, "lambda", cfg.mix.lambda);
    }
    if (j.contains("degrade")) {
        const auto& s = j.at("degrade");
        detail::check_keys(s, "degrade", {"natural_fraction", "split_fraction", "train_blur",
                                          "test_angles", "test_noise"});
        detail::read_field(s, "natural_fraction", cfg.degrade.natural_fraction);
        detail::read_field(s, "split_fraction", cfg.degrade.split_fraction);
        if (s.contains("train_blur")) {
            const auto& b = s.at("train_blur");
            detail::check_keys(b, "degrade.train_blur", {"length", "angle_deg"});
            detail::read_field(b, "length", cfg.degrade.train_blur.length);
            detail::read_field(b, "angle_deg", cfg.degrade.train_blur.angle_deg);
        }
        if (s.contains("test_angles"))
            cfg.degrade.test_angles = s.at("test_angles").get<std::vector<double>>();
        if (s.contains("test_noise")) {
            const auto& n = s.at("test_noise");
            detail::check_keys(n, "degrade.test_noise", {"kind", "amount"});
            if (n.contains("kind")) cfg.degrade.test_noise.kind = noise_kind_from(n.at("kind").get<std::string>());
            detail::read_field(n, "amount", cfg.degrade.test_noise.amount);
        }
    }
    if (j.contains("eval")) {
        const auto& s = j.at("eval");
        detail::check_keys(s, "eval", {"match_radius"});
        detail::read_field(s, "match_radius", cfg.eval.match_radius);
    }
    return cfg;
}

/// --jobs beats ISTD_FORGE_JOBS beats single-threaded.
inline int resolve_jobs(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("ISTD_FORGE_JOBS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

/// Runs fn(0..n-1) on `jobs` threads. Work must be independent per index;
/// callers keep per-index result slots so output order stays deterministic.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), n));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

inline bool has_image_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext == ".png" || ext == ".pgm";
}

/// Sorted list of the image files directly inside dir.
inline std::vector<fs::path> list_images(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw io_error("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && has_image_extension(entry.path())) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

/// stem -> path; on duplicate stems the lexicographically first file wins.
inline std::map<std::string, fs::path> stem_index(const std::vector<fs::path>& files) {
    std::map<std::string, fs::path> index;
    for (const auto& f : files) index.emplace(f.stem().string(), f);
    return index;
}

inline void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create directory " + dir.string() + ": " + ec.message());
}

/// Common manifest preamble: tool identity, invocation, and provenance.
inline ordered_json manifest_header(const std::string& command, std::uint64_t seed, int jobs,
                                    ordered_json parameters, ordered_json inputs) {
    ordered_json m;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["command"] = command;
    m["seed"] = seed;
    m["jobs"] = jobs;
    m["parameters"] = std::move(parameters);
    m["inputs"] = std::move(inputs);
    return m;
}

/// Appends the failure list and the completeness marker, then writes the
/// document. The marker is last so a truncated file cannot look complete.
inline void write_manifest(ordered_json m, const std::vector<std::string>& failures,
                           const fs::path& path) {
    m["failures"] = failures;
    m["complete"] = true;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write manifest: " + path.string());
    out << m.dump(2) << '\n';
}

inline ordered_json rect_json(const Rect& r) {
    ordered_json j;
    j["x"] = r.x;
    j["y"] = r.y;
    j["w"] = r.w;
    j["h"] = r.h;
    return j;
}

/// Collects non-empty per-index error slots into "stem: message" lines and
/// mirrors them on stderr.
inline std::vector<std::string> gather_failures(const std::vector<std::string>& errors,
                                                const std::vector<std::string>& stems) {
    std::vector<std::string> failures;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (errors[i].empty()) continue;
        failures.push_back(stems[i] + ": " + errors[i]);
        std::fprintf(stderr, "warning: %s: %s\n", stems[i].c_str(), errors[i].c_str());
    }
    return failures;
}

} // namespace istdforge::cli
