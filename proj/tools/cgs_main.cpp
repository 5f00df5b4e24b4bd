// Command-line front end for the collaborative-sampling experiments.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cgs/experiment/config.hpp"
#include "cgs/experiment/pipeline.hpp"

namespace fs = std::filesystem;
using namespace cgs;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "Experiment config (JSON with comments)")->required();
    cmd->add_option("--seed", c.seed, "Master seed; overrides the config");
    cmd->add_option("--out", c.out, "Output directory; overrides the config");
}

experiment::ExperimentConfig resolve(const Common& c) {
    experiment::ExperimentConfig cfg = experiment::load_config(c.config);
    if (c.seed) cfg.seed = *c.seed;
    if (c.out) cfg.output_dir = *c.out;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collaborative sampling for GANs on the 2-D mixture benchmark"};
    app.require_subcommand(1);

    Common common;
    std::string g_path, d_path, mode = "collab", prefix, method, output;
    std::vector<std::string> d_paths, files;
    std::optional<std::string> eval_d;
    std::optional<std::size_t> n;
    std::vector<std::size_t> layers;

    auto* train = app.add_subcommand("train", "Train a GAN and write gan_<iteration>.ckpt files");
    add_common(train, common);

    auto* shape = app.add_subcommand("shape", "Fine-tune a discriminator against a frozen generator");
    add_common(shape, common);
    shape->add_option("--g", g_path, "Checkpoint holding the generator")->required();
    shape->add_option("--d", d_path, "Checkpoint holding the discriminator")->required();
    shape->add_option("--mode", mode, "collab: refined fakes; standard: raw generator fakes")
        ->check(CLI::IsMember({"collab", "standard"}));
    shape->add_option("--prefix", prefix, "Output file prefix (default: shaped or standard)");

    auto* sample = app.add_subcommand("sample", "Draw samples with one method into a CSV file");
    add_common(sample, common);
    sample->add_option("--method", method, "real, gan, drs, mh, refine or collab")->required();
    sample->add_option("--g", g_path, "Checkpoint holding the generator")->required();
    sample->add_option("--d", d_path, "Checkpoint holding the discriminator")->required();
    sample->add_option("-n,--n", n, "Number of samples (default: eval.samples)");
    sample->add_option("--output", output, "Output file (default: <out>/samples_<method>.csv)");

    auto* evaluate = app.add_subcommand("evaluate", "Compute metrics and KDE grids for sample files");
    add_common(evaluate, common);
    evaluate->add_option("files", files, "Sample CSV files, one method each")->required();
    evaluate->add_option("--d", eval_d, "Discriminator checkpoint for Brier / Z / ECE");

    auto* diagnose = app.add_subcommand("diagnose", "Diagnostics vs MH gains across discriminator checkpoints");
    add_common(diagnose, common);
    diagnose->add_option("--g", g_path, "Checkpoint holding the generator")->required();
    diagnose->add_option("--d", d_paths, "Discriminator checkpoints")->required();

    auto* ablate = app.add_subcommand("ablate", "Refine at several generator layers and compare");
    add_common(ablate, common);
    ablate->add_option("--g", g_path, "Checkpoint holding the generator")->required();
    ablate->add_option("--d", d_path, "Checkpoint holding the discriminator")->required();
    ablate->add_option("--layers", layers, "Layer numbers, 1 = latent input, L + 1 = data space")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        const experiment::ExperimentConfig cfg = resolve(common);
        if (*train) {
            for (const fs::path& p : experiment::run_train(cfg)) std::cout << p.string() << "\n";
        } else if (*shape) {
            const auto m = mode == "standard" ? experiment::ShapeMode::Standard : experiment::ShapeMode::Collab;
            if (prefix.empty()) prefix = mode == "standard" ? "standard" : "shaped";
            for (const fs::path& p : experiment::run_shape(cfg, g_path, d_path, m, prefix))
                std::cout << p.string() << "\n";
        } else if (*sample) {
            const auto m = experiment::parse_method(method);
            if (!m) {
                std::cerr << "error: unknown method '" << method << "' (expected real, gan, drs, mh, refine, collab)\n";
                return kExitUsage;
            }
            std::optional<fs::path> out_file;
            if (!output.empty()) out_file = output;
            std::cout << experiment::run_sample(cfg, *m, g_path, d_path, n.value_or(cfg.eval_samples), out_file).string()
                      << "\n";
        } else if (*evaluate) {
            std::vector<fs::path> paths(files.begin(), files.end());
            std::optional<fs::path> d;
            if (eval_d) d = *eval_d;
            for (const auto& r : experiment::run_evaluate(cfg, paths, d))
                std::cout << fmt::format("{:<7} good {:.4f}  kl {}  js {:.4f}\n", experiment::method_name(r.method),
                                         r.metrics.good_fraction,
                                         r.metrics.kl_good ? fmt::format("{:.4f}", *r.metrics.kl_good) : "n/a",
                                         r.metrics.js_augmented);
        } else if (*diagnose) {
            std::vector<fs::path> paths(d_paths.begin(), d_paths.end());
            const auto table = experiment::run_diagnose(cfg, g_path, paths);
            for (const auto& c : table.correlations)
                if (c.value)
                    std::cout << fmt::format("{:<6} {:<11} pearson {:+.3f}  spearman {:+.3f}\n", c.diagnostic, c.gain,
                                             c.value->pearson, c.value->spearman);
        } else if (*ablate) {
            for (const auto& r : experiment::run_ablation(cfg, g_path, d_path, layers))
                std::cout << fmt::format("layer {:>2}  good {:.4f}  js {:.4f}  steps {:.2f}\n", r.layer,
                                         r.metrics.good_fraction, r.metrics.js_augmented, r.mean_steps);
        }
    } catch (const experiment::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
