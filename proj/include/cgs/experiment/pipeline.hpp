#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cgs/eval/correlate.hpp"
#include "cgs/eval/diagnostics.hpp"
#include "cgs/eval/metrics.hpp"
#include "cgs/experiment/config.hpp"
#include "cgs/experiment/records.hpp"
#include "cgs/mc/samplers.hpp"
#include "cgs/nn/checkpoint.hpp"
#include "cgs/nn/mlp.hpp"
#include "cgs/rng.hpp"

namespace cgs::experiment {

inline constexpr std::string_view kGeneratorName = "generator";
inline constexpr std::string_view kDiscriminatorName = "discriminator";

/// Loads `name` from a checkpoint file; errors name both.
nn::Mlp load_model(const std::filesystem::path& path, std::string_view name);

// ---- in-memory stages -------------------------------------------------------

struct SampleRun {
    std::vector<SampleRecord> records;
    std::optional<double> threshold;  // refine / collab only
    mc::SamplerStats stats;
};

/// Draws `n` records with one method. Refinement-based methods use
/// config.refine; their threshold is config.refine_threshold or the median
/// discriminator score of threshold_samples fresh real samples.
SampleRun sample_method(const ExperimentConfig& config, Method method, const nn::Mlp& generator,
                        const nn::Mlp& discriminator, std::size_t n, Rng& rng);

/// Histogram of eval_samples fresh real samples: the reference every method
/// is compared against.
eval::CategoricalHist reference_histogram(const ExperimentConfig& config, Rng& rng);

struct MethodReport {
    Method method = Method::Gan;
    eval::MethodMetrics metrics;
    std::optional<eval::DiagnosisReport> diagnosis;
};

struct DiagnosisRow {
    std::string label;
    eval::DiagnosisReport report;
    eval::MethodMetrics mh;
    double delta_good = 0.0;  // each delta is metric(MH) - metric(plain sampling)
    double delta_kl = 0.0;    // NaN when either side has no good samples
    double delta_js = 0.0;
};

struct CorrelationRow {
    std::string diagnostic;  // brier, z, ece
    std::string gain;        // delta_good, delta_kl, delta_js
    std::optional<eval::Correlation> value;
    std::string skipped;  // reason when value is empty
};

struct DiagnosisTable {
    eval::MethodMetrics baseline;  // plain generator sampling
    std::vector<DiagnosisRow> rows;
    std::vector<CorrelationRow> correlations;
};

/// For every discriminator: Brier / Z / ECE on held-out reals vs generator
/// samples, and the change in each sample metric when MH (k from the config)
/// replaces plain sampling. All discriminators see the same samples and
/// random draws. Leaves `correlations` empty.
DiagnosisTable diagnose_discriminators(const ExperimentConfig& config, const nn::Mlp& generator,
                                       const std::vector<std::pair<std::string, nn::Mlp>>& discriminators, Rng& rng);

/// Pearson / Spearman between each diagnostic and each change. Requires at
/// least 3 rows; zero variance in any column is a ContractError.
std::vector<CorrelationRow> correlate_diagnostics(const std::vector<DiagnosisRow>& rows);

struct AblationRow {
    std::size_t layer = 0;  // 1-based; num_layers + 1 is data space
    eval::MethodMetrics metrics;
    double mean_steps = 0.0;
};

/// Refines the same latents at each requested layer (1-based, as in the
/// config) and evaluates the results.
std::vector<AblationRow> layer_ablation(const ExperimentConfig& config, const nn::Mlp& generator,
                                        const nn::Mlp& discriminator, const std::vector<std::size_t>& layers,
                                        Rng& rng);

// ---- file-producing stages (the CLI subcommands) ----------------------------

/// Writes gan_<iteration>.ckpt per scheduled checkpoint and train_log.csv.
std::vector<std::filesystem::path> run_train(const ExperimentConfig& config);

enum class ShapeMode { Collab, Standard };

/// Fine-tunes the discriminator stored in `d_path` against the generator in
/// `g_path`. Standard mode uses unrefined samples. Each scheduled checkpoint is
/// written as <prefix>_<iteration>.ckpt with the same layout and seed as the
/// input discriminator file; the log goes to <prefix>_log.csv.
std::vector<std::filesystem::path> run_shape(const ExperimentConfig& config, const std::filesystem::path& g_path,
                                             const std::filesystem::path& d_path, ShapeMode mode,
                                             const std::string& prefix);

/// Writes samples_<method>.csv (or `out_file` if given) and returns its path.
std::filesystem::path run_sample(const ExperimentConfig& config, Method method, const std::filesystem::path& g_path,
                                 const std::filesystem::path& d_path, std::size_t n,
                                 const std::optional<std::filesystem::path>& out_file = std::nullopt);

/// Evaluates sample files (one method each) into metrics.json, metrics.csv
/// and kde_<method>.csv. With a discriminator, Brier / Z / ECE are added for
/// every generated method. Nothing is written if any input is invalid.
std::vector<MethodReport> run_evaluate(const ExperimentConfig& config,
                                       const std::vector<std::filesystem::path>& sample_files,
                                       const std::optional<std::filesystem::path>& d_path);

/// Writes diagnosis.csv, diagnosis_normalized.csv and, with at least three
/// discriminators, correlation.csv. Per-checkpoint files are written before
/// correlating, so they survive a correlation error.
DiagnosisTable run_diagnose(const ExperimentConfig& config, const std::filesystem::path& g_path,
                            const std::vector<std::filesystem::path>& d_paths);

/// Writes ablation.csv.
std::vector<AblationRow> run_ablation(const ExperimentConfig& config, const std::filesystem::path& g_path,
                                      const std::filesystem::path& d_path, const std::vector<std::size_t>& layers);

}  // namespace cgs::experiment
