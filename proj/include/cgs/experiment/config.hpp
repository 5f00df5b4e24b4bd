#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "cgs/collab/refine.hpp"
#include "cgs/eval/kde.hpp"
#include "cgs/eval/mixture.hpp"
#include "cgs/gan/gan.hpp"
#include "cgs/mc/samplers.hpp"
#include "cgs/shaping/shaping.hpp"

namespace cgs::experiment {

/// Unreadable or invalid configuration; the message names the file or field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SamplerSettings {
    double gamma = 1.0;
    std::size_t pilot_size = 1000;
    std::size_t budget_factor = 100;
    std::size_t mh_chain_length = 20;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";
    eval::MixtureSpec mixture = eval::default_mixture();
    gan::TrainConfig train;
    shaping::ShapingConfig shape;
    /// Refinement used by `sample`. An unset threshold means "median of the
    /// discriminator scores on threshold_samples fresh real samples".
    collab::RefinementConfig refine;
    std::optional<double> refine_threshold;
    std::size_t threshold_samples = 1000;
    SamplerSettings samplers;
    std::size_t eval_samples = 10000;
    std::size_t ece_bins = 10;
    double kde_bandwidth = 0.1;
    eval::GridSpec kde_grid;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Parses JSON with // and /* */ comments. Unknown keys are errors.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Independent RNG seed for one pipeline stage ("train", "shape",
/// "sample/<method>", "eval").
std::uint64_t stage_seed(const ExperimentConfig& config, const std::string& stage);

}  // namespace cgs::experiment
