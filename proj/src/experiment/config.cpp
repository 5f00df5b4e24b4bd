#include "cgs/experiment/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "cgs/errors.hpp"
#include "cgs/rng.hpp"

namespace cgs::experiment {

using json = nlohmann::json;

namespace {

/// Walks one JSON object, remembering which keys were read so leftovers can
/// be reported as unknown.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) fail(path_.empty() ? "top level must be an object" : "must be an object");
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    Section child(const std::string& key) {
        seen_.insert(key);
        return Section(node_.at(key), name(key));
    }

    void read(const std::string& key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) fail_field(key, "expected a number");
            out = v->get<double>();
            if (!std::isfinite(out)) fail_field(key, "must be finite");
        }
    }

    void read(const std::string& key, std::size_t& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_unsigned()) fail_field(key, "expected a non-negative integer");
            out = v->get<std::size_t>();
        }
    }

    void read(const std::string& key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) fail_field(key, "expected a string");
            out = v->get<std::string>();
        }
    }

    void read(const std::string& key, std::vector<std::size_t>& out) {
        if (const json* v = find(key)) {
            if (!v->is_array()) fail_field(key, "expected an array of non-negative integers");
            out.clear();
            for (const json& e : *v) {
                if (!e.is_number_unsigned())
                    fail_field(key, "expected an array of non-negative integers");
                out.push_back(e.get<std::size_t>());
            }
        }
    }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError("config: unknown key '" + name(it.key()) + "'");
    }

    [[noreturn]] void fail_field(const std::string& key, const std::string& msg) const {
        throw ConfigError("config: '" + name(key) + "': " + msg);
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("config: " + (path_.empty() ? std::string() : "'" + path_ + "': ") + msg);
    }

    std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_mixture(Section s, eval::MixtureSpec& mixture) {
    const bool explicit_layout = s.has("centers") || s.has("weights");
    if (explicit_layout) {
        const json* centers = s.find("centers");
        const json* weights = s.find("weights");
        if (!centers || !weights) s.fail("'centers' and 'weights' must be given together");
        eval::MixtureSpec spec;
        spec.stddev = mixture.stddev;
        s.read("stddev", spec.stddev);
        try {
            for (const json& c : *centers) spec.centers.push_back(c.get<std::array<double, 2>>());
            spec.weights = weights->get<std::vector<double>>();
        } catch (const json::exception&) {
            s.fail("centers must be [x, y] pairs and weights numbers");
        }
        mixture = std::move(spec);
    } else {
        eval::CircleLayout layout;
        s.read("radius", layout.radius);
        s.read("stddev", layout.stddev);
        s.read("heavy_weight", layout.heavy_weight);
        try {
            mixture = eval::circle_mixture(layout);
        } catch (const ContractError& e) {
            s.fail(e.what());
        }
    }
    s.finish();
}

void read_refinement(Section s, collab::RefinementConfig& cfg, std::optional<double>* threshold,
                     std::size_t* threshold_samples) {
    if (const json* layer = s.find("layer")) {
        if (layer->is_string() && *layer == "data") {
            cfg.layer = collab::kDataSpace;
        } else if (layer->is_string() && *layer == "middle") {
            cfg.layer = collab::kMiddleLayer;
        } else if (layer->is_number_unsigned() && layer->get<std::size_t>() >= 1) {
            cfg.layer = layer->get<std::size_t>() - 1;
        } else {
            s.fail_field("layer", "expected \"data\", \"middle\" or a layer number >= 1");
        }
    }
    s.read("step_size", cfg.step_size);
    s.read("max_steps", cfg.max_steps);
    s.read("stop_prob", cfg.stop_prob);
    s.read("divergence_limit", cfg.divergence_limit);
    std::string termination;
    s.read("termination", termination);
    if (termination == "deterministic") {
        cfg.termination = collab::Termination::Deterministic;
    } else if (termination == "probabilistic") {
        cfg.termination = collab::Termination::Probabilistic;
    } else if (!termination.empty()) {
        s.fail_field("termination", "expected \"deterministic\" or \"probabilistic\"");
    }
    if (threshold) {
        if (const json* t = s.find("threshold")) {
            if (t->is_string() && *t == "median") {
                threshold->reset();
            } else if (t->is_number()) {
                *threshold = t->get<double>();
                cfg.threshold = **threshold;
            } else {
                s.fail_field("threshold", "expected \"median\" or a number in (0, 1)");
            }
        }
        s.read("threshold_samples", *threshold_samples);
    }
    s.finish();
}

void read_train(Section s, gan::TrainConfig& cfg) {
    s.read("iterations", cfg.iterations);
    s.read("batch_size", cfg.batch_size);
    s.read("d_steps_per_g_step", cfg.d_steps_per_g_step);
    s.read("g_learning_rate", cfg.g_learning_rate);
    s.read("d_learning_rate", cfg.d_learning_rate);
    s.read("checkpoints", cfg.checkpoints);
    if (s.has("architecture")) {
        Section a = s.child("architecture");
        a.read("latent_dim", cfg.architecture.latent_dim);
        a.read("data_dim", cfg.architecture.data_dim);
        a.read("hidden_layers", cfg.architecture.hidden_layers);
        a.read("hidden_width", cfg.architecture.hidden_width);
        a.read("leaky_slope", cfg.architecture.leaky_slope);
        a.finish();
    }
    s.finish();
}

void read_shape(Section s, shaping::ShapingConfig& cfg) {
    s.read("iterations", cfg.iterations);
    s.read("batch_size", cfg.batch_size);
    s.read("learning_rate", cfg.learning_rate);
    s.read("threshold_refresh", cfg.threshold_refresh);
    s.read("threshold_batch", cfg.threshold_batch);
    s.read("checkpoints", cfg.checkpoints);
    if (s.has("refinement")) read_refinement(s.child("refinement"), cfg.refinement, nullptr, nullptr);
    s.finish();
}

void read_samplers(Section s, SamplerSettings& cfg) {
    s.read("drs_gamma", cfg.gamma);
    s.read("drs_pilot_size", cfg.pilot_size);
    s.read("drs_budget_factor", cfg.budget_factor);
    s.read("mh_chain_length", cfg.mh_chain_length);
    s.finish();
}

void read_eval(Section s, ExperimentConfig& cfg) {
    s.read("samples", cfg.eval_samples);
    s.read("ece_bins", cfg.ece_bins);
    s.read("kde_bandwidth", cfg.kde_bandwidth);
    if (s.has("kde_grid")) {
        Section g = s.child("kde_grid");
        g.read("x_min", cfg.kde_grid.x_min);
        g.read("x_max", cfg.kde_grid.x_max);
        g.read("y_min", cfg.kde_grid.y_min);
        g.read("y_max", cfg.kde_grid.y_max);
        g.read("nx", cfg.kde_grid.nx);
        g.read("ny", cfg.kde_grid.ny);
        g.finish();
    }
    s.finish();
}

}  // namespace

void ExperimentConfig::validate() const {
    auto check = [](auto&& fn) {
        try {
            fn();
        } catch (const ContractError& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    };
    check([&] { mixture.validate(); });
    check([&] { train.validate(); });
    check([&] { shape.validate(); });
    check([&] { refine.validate(); });
    if (refine_threshold && !(*refine_threshold > 0.0 && *refine_threshold < 1.0))
        throw ConfigError("config: 'refine.threshold' must lie in (0, 1)");
    if (threshold_samples == 0) throw ConfigError("config: 'refine.threshold_samples' must be positive");
    if (train.architecture.data_dim != 2)
        throw ConfigError("config: 'train.architecture.data_dim' must be 2 for the mixture benchmark");
    if (!std::isfinite(samplers.gamma)) throw ConfigError("config: 'samplers.drs_gamma' must be finite");
    if (samplers.pilot_size < 100) throw ConfigError("config: 'samplers.drs_pilot_size' must be at least 100");
    if (samplers.budget_factor == 0) throw ConfigError("config: 'samplers.drs_budget_factor' must be positive");
    if (samplers.mh_chain_length < 1) throw ConfigError("config: 'samplers.mh_chain_length' must be at least 1");
    if (eval_samples < 1000) throw ConfigError("config: 'eval.samples' must be at least 1000");
    if (ece_bins == 0) throw ConfigError("config: 'eval.ece_bins' must be positive");
    if (!(kde_bandwidth > 0.0)) throw ConfigError("config: 'eval.kde_bandwidth' must be positive");
    if (!(kde_grid.x_max > kde_grid.x_min && kde_grid.y_max > kde_grid.y_min) || kde_grid.nx == 0 ||
        kde_grid.ny == 0)
        throw ConfigError("config: 'eval.kde_grid' must span a non-empty range with nx, ny >= 1");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    json root;
    try {
        root = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + source + "': " + e.what());
    }

    ExperimentConfig cfg;
    bool shape_lr_given = false;
    bool shape_refinement_given = false;
    try {
        Section top(root, "");
        top.read("seed", cfg.seed);
        std::string out = cfg.output_dir.string();
        top.read("output_dir", out);
        cfg.output_dir = out;
        if (top.has("mixture")) read_mixture(top.child("mixture"), cfg.mixture);
        if (top.has("train")) read_train(top.child("train"), cfg.train);
        if (top.has("refine"))
            read_refinement(top.child("refine"), cfg.refine, &cfg.refine_threshold, &cfg.threshold_samples);
        if (top.has("shape")) {
            shape_lr_given = root["shape"].contains("learning_rate");
            shape_refinement_given = root["shape"].contains("refinement");
            read_shape(top.child("shape"), cfg.shape);
        }
        if (top.has("samplers")) read_samplers(top.child("samplers"), cfg.samplers);
        if (top.has("eval")) read_eval(top.child("eval"), cfg);
        top.finish();
    } catch (const ConfigError& e) {
        throw ConfigError("config '" + source + "': " + std::string(e.what()).substr(8));
    } catch (const json::exception& e) {
        throw ConfigError("config '" + source + "': " + e.what());
    }
    if (!shape_lr_given) cfg.shape.learning_rate = cfg.train.d_learning_rate;
    if (!shape_refinement_given) cfg.shape.refinement = cfg.refine;

    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("config '" + source + "': " + std::string(e.what()).substr(8));
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.string());
}

std::uint64_t stage_seed(const ExperimentConfig& config, const std::string& stage) {
    return derive_seed(config.seed, stage);
}

}  // namespace cgs::experiment
