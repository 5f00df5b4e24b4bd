#include "cgs/experiment/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>

#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "cgs/collab/refine.hpp"
#include "cgs/errors.hpp"
#include "cgs/eval/kde.hpp"
#include "cgs/gan/gan.hpp"
#include "cgs/nn/critic.hpp"
#include "cgs/shaping/shaping.hpp"

namespace cgs::experiment {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
}

std::string num(double v) { return std::isfinite(v) ? fmt::format("{:.17g}", v) : std::string(); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

double resolve_threshold(const ExperimentConfig& config, const nn::Critic& critic, Rng& rng) {
    if (config.refine_threshold) return *config.refine_threshold;
    const Matrix2D reals = eval::sample_mixture(config.mixture, config.threshold_samples, rng);
    return collab::compute_threshold(critic, reals);
}

std::vector<SampleRecord> plain_records(const Matrix2D& x, std::span<const double> scores, Method method) {
    std::vector<SampleRecord> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = {x(i, 0), x(i, 1), method, 0, scores[i], true};
    return out;
}

void check_pair(const nn::Mlp& generator, const nn::Mlp& discriminator) {
    if (generator.output_dim() != discriminator.input_dim())
        throw std::runtime_error(fmt::format("generator output width {} does not match discriminator input width {}",
                                             generator.output_dim(), discriminator.input_dim()));
    if (generator.output_dim() != 2)
        throw std::runtime_error(fmt::format("generator output width {} is not 2", generator.output_dim()));
}

json metrics_json(const eval::MethodMetrics& m) {
    json j;
    j["n"] = m.n;
    j["good_fraction"] = m.good_fraction;
    j["kl_good"] = m.kl_good ? json(*m.kl_good) : json(nullptr);
    j["js_augmented"] = m.js_augmented;
    j["mode_counts"] = m.histogram.counts;
    return j;
}

}  // namespace

nn::Mlp load_model(const fs::path& path, std::string_view name) {
    const nn::Checkpoint ckpt = nn::load_checkpoint(path);
    if (!ckpt.contains(name))
        throw nn::CheckpointError(fmt::format("checkpoint '{}': no model named '{}'", path.string(), name));
    return ckpt.get(name);
}

SampleRun sample_method(const ExperimentConfig& config, Method method, const nn::Mlp& generator,
                        const nn::Mlp& discriminator, std::size_t n, Rng& rng) {
    require(n > 0, "sample: n must be positive");
    check_pair(generator, discriminator);
    const nn::MlpCritic critic(discriminator);
    SampleRun run;
    switch (method) {
        case Method::Real: {
            const Matrix2D x = eval::sample_mixture(config.mixture, n, rng);
            run.records = plain_records(x, critic.scores(x), method);
            run.stats = {n, n, false};
            break;
        }
        case Method::Gan: {
            const Matrix2D x = gan::propose_samples(generator, n, rng).samples;
            run.records = plain_records(x, critic.scores(x), method);
            run.stats = {n, n, false};
            break;
        }
        case Method::Drs: {
            mc::DrsConfig dc;
            dc.gamma = config.samplers.gamma;
            dc.pilot_size = config.samplers.pilot_size;
            dc.budget_factor = config.samplers.budget_factor;
            const mc::DrsResult r = mc::drs_sample(mc::generator_proposer(generator), critic, dc, n, rng);
            run.records = plain_records(r.samples, r.scores, method);
            run.stats = r.stats;
            break;
        }
        case Method::Mh: {
            const mc::ChainResult r =
                mc::mh_sample(mc::generator_proposer(generator), critic, config.samplers.mh_chain_length, n, rng);
            run.records = plain_records(r.samples, r.scores, method);
            for (std::size_t i = 0; i < n; ++i) run.records[i].accepted = r.accepted[i];
            run.stats = r.stats;
            break;
        }
        case Method::Refine:
        case Method::Collab: {
            collab::RefinementConfig rc = config.refine;
            rc.threshold = resolve_threshold(config, critic, rng);
            run.threshold = rc.threshold;
            const Matrix2D latents = gan::sample_latents(n, generator.input_dim(), rng);
            const collab::RefinementResult refined = collab::refine_batch(generator, critic, rc, latents, rng);
            std::vector<double> scores(n);
            for (std::size_t i = 0; i < n; ++i) scores[i] = refined.traces[i].final_score;
            if (method == Method::Refine) {
                run.records = plain_records(refined.refined, scores, method);
                for (std::size_t i = 0; i < n; ++i) run.records[i].step_count = refined.traces[i].steps;
                run.stats = {n, n, false};
            } else {
                const mc::ChainResult chain = mc::collab_reject(refined.refined, scores, rng);
                run.records = plain_records(chain.samples, chain.scores, method);
                for (std::size_t i = 0; i < n; ++i) {
                    run.records[i].step_count = refined.traces[chain.states[i]].steps;
                    run.records[i].accepted = chain.accepted[i];
                }
                run.stats = chain.stats;
            }
            break;
        }
    }
    return run;
}

eval::CategoricalHist reference_histogram(const ExperimentConfig& config, Rng& rng) {
    return eval::histogram_of(eval::sample_mixture(config.mixture, config.eval_samples, rng), config.mixture);
}

DiagnosisTable diagnose_discriminators(const ExperimentConfig& config, const nn::Mlp& generator,
                                       const std::vector<std::pair<std::string, nn::Mlp>>& discriminators, Rng& rng) {
    require(!discriminators.empty(), "diagnose: no discriminators");
    const eval::CategoricalHist real_hist = reference_histogram(config, rng);
    const Matrix2D held_out = eval::sample_mixture(config.mixture, config.eval_samples, rng);
    const Matrix2D plain = gan::propose_samples(generator, config.eval_samples, rng).samples;
    // Every discriminator sees the same proposals and uniforms.
    const std::uint64_t mh_seed = rng();

    DiagnosisTable table;
    table.baseline = eval::evaluate_method(plain, config.mixture, real_hist);
    for (const auto& [label, d] : discriminators) {
        check_pair(generator, d);
        const nn::MlpCritic critic(d);
        DiagnosisRow row;
        row.label = label;
        row.report = eval::diagnose(critic, held_out, plain, config.ece_bins);
        Rng mh_rng(mh_seed);
        const mc::ChainResult mh = mc::mh_sample(mc::generator_proposer(generator), critic,
                                                 config.samplers.mh_chain_length, config.eval_samples, mh_rng);
        row.mh = eval::evaluate_method(mh.samples, config.mixture, real_hist);
        row.delta_good = row.mh.good_fraction - table.baseline.good_fraction;
        row.delta_kl = row.mh.kl_good && table.baseline.kl_good ? *row.mh.kl_good - *table.baseline.kl_good : kNaN;
        row.delta_js = row.mh.js_augmented - table.baseline.js_augmented;
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<CorrelationRow> correlate_diagnostics(const std::vector<DiagnosisRow>& rows) {
    require(rows.size() >= 3, "correlate_diagnostics: at least 3 checkpoints are required");

    const std::pair<const char*, double eval::DiagnosisReport::*> diagnostics[] = {
        {"brier", &eval::DiagnosisReport::brier},
        {"z", &eval::DiagnosisReport::z_statistic},
        {"ece", &eval::DiagnosisReport::ece}};
    const std::pair<const char*, double DiagnosisRow::*> gains[] = {{"delta_good", &DiagnosisRow::delta_good},
                                                                    {"delta_kl", &DiagnosisRow::delta_kl},
                                                                    {"delta_js", &DiagnosisRow::delta_js}};
    std::vector<CorrelationRow> out;
    for (const auto& [dname, dfield] : diagnostics) {
        for (const auto& [gname, gfield] : gains) {
            std::vector<double> xs, ys;
            for (const DiagnosisRow& r : rows) {
                xs.push_back(r.report.*dfield);
                ys.push_back(r.*gfield);
            }
            CorrelationRow c{dname, gname, std::nullopt, {}};
            if (std::any_of(ys.begin(), ys.end(), [](double v) { return std::isnan(v); })) {
                c.skipped = "undefined for a checkpoint without good samples";
            } else {
                c.value = eval::correlate(xs, ys);
            }
            out.push_back(std::move(c));
        }
    }
    return out;
}

std::vector<AblationRow> layer_ablation(const ExperimentConfig& config, const nn::Mlp& generator,
                                        const nn::Mlp& discriminator, const std::vector<std::size_t>& layers,
                                        Rng& rng) {
    require(!layers.empty(), "ablation: no layers requested");
    check_pair(generator, discriminator);
    const nn::MlpCritic critic(discriminator);
    const eval::CategoricalHist real_hist = reference_histogram(config, rng);
    collab::RefinementConfig rc = config.refine;
    rc.threshold = resolve_threshold(config, critic, rng);
    const Matrix2D latents = gan::sample_latents(config.eval_samples, generator.input_dim(), rng);
    const std::uint64_t refine_seed = rng();

    std::vector<AblationRow> rows;
    for (std::size_t layer : layers) {
        require(layer >= 1 && layer <= generator.num_layers() + 1,
                fmt::format("ablation: layer {} outside 1..{}", layer, generator.num_layers() + 1));
        rc.layer = layer - 1;
        Rng local(refine_seed);
        const collab::RefinementResult r = collab::refine_batch(generator, critic, rc, latents, local);
        AblationRow row;
        row.layer = layer;
        row.metrics = eval::evaluate_method(r.refined, config.mixture, real_hist);
        double steps = 0.0;
        for (const auto& t : r.traces) steps += static_cast<double>(t.steps);
        row.mean_steps = steps / static_cast<double>(r.traces.size());
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<fs::path> run_train(const ExperimentConfig& config) {
    ensure_dir(config.output_dir);
    Rng rng(stage_seed(config, "train"));
    const gan::TrainResult result = gan::train_gan(config.train, config.mixture, rng);

    std::vector<fs::path> written;
    for (const auto& [iteration, pair] : result.checkpoints) {
        const fs::path path = config.output_dir / fmt::format("gan_{}.ckpt", iteration);
        nn::save_checkpoint(path, {config.seed,
                                   {{std::string(kGeneratorName), pair.generator},
                                    {std::string(kDiscriminatorName), pair.discriminator}}});
        written.push_back(path);
    }
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "iteration,d_loss,g_loss\n");
    for (const gan::TrainLogRow& r : result.log)
        fmt::format_to(std::back_inserter(buf), "{},{},{}\n", r.iteration, num(r.d_loss), num(r.g_loss));
    write_text(config.output_dir / "train_log.csv", fmt::to_string(buf));
    return written;
}

std::vector<fs::path> run_shape(const ExperimentConfig& config, const fs::path& g_path, const fs::path& d_path,
                                ShapeMode mode, const std::string& prefix) {
    require(!prefix.empty(), "shape: output prefix must not be empty");
    const nn::Mlp generator = load_model(g_path, kGeneratorName);
    const nn::Checkpoint d_file = nn::load_checkpoint(d_path);
    if (!d_file.contains(kDiscriminatorName))
        throw nn::CheckpointError(
            fmt::format("checkpoint '{}': no model named '{}'", d_path.string(), kDiscriminatorName));
    const nn::Mlp& discriminator = d_file.get(kDiscriminatorName);
    if (generator.output_dim() != discriminator.input_dim())
        throw std::runtime_error(fmt::format(
            "generator in '{}' outputs width {} but discriminator in '{}' expects width {}", g_path.string(),
            generator.output_dim(), d_path.string(), discriminator.input_dim()));

    shaping::ShapingConfig sc = config.shape;
    if (mode == ShapeMode::Standard) sc.refinement.max_steps = 0;
    ensure_dir(config.output_dir);
    Rng rng(stage_seed(config, "shape"));
    const shaping::ShapingResult result = shaping::shape_discriminator(generator, discriminator, sc, config.mixture, rng);

    std::vector<fs::path> written;
    for (const auto& [iteration, model] : result.checkpoints) {
        nn::Checkpoint out = d_file;
        for (nn::NamedModel& m : out.models)
            if (m.name == kDiscriminatorName) m.model = model;
        const fs::path path = config.output_dir / fmt::format("{}_{}.ckpt", prefix, iteration);
        nn::save_checkpoint(path, out);
        written.push_back(path);
    }
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "iteration,loss,mean_real_score,mean_fake_score,threshold\n");
    for (const shaping::ShapingLogRow& r : result.log)
        fmt::format_to(std::back_inserter(buf), "{},{},{},{},{}\n", r.iteration, num(r.loss), num(r.mean_real_score),
                       num(r.mean_refined_score), num(r.threshold));
    write_text(config.output_dir / fmt::format("{}_log.csv", prefix), fmt::to_string(buf));
    return written;
}

fs::path run_sample(const ExperimentConfig& config, Method method, const fs::path& g_path, const fs::path& d_path,
                    std::size_t n, const std::optional<fs::path>& out_file) {
    const nn::Mlp generator = load_model(g_path, kGeneratorName);
    const nn::Mlp discriminator = load_model(d_path, kDiscriminatorName);
    Rng rng(stage_seed(config, "sample/" + std::string(method_name(method))));
    const SampleRun run = sample_method(config, method, generator, discriminator, n, rng);
    const fs::path path = out_file ? *out_file : config.output_dir / fmt::format("samples_{}.csv", method_name(method));
    if (path.has_parent_path()) ensure_dir(path.parent_path());
    write_samples_csv(path, run.records);
    return path;
}

std::vector<MethodReport> run_evaluate(const ExperimentConfig& config, const std::vector<fs::path>& sample_files,
                                       const std::optional<fs::path>& d_path) {
    require(!sample_files.empty(), "evaluate: no sample files");
    std::vector<std::pair<Method, Matrix2D>> inputs;
    std::set<Method> seen;
    for (const fs::path& file : sample_files) {
        const std::vector<SampleRecord> records = read_samples_csv(file);
        const Method m = records.front().method;
        for (std::size_t i = 0; i < records.size(); ++i)
            if (records[i].method != m)
                throw std::runtime_error(fmt::format("{}:{}: method '{}' differs from '{}' on the first row",
                                                     file.string(), i + 2, method_name(records[i].method),
                                                     method_name(m)));
        if (!seen.insert(m).second)
            throw std::runtime_error(fmt::format("{}: method '{}' appears in more than one input file", file.string(),
                                                 method_name(m)));
        inputs.emplace_back(m, sample_points(records));
    }
    std::optional<nn::Mlp> discriminator;
    if (d_path) discriminator = load_model(*d_path, kDiscriminatorName);

    Rng rng(stage_seed(config, "eval"));
    const eval::CategoricalHist real_hist = reference_histogram(config, rng);
    Matrix2D held_out;
    if (discriminator) held_out = eval::sample_mixture(config.mixture, config.eval_samples, rng);

    std::vector<MethodReport> reports;
    std::vector<eval::KdeGrid> kdes;
    for (const auto& [method, points] : inputs) {
        MethodReport rep;
        rep.method = method;
        rep.metrics = eval::evaluate_method(points, config.mixture, real_hist);
        if (discriminator && method != Method::Real) {
            if (discriminator->input_dim() != 2)
                throw std::runtime_error("evaluate: discriminator input width is not 2");
            rep.diagnosis = eval::diagnose(nn::MlpCritic(*discriminator), held_out, points, config.ece_bins);
        }
        reports.push_back(std::move(rep));
        kdes.push_back(eval::kde_grid(points, config.kde_bandwidth, config.kde_grid));
    }

    json doc;
    doc["metadata"] = {{"kl_good", "KL(real || generated) over the 8 mode buckets, natural log"},
                       {"js_augmented", "Jensen-Shannon over 8 modes plus a bad bucket, log base 2"},
                       {"histogram_smoothing", eval::kHistogramSmoothing},
                       {"reference_samples", config.eval_samples},
                       {"seed", config.seed}};
    doc["methods"] = json::object();
    fmt::memory_buffer csv;
    fmt::format_to(std::back_inserter(csv), "method,n,good_fraction,kl_good,js_augmented,brier,z,ece\n");
    for (const MethodReport& r : reports) {
        json j = metrics_json(r.metrics);
        j["brier"] = r.diagnosis ? json(r.diagnosis->brier) : json(nullptr);
        j["z"] = r.diagnosis ? json(r.diagnosis->z_statistic) : json(nullptr);
        j["ece"] = r.diagnosis ? json(r.diagnosis->ece) : json(nullptr);
        doc["methods"][std::string(method_name(r.method))] = std::move(j);
        fmt::format_to(std::back_inserter(csv), "{},{},{},{},{},{},{},{}\n", method_name(r.method), r.metrics.n,
                       num(r.metrics.good_fraction), opt_num(r.metrics.kl_good), num(r.metrics.js_augmented),
                       r.diagnosis ? num(r.diagnosis->brier) : "", r.diagnosis ? num(r.diagnosis->z_statistic) : "",
                       r.diagnosis ? num(r.diagnosis->ece) : "");
    }

    ensure_dir(config.output_dir);
    write_text(config.output_dir / "metrics.json", doc.dump(2) + "\n");
    write_text(config.output_dir / "metrics.csv", fmt::to_string(csv));
    for (std::size_t i = 0; i < reports.size(); ++i) {
        std::ofstream out(config.output_dir / fmt::format("kde_{}.csv", method_name(reports[i].method)),
                          std::ios::binary);
        eval::write_kde_csv(out, kdes[i]);
        if (!out) throw std::runtime_error("failed to write KDE output");
    }
    return reports;
}

DiagnosisTable run_diagnose(const ExperimentConfig& config, const fs::path& g_path, const std::vector<fs::path>& d_paths) {
    require(!d_paths.empty(), "diagnose: no discriminator checkpoints");
    const nn::Mlp generator = load_model(g_path, kGeneratorName);
    std::vector<std::pair<std::string, nn::Mlp>> ds;
    for (const fs::path& p : d_paths) ds.emplace_back(p.filename().string(), load_model(p, kDiscriminatorName));
    if (ds.size() < 3)
        std::cerr << "warning: " << ds.size() << " discriminator checkpoint(s); at least 3 are needed, "
                  << "correlations skipped\n";

    ensure_dir(config.output_dir);
    Rng rng(stage_seed(config, "diagnose"));
    DiagnosisTable table = diagnose_discriminators(config, generator, ds, rng);

    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf),
                   "checkpoint,brier,z,ece,good_fraction_mh,kl_good_mh,js_augmented_mh,delta_good,delta_kl,delta_js\n");
    for (const DiagnosisRow& r : table.rows)
        fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{},{},{},{}\n", r.label, num(r.report.brier),
                       num(r.report.z_statistic), num(r.report.ece), num(r.mh.good_fraction), opt_num(r.mh.kl_good),
                       num(r.mh.js_augmented), num(r.delta_good), num(r.delta_kl), num(r.delta_js));
    write_text(config.output_dir / "diagnosis.csv", fmt::to_string(buf));

    // Each column rescaled to [0, 1] across checkpoints for side-by-side curves.
    const std::vector<std::pair<const char*, std::function<double(const DiagnosisRow&)>>> columns = {
        {"brier", [](const DiagnosisRow& r) { return r.report.brier; }},
        {"z", [](const DiagnosisRow& r) { return r.report.z_statistic; }},
        {"ece", [](const DiagnosisRow& r) { return r.report.ece; }},
        {"delta_good", [](const DiagnosisRow& r) { return r.delta_good; }},
        {"delta_kl", [](const DiagnosisRow& r) { return r.delta_kl; }},
        {"delta_js", [](const DiagnosisRow& r) { return r.delta_js; }}};
    std::vector<std::vector<double>> normalized;
    for (const auto& [name, get] : columns) {
        std::vector<double> col;
        for (const DiagnosisRow& r : table.rows) col.push_back(get(r));
        const bool has_nan = std::any_of(col.begin(), col.end(), [](double v) { return std::isnan(v); });
        normalized.push_back(has_nan ? std::vector<double>(col.size(), kNaN) : eval::normalize_unit(col));
    }
    fmt::memory_buffer nbuf;
    fmt::format_to(std::back_inserter(nbuf), "checkpoint");
    for (const auto& c : columns) fmt::format_to(std::back_inserter(nbuf), ",{}", c.first);
    fmt::format_to(std::back_inserter(nbuf), "\n");
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        fmt::format_to(std::back_inserter(nbuf), "{}", table.rows[i].label);
        for (const auto& col : normalized) fmt::format_to(std::back_inserter(nbuf), ",{}", num(col[i]));
        fmt::format_to(std::back_inserter(nbuf), "\n");
    }
    write_text(config.output_dir / "diagnosis_normalized.csv", fmt::to_string(nbuf));

    if (table.rows.size() >= 3) {
        table.correlations = correlate_diagnostics(table.rows);
        fmt::memory_buffer cbuf;
        fmt::format_to(std::back_inserter(cbuf), "diagnostic,gain,pearson,pearson_p,spearman,spearman_p,note\n");
        for (const CorrelationRow& c : table.correlations) {
            if (c.value)
                fmt::format_to(std::back_inserter(cbuf), "{},{},{},{},{},{},\n", c.diagnostic, c.gain,
                               num(c.value->pearson), num(c.value->pearson_p), num(c.value->spearman),
                               num(c.value->spearman_p));
            else
                fmt::format_to(std::back_inserter(cbuf), "{},{},,,,,{}\n", c.diagnostic, c.gain, c.skipped);
        }
        write_text(config.output_dir / "correlation.csv", fmt::to_string(cbuf));
    }
    return table;
}

std::vector<AblationRow> run_ablation(const ExperimentConfig& config, const fs::path& g_path, const fs::path& d_path,
                                      const std::vector<std::size_t>& layers) {
    const nn::Mlp generator = load_model(g_path, kGeneratorName);
    const nn::Mlp discriminator = load_model(d_path, kDiscriminatorName);
    Rng rng(stage_seed(config, "ablation"));
    const std::vector<AblationRow> rows = layer_ablation(config, generator, discriminator, layers, rng);
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "layer,good_fraction,kl_good,js_augmented,mean_steps\n");
    for (const AblationRow& r : rows)
        fmt::format_to(std::back_inserter(buf), "{},{},{},{},{}\n", r.layer, num(r.metrics.good_fraction),
                       opt_num(r.metrics.kl_good), num(r.metrics.js_augmented), num(r.mean_steps));
    ensure_dir(config.output_dir);
    write_text(config.output_dir / "ablation.csv", fmt::to_string(buf));
    return rows;
}

}  // namespace cgs::experiment
