#include "cgs/collab/refine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cgs/errors.hpp"

namespace cgs::collab {

void RefinementConfig::validate() const {
    require(step_size > 0.0 && std::isfinite(step_size), "refine.step_size must be positive");
    require(threshold > 0.0 && threshold < 1.0, "refine.threshold must lie in (0, 1)");
    if (termination == Termination::Probabilistic)
        require(stop_prob > 0.0 && stop_prob <= 1.0, "refine.stop_prob must lie in (0, 1]");
    require(divergence_limit > 0.0, "refine.divergence_limit must be positive");
}

std::size_t resolve_layer(std::size_t layer, const nn::Mlp& generator) {
    const std::size_t L = generator.num_layers();
    if (layer == kDataSpace) return L;
    if (layer == kMiddleLayer) return (L + 1) / 2 - 1;
    require(layer <= L, "refine: layer " + std::to_string(layer) + " exceeds generator depth " + std::to_string(L));
    return layer;
}

std::string_view stop_reason_name(StopReason reason) {
    switch (reason) {
        case StopReason::ThresholdMet: return "threshold_met";
        case StopReason::MaxSteps: return "max_steps";
        case StopReason::ProbabilisticStop: return "probabilistic_stop";
        case StopReason::Diverged: return "diverged";
    }
    return "unknown";
}

double median(std::vector<double> values) {
    require(!values.empty(), "median: empty input");
    const std::size_t n = values.size();
    std::sort(values.begin(), values.end());
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double compute_threshold(const nn::Critic& critic, const Matrix2D& reals) {
    require(reals.rows() > 0, "compute_threshold: no real samples");
    return median(critic.scores(reals));
}

namespace {

/// Per-sample loss gradients: row i is d(-log D(G_tail(x_i)))/dx_i.
struct SampleGradients {
    Matrix2D output;
    std::vector<double> logits;
    Matrix2D grad;
};

// d(-log sigmoid(F))/dF
double neg_log_score_seed(double logit) { return -nn::sigmoid(-logit); }

SampleGradients per_sample_gradients(const nn::ForwardTrace& tail, const nn::Critic& critic) {
    nn::CriticEval ev = critic.evaluate_with_gradient(tail.output, neg_log_score_seed);
    SampleGradients out;
    out.grad = nn::backward(tail, ev.gradient, nn::BackwardMode::InputOnly).input;
    out.logits = std::move(ev.logits);
    out.output = tail.output;
    return out;
}

void check_models(const nn::Mlp& generator, const nn::Critic& critic) {
    require(generator.num_layers() > 0, "refine: empty generator");
    require(critic.input_dim() == generator.output_dim(),
            "refine: critic input width " + std::to_string(critic.input_dim()) + " does not match generator output " +
                std::to_string(generator.output_dim()));
}

bool row_ok(std::span<const double> row, double limit) {
    return std::all_of(row.begin(), row.end(), [&](double v) { return std::isfinite(v) && std::abs(v) <= limit; });
}

}  // namespace

Matrix2D grad_wrt_activation(const nn::Mlp& generator, const nn::Critic& critic, std::size_t layer,
                             const Matrix2D& activation) {
    check_models(generator, critic);
    const std::size_t l = resolve_layer(layer, generator);
    require(activation.rows() > 0, "grad_wrt_activation: empty batch");
    const nn::ForwardTrace tail = nn::forward_from(generator, l, activation);
    Matrix2D grad = per_sample_gradients(tail, critic).grad;
    const double n = static_cast<double>(activation.rows());
    for (double& v : grad.values()) v /= n;
    return grad;
}

RefinementResult refine_batch(const nn::Mlp& generator, const nn::Critic& critic, const RefinementConfig& config,
                              const Matrix2D& latents, Rng& rng) {
    config.validate();
    check_models(generator, critic);
    require(latents.cols() == generator.input_dim(),
            "refine: latent width " + std::to_string(latents.cols()) + " does not match generator input " +
                std::to_string(generator.input_dim()));
    const std::size_t layer = resolve_layer(config.layer, generator);
    const std::size_t n = latents.rows();

    RefinementResult res;
    {
        const nn::ForwardTrace head = nn::forward(generator, latents);
        res.activations = layer < generator.num_layers() ? head.inputs[layer] : head.output;
    }
    res.refined = Matrix2D(n, generator.output_dim());
    res.traces.resize(n);
    Matrix2D& xl = res.activations;
    Matrix2D previous = xl;

    std::vector<std::size_t> active(n);
    for (std::size_t i = 0; i < n; ++i) active[i] = i;

    for (std::size_t k = 0; !active.empty(); ++k) {
        const bool last = k == config.max_steps;
        const nn::ForwardTrace tail = nn::forward_from(generator, layer, xl.select_rows(active));
        SampleGradients eval;
        if (last) {
            eval.logits = critic.logits(tail.output);
            eval.output = tail.output;
        } else {
            eval = per_sample_gradients(tail, critic);
        }

        std::vector<std::size_t> still_active;
        for (std::size_t p = 0; p < active.size(); ++p) {
            const std::size_t i = active[p];
            RefinementTrace& tr = res.traces[i];
            const auto out_row = eval.output.row(p);
            if (k > 0 && !row_ok(out_row, config.divergence_limit)) {
                // The last update pushed the output out of range: undo it.
                std::copy(previous.row(i).begin(), previous.row(i).end(), xl.row(i).begin());
                --tr.steps;
                tr.reason = StopReason::Diverged;
                ++res.diverged;
                continue;
            }
            const double score = nn::clamp_score(nn::sigmoid(eval.logits[p]));
            std::copy(out_row.begin(), out_row.end(), res.refined.row(i).begin());
            tr.final_score = score;
            tr.final_point.assign(out_row.begin(), out_row.end());
            if (k == 0) {
                tr.initial_score = score;
                tr.initial_point = tr.final_point;
            }
            if (score >= config.threshold) {
                tr.reason = StopReason::ThresholdMet;
                continue;
            }
            if (last) {
                tr.reason = StopReason::MaxSteps;
                continue;
            }
            if (config.termination == Termination::Probabilistic && uniform01(rng) < config.stop_prob) {
                tr.reason = StopReason::ProbabilisticStop;
                continue;
            }
            auto row = xl.row(i);
            auto grad = eval.grad.row(p);
            std::vector<double> next(row.size());
            for (std::size_t j = 0; j < row.size(); ++j) next[j] = row[j] - config.step_size * grad[j];
            if (!row_ok(next, config.divergence_limit)) {
                tr.reason = StopReason::Diverged;
                ++res.diverged;
                continue;
            }
            std::copy(row.begin(), row.end(), previous.row(i).begin());
            std::copy(next.begin(), next.end(), row.begin());
            ++tr.steps;
            still_active.push_back(i);
        }
        active = std::move(still_active);
    }
    return res;
}

}  // namespace cgs::collab
