#include "cgs/mc/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>


#include "cgs/errors.hpp"

namespace cgs::mc {

double density_ratio(double score) noexcept {
    const double d = nn::clamp_score(score);
    return d / (1.0 - d);
}

double mh_acceptance(double current_score, double proposal_score) noexcept {
    const double x = nn::clamp_score(current_score);
    const double y = nn::clamp_score(proposal_score);
    return std::min(1.0, (y / x) * ((1.0 - x) / (1.0 - y)));
}

double drs_acceptance(double logit, double max_logit, double gamma, double epsilon) noexcept {
    const double shifted = logit - max_logit;
    const double adjusted = shifted - std::log1p(-std::exp(shifted - epsilon)) - gamma;
    return nn::sigmoid(adjusted);
}

DensityRatioOracle::DensityRatioOracle(std::size_t dim, LogDensity log_target, LogDensity log_proposal)
    : dim_(dim), log_target_(std::move(log_target)), log_proposal_(std::move(log_proposal)) {
    require(dim_ > 0, "DensityRatioOracle: dimension must be positive");
}

std::vector<double> DensityRatioOracle::logits(const Matrix2D& x) const {
    require(x.cols() == dim_, "DensityRatioOracle: input width mismatch");
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = log_target_(x.row(i)) - log_proposal_(x.row(i));
    return out;
}

nn::CriticEval DensityRatioOracle::evaluate_with_gradient(const Matrix2D& x,
                                                         const std::function<double(double)>& seed) const {
    nn::CriticEval ev;
    ev.logits = logits(x);
    ev.gradient = Matrix2D(x.rows(), dim_);
    constexpr double h = 1e-6;
    std::vector<double> point(dim_);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double s = seed(ev.logits[i]);
        for (std::size_t j = 0; j < dim_; ++j) {
            std::copy(x.row(i).begin(), x.row(i).end(), point.begin());
            point[j] += h;
            const double up = log_target_(point) - log_proposal_(point);
            point[j] -= 2 * h;
            const double down = log_target_(point) - log_proposal_(point);
            ev.gradient(i, j) = s * (up - down) / (2 * h);
        }
    }
    return ev;
}

Proposer generator_proposer(const nn::Mlp& generator) {
    return [&generator](std::size_t n, Rng& rng) {
        std::normal_distribution<double> normal(0.0, 1.0);
        Matrix2D z(n, generator.input_dim());
        for (double& v : z.values()) v = normal(rng);
        return nn::predict(generator, z);
    };
}

DrsResult drs_sample(const Proposer& propose, const nn::Critic& critic, const DrsConfig& config, std::size_t n,
                     Rng& rng) {
    require(std::isfinite(config.gamma), "drs: gamma must be finite");
    require(config.pilot_size >= 100, "drs: pilot_size must be at least 100");
    require(config.chunk > 0 && config.budget_factor > 0, "drs: chunk and budget_factor must be positive");

    DrsResult res;
    res.samples = Matrix2D(0, critic.input_dim());
    const std::vector<double> pilot = critic.logits(propose(config.pilot_size, rng));
    res.max_logit = *std::max_element(pilot.begin(), pilot.end());

    const std::size_t budget = config.budget_factor * n;
    while (res.stats.accepted < n && res.stats.proposals < budget) {
        const std::size_t want = std::min(config.chunk, budget - res.stats.proposals);
        const Matrix2D batch = propose(want, rng);
        const std::vector<double> logits = critic.logits(batch);
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < want && res.stats.accepted < n; ++i) {
            ++res.stats.proposals;
            res.max_logit = std::max(res.max_logit, logits[i]);
            const double p = drs_acceptance(logits[i], res.max_logit, config.gamma, config.epsilon);
            if (uniform01(rng) < p) {
                keep.push_back(i);
                res.scores.push_back(nn::clamp_score(nn::sigmoid(logits[i])));
                ++res.stats.accepted;
            }
        }
        res.samples.append_rows(batch.select_rows(keep));
    }
    if (res.stats.accepted < n) {
        res.stats.budget_exhausted = true;
        std::cerr << "warning: drs proposal budget of " << budget << " exhausted with " << res.stats.accepted << " of "
                  << n << " samples accepted\n";
    }
    return res;
}

ChainResult mh_sample(const Proposer& propose, const nn::Critic& critic, std::size_t k, std::size_t n, Rng& rng) {
    require(k >= 1, "mh: chain length k must be at least 1");
    const std::size_t per_chain = k + 1;
    const Matrix2D proposals = propose(per_chain * n, rng);
    const std::vector<double> scores = critic.scores(proposals);

    ChainResult res;
    res.samples = Matrix2D(n, proposals.cols());
    res.scores.resize(n);
    res.accepted.assign(n, false);
    res.states.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t state = c * per_chain;
        ++res.stats.proposals;
        for (std::size_t t = 1; t < per_chain; ++t) {
            const std::size_t candidate = c * per_chain + t;
            ++res.stats.proposals;
            if (uniform01(rng) < mh_acceptance(scores[state], scores[candidate])) {
                state = candidate;
                ++res.stats.accepted;
                res.accepted[c] = true;
            }
        }
        std::copy(proposals.row(state).begin(), proposals.row(state).end(), res.samples.row(c).begin());
        res.scores[c] = scores[state];
        res.states[c] = state;
    }
    return res;
}

ChainResult collab_reject(const Matrix2D& stream, std::span<const double> scores, Rng& rng) {
    require(stream.rows() > 0, "collab_reject: empty stream");
    require(scores.size() == stream.rows(), "collab_reject: one score per sample is required");
    ChainResult res;
    res.samples = Matrix2D(stream.rows(), stream.cols());
    res.scores.resize(stream.rows());
    res.accepted.assign(stream.rows(), false);
    res.states.resize(stream.rows());
    std::size_t state = 0;
    res.accepted[0] = true;
    res.stats.proposals = stream.rows();
    res.stats.accepted = 1;
    for (std::size_t t = 0; t < stream.rows(); ++t) {
        if (t > 0 && uniform01(rng) < mh_acceptance(scores[state], scores[t])) {
            state = t;
            res.accepted[t] = true;
            ++res.stats.accepted;
        }
        std::copy(stream.row(state).begin(), stream.row(state).end(), res.samples.row(t).begin());
        res.scores[t] = scores[state];
        res.states[t] = state;
    }
    return res;
}

}  // namespace cgs::mc
