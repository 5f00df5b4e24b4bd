#include "cgs/eval/diagnostics.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "cgs/errors.hpp"

namespace cgs::eval {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels, const char* who) {
    require(scores.size() == labels.size(), std::string(who) + ": scores and labels differ in length");
    require(!scores.empty(), std::string(who) + ": no samples");
    for (std::size_t i = 0; i < scores.size(); ++i) {
        require(labels[i] == 0 || labels[i] == 1, std::string(who) + ": labels must be 0 or 1");
        require(scores[i] >= 0.0 && scores[i] <= 1.0, std::string(who) + ": scores must lie in [0, 1]");
    }
}

std::size_t bin_of(double score, std::size_t bins) {
    const auto b = static_cast<std::size_t>(score * static_cast<double>(bins));
    return b >= bins ? bins - 1 : b;
}

struct Bin {
    std::size_t count = 0;
    double score_sum = 0.0;
    double label_sum = 0.0;
};

std::vector<Bin> bin_up(std::span<const double> scores, std::span<const int> labels, std::size_t bins) {
    std::vector<Bin> out(bins);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        Bin& b = out[bin_of(scores[i], bins)];
        ++b.count;
        b.score_sum += scores[i];
        b.label_sum += labels[i];
    }
    return out;
}

}  // namespace

double brier_score(std::span<const double> scores, std::span<const int> labels) {
    check_inputs(scores, labels, "brier_score");
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double r = labels[i] - scores[i];
        sum += r * r;
    }
    return sum / static_cast<double>(scores.size());
}

BrierDecomposition brier_decomposition(std::span<const double> scores, std::span<const int> labels, std::size_t bins) {
    check_inputs(scores, labels, "brier_decomposition");
    require(bins >= 1, "brier_decomposition: need at least one bin");
    const double n = static_cast<double>(scores.size());
    double base = 0.0;
    for (int y : labels) base += y;
    base /= n;

    const auto grouped = bin_up(scores, labels, bins);
    BrierDecomposition d;
    d.uncertainty = base * (1.0 - base);
    for (const Bin& b : grouped) {
        if (b.count == 0) continue;
        const double nb = static_cast<double>(b.count);
        const double f = b.score_sum / nb;
        const double o = b.label_sum / nb;
        d.reliability += nb * (f - o) * (f - o);
        d.resolution += nb * (o - base) * (o - base);
    }
    d.reliability /= n;
    d.resolution /= n;

    // Direct evaluation with forecasts replaced by bin means.
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const Bin& b = grouped[bin_of(scores[i], bins)];
        const double r = labels[i] - b.score_sum / static_cast<double>(b.count);
        d.grouped_brier += r * r;
    }
    d.grouped_brier /= n;
    return d;
}

double z_statistic(std::span<const double> scores, std::span<const int> labels) {
    check_inputs(scores, labels, "z_statistic");
    double num = 0.0, var = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        num += labels[i] - scores[i];
        var += scores[i] * (1.0 - scores[i]);
    }
    require(var > 0.0, "z_statistic: degenerate denominator (all scores are exactly 0 or 1)");
    return num / std::sqrt(var);
}

double ece(std::span<const double> scores, std::span<const int> labels, std::size_t bins) {
    check_inputs(scores, labels, "ece");
    require(bins >= 1, "ece: need at least one bin");
    const double n = static_cast<double>(scores.size());
    double total = 0.0;
    for (const Bin& b : bin_up(scores, labels, bins)) {
        if (b.count == 0) continue;
        const double nb = static_cast<double>(b.count);
        total += (nb / n) * std::abs(b.label_sum / nb - b.score_sum / nb);
    }
    return total;
}

DiagnosisReport diagnose(std::span<const double> scores, std::span<const int> labels, std::size_t ece_bins) {
    DiagnosisReport r;
    r.brier = brier_score(scores, labels);
    r.z_statistic = z_statistic(scores, labels);
    r.ece = ece(scores, labels, ece_bins);
    r.n = scores.size();
    return r;
}

DiagnosisReport diagnose(const nn::Critic& critic, const Matrix2D& reals, const Matrix2D& fakes, std::size_t ece_bins) {
    std::vector<double> scores = critic.scores(reals);
    const std::vector<double> fake_scores = critic.scores(fakes);
    scores.insert(scores.end(), fake_scores.begin(), fake_scores.end());
    std::vector<int> labels(reals.rows(), 1);
    labels.resize(scores.size(), 0);
    return diagnose(scores, labels, ece_bins);
}

}  // namespace cgs::eval
