#include "cgs/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cgs/errors.hpp"

namespace cgs::eval {

std::size_t CategoricalHist::total() const noexcept { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

std::size_t CategoricalHist::good_total() const noexcept { return total() - counts[kBad]; }

std::vector<Classification> classify_good(const Matrix2D& samples, const MixtureSpec& spec) {
    require(samples.cols() == 2, "classify_good: samples must be 2-D");
    const double limit = 4.0 * spec.stddev;
    std::vector<Classification> out(samples.rows());
    for (std::size_t i = 0; i < samples.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < spec.centers.size(); ++k) {
            const double d = std::hypot(samples(i, 0) - spec.centers[k][0], samples(i, 1) - spec.centers[k][1]);
            if (d < best) {
                best = d;
                out[i].nearest_mode = k;
            }
        }
        out[i].good = best < limit;
    }
    return out;
}

CategoricalHist histogram_of(const Matrix2D& samples, const MixtureSpec& spec) {
    CategoricalHist h;
    for (const auto& c : classify_good(samples, spec)) ++h.counts[c.good ? c.nearest_mode : CategoricalHist::kBad];
    return h;
}

namespace {

std::vector<double> normalize_smoothed(std::span<const double> w, double alpha) {
    double total = 0.0;
    for (double v : w) {
        require(v >= 0.0 && std::isfinite(v), "divergence: weights must be finite and non-negative");
        total += v;
    }
    require(total > 0.0, "divergence: empty histogram");
    std::vector<double> p(w.size());
    double renorm = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) renorm += p[i] = w[i] / total + alpha;
    for (double& v : p) v /= renorm;
    return p;
}

std::vector<double> to_weights(const CategoricalHist& h, std::size_t buckets) {
    std::vector<double> w(buckets);
    for (std::size_t i = 0; i < buckets; ++i) w[i] = static_cast<double>(h.counts[i]);
    return w;
}

}  // namespace

double kl_divergence(std::span<const double> p_raw, std::span<const double> q_raw, double alpha) {
    require(p_raw.size() == q_raw.size() && !p_raw.empty(), "kl_divergence: size mismatch");
    const auto p = normalize_smoothed(p_raw, alpha);
    const auto q = normalize_smoothed(q_raw, alpha);
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) kl += p[i] * std::log(p[i] / q[i]);
    return std::max(kl, 0.0);
}

double js_divergence(std::span<const double> p_raw, std::span<const double> q_raw, double alpha) {
    require(p_raw.size() == q_raw.size() && !p_raw.empty(), "js_divergence: size mismatch");
    const auto p = normalize_smoothed(p_raw, alpha);
    const auto q = normalize_smoothed(q_raw, alpha);
    double js = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        js += 0.5 * p[i] * std::log2(p[i] / m) + 0.5 * q[i] * std::log2(q[i] / m);
    }
    return std::clamp(js, 0.0, 1.0);
}

double kl_categorical(const CategoricalHist& p, const CategoricalHist& q, double alpha) {
    require(p.good_total() > 0 && q.good_total() > 0, "kl_categorical: histogram has no good samples");
    return kl_divergence(to_weights(p, CategoricalHist::kModes), to_weights(q, CategoricalHist::kModes), alpha);
}

double js_augmented(const CategoricalHist& real, const CategoricalHist& generated, double alpha) {
    require(real.total() > 0 && generated.total() > 0, "js_augmented: empty histogram");
    return js_divergence(to_weights(real, 9), to_weights(generated, 9), alpha);
}

MethodMetrics evaluate_method(const Matrix2D& samples, const MixtureSpec& spec, const CategoricalHist& real) {
    require(samples.rows() > 0, "evaluate_method: no samples");
    MethodMetrics m;
    m.n = samples.rows();
    m.histogram = histogram_of(samples, spec);
    m.good_fraction = static_cast<double>(m.histogram.good_total()) / static_cast<double>(m.n);
    if (m.histogram.good_total() > 0) m.kl_good = kl_categorical(real, m.histogram);
    m.js_augmented = js_augmented(real, m.histogram);
    return m;
}

}  // namespace cgs::eval
