#include "cgs/eval/correlate.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>

#include "cgs/errors.hpp"

namespace cgs::eval {

namespace {

double pearson_of(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    require(sxx > 0.0 && syy > 0.0, "correlate: undefined correlation (a series has zero variance)");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double two_sided_p(double r, std::size_t n) {
    const double df = static_cast<double>(n) - 2.0;
    if (std::abs(r) >= 1.0) return 0.0;
    const double t = r * std::sqrt(df / (1.0 - r * r));
    boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

Correlation correlate(std::span<const double> xs, std::span<const double> ys) {
    require(xs.size() == ys.size(), "correlate: series differ in length");
    require(xs.size() >= 3, "correlate: need at least 3 points");
    Correlation c;
    c.pearson = pearson_of(xs, ys);
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    c.spearman = pearson_of(rx, ry);
    c.pearson_p = two_sided_p(c.pearson, xs.size());
    c.spearman_p = two_sided_p(c.spearman, xs.size());
    return c;
}

std::vector<double> normalize_unit(std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    if (out.empty()) return out;
    const auto [lo, hi] = std::minmax_element(out.begin(), out.end());
    const double a = *lo, span = *hi - *lo;
    for (double& v : out) v = span > 0.0 ? (v - a) / span : 0.0;
    return out;
}

}  // namespace cgs::eval
