#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "cgs/errors.hpp"
#include "cgs/eval/correlate.hpp"
#include "cgs/eval/diagnostics.hpp"
#include "cgs/eval/kde.hpp"
#include "cgs/eval/metrics.hpp"
#include "cgs/eval/mixture.hpp"

using namespace cgs;
using eval::CategoricalHist;

namespace {

/// Mixture with easily representable geometry for boundary checks.
eval::MixtureSpec grid_mixture() {
    eval::MixtureSpec s;
    s.stddev = 0.25;
    for (int k = 0; k < 8; ++k) s.centers.push_back({10.0 * k, 0.0});
    s.weights.assign(8, 0.125);
    return s;
}

std::vector<double> smoothed(std::span<const double> w, double alpha) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<double> p;
    for (double x : w) p.push_back(x / total + alpha);
    const double z = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& x : p) x /= z;
    return p;
}

CategoricalHist hist(std::initializer_list<std::size_t> counts) {
    CategoricalHist h;
    std::copy(counts.begin(), counts.end(), h.counts.begin());
    return h;
}

std::vector<double> mode_weights(const CategoricalHist& h, std::size_t k) {
    return {h.counts.begin(), h.counts.begin() + static_cast<std::ptrdiff_t>(k)};
}

CategoricalHist random_hist(Rng& rng) {
    CategoricalHist h;
    for (auto& c : h.counts) c = 1 + rng() % 500;
    return h;
}

}  // namespace

TEST_CASE("default mixture layout") {
    const eval::MixtureSpec s = eval::default_mixture();
    CHECK(s.num_modes() == 8);
    CHECK(s.stddev == 0.05);
    CHECK(std::accumulate(s.weights.begin(), s.weights.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::count(s.weights.begin(), s.weights.end(), 0.45) == 2);
    CHECK(s.weights[0] == 0.45);
    CHECK(s.weights[4] == 0.45);
    for (std::size_t k = 0; k < 8; ++k) {
        CHECK(std::hypot(s.centers[k][0], s.centers[k][1]) == doctest::Approx(2.0).epsilon(1e-14));
        const auto& a = s.centers[k];
        const auto& b = s.centers[(k + 1) % 8];
        const double cosang = (a[0] * b[0] + a[1] * b[1]) / 4.0;
        CHECK(std::acos(std::clamp(cosang, -1.0, 1.0)) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-12));
    }
    CHECK(s.centers[0][0] == doctest::Approx(-s.centers[4][0]).epsilon(1e-14));
}

TEST_CASE("mixture validation") {
    eval::MixtureSpec s = eval::default_mixture();
    s.weights[0] += 1e-9;
    CHECK_THROWS_AS(s.validate(), ContractError);
    s = eval::default_mixture();
    s.centers[1] = s.centers[2];
    CHECK_THROWS_AS(s.validate(), ContractError);
    s = eval::default_mixture();
    s.stddev = 0.0;
    CHECK_THROWS_AS(s.validate(), ContractError);
    s = eval::default_mixture();
    s.centers.pop_back();
    s.weights.pop_back();
    CHECK_THROWS_AS(s.validate(), ContractError);
}

TEST_CASE("mixture sampling") {
    const eval::MixtureSpec s = eval::default_mixture();
    Rng rng(1);
    CHECK(eval::sample_mixture(s, 0, rng).rows() == 0);
    Rng a(2), b(2);
    CHECK(bit_equal(eval::sample_mixture(s, 50, a), eval::sample_mixture(s, 50, b)));

    const std::size_t n = 10000;
    std::vector<std::size_t> comp;
    const Matrix2D x = eval::sample_mixture(s, n, rng, comp);
    std::array<std::size_t, 8> counts{};
    for (std::size_t c : comp) ++counts[c];
    for (std::size_t k = 0; k < 8; ++k) {
        const double w = s.weights[k];
        const double sd = std::sqrt(n * w * (1 - w));
        CHECK(std::abs(static_cast<double>(counts[k]) - n * w) < 4 * sd);
    }
    // Each point sits near its own component.
    for (std::size_t i = 0; i < n; ++i)
        CHECK(std::hypot(x(i, 0) - s.centers[comp[i]][0], x(i, 1) - s.centers[comp[i]][1]) < 8 * s.stddev);
}

TEST_CASE("log density matches direct summation") {
    const eval::MixtureSpec s = eval::default_mixture();
    const double pts[][2] = {{2.0, 0.0}, {1.4, 1.4}, {0.1, 0.2}, {2.03, -0.02}};
    for (const auto& p : pts) {
        double sum = 0.0;
        for (std::size_t k = 0; k < 8; ++k) {
            const double d2 = std::pow(p[0] - s.centers[k][0], 2) + std::pow(p[1] - s.centers[k][1], 2);
            sum += s.weights[k] * std::exp(-d2 / (2 * 0.05 * 0.05)) / (2 * std::numbers::pi * 0.05 * 0.05);
        }
        if (sum > 1e-300) CHECK(s.log_density(p) == doctest::Approx(std::log(sum)).epsilon(1e-12));
    }
}

TEST_CASE("good-sample classification") {
    const eval::MixtureSpec s = grid_mixture();
    const Matrix2D x = Matrix2D::from_rows({{30.0, 0.0}, {31.0, 0.0}, {30.999, 0.0}, {45.0, 1.25}, {-1.25, 0.0}});
    const auto c = eval::classify_good(x, s);
    CHECK(c[0].good);
    CHECK(c[0].nearest_mode == 3);
    CHECK_FALSE(c[1].good);  // exactly 4 standard deviations
    CHECK(c[1].nearest_mode == 3);
    CHECK(c[2].good);
    CHECK_FALSE(c[3].good);
    CHECK_FALSE(c[4].good);
    CHECK(c[4].nearest_mode == 0);

    const CategoricalHist h = eval::histogram_of(x, s);
    CHECK(h.counts[3] == 2);
    CHECK(h.counts[CategoricalHist::kBad] == 3);
    CHECK(h.total() == 5);
    CHECK(h.good_total() == 2);

    const Matrix2D rev = Matrix2D::from_rows({{-1.25, 0.0}, {45.0, 1.25}, {30.999, 0.0}, {31.0, 0.0}, {30.0, 0.0}});
    CHECK(eval::histogram_of(rev, s).counts == h.counts);
}

TEST_CASE("KL divergence") {
    const CategoricalHist p = hist({3, 1, 4, 1, 5, 9, 2, 6, 0});
    CHECK(eval::kl_categorical(p, p) == 0.0);

    const CategoricalHist one = hist({1, 0, 0, 0, 0, 0, 0, 0, 7});
    const CategoricalHist uni = hist({1, 1, 1, 1, 1, 1, 1, 1, 0});
    CHECK(eval::kl_categorical(one, uni) == doctest::Approx(std::log(8.0)).epsilon(1e-6));

    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        const CategoricalHist a = random_hist(rng), b = random_hist(rng);
        const auto pa = smoothed(mode_weights(a, 8), eval::kHistogramSmoothing);
        const auto pb = smoothed(mode_weights(b, 8), eval::kHistogramSmoothing);
        double kl = 0.0;
        for (std::size_t i = 0; i < 8; ++i) kl += pa[i] * std::log(pa[i] / pb[i]);
        CHECK(std::abs(eval::kl_categorical(a, b) - kl) < 1e-12);
        CHECK(eval::kl_categorical(a, b) >= 0.0);
    }
    CHECK_THROWS_AS(eval::kl_categorical(hist({0, 0, 0, 0, 0, 0, 0, 0, 5}), p), ContractError);
    CHECK_THROWS_AS(eval::kl_categorical(p, CategoricalHist{}), ContractError);
}

TEST_CASE("augmented JS divergence") {
    const CategoricalHist p = hist({3, 1, 4, 1, 5, 9, 2, 6, 5});
    CHECK(eval::js_augmented(p, p) == 0.0);
    const CategoricalHist left = hist({4, 4, 0, 0, 0, 0, 0, 0, 0});
    const CategoricalHist right = hist({0, 0, 0, 0, 1, 1, 1, 1, 3});
    CHECK(eval::js_augmented(left, right) == doctest::Approx(1.0).epsilon(1e-8));

    Rng rng(4);
    for (int t = 0; t < 20; ++t) {
        const CategoricalHist a = random_hist(rng), b = random_hist(rng);
        const auto pa = smoothed(mode_weights(a, 9), eval::kHistogramSmoothing);
        const auto pb = smoothed(mode_weights(b, 9), eval::kHistogramSmoothing);
        double js = 0.0;
        for (std::size_t i = 0; i < 9; ++i) {
            const double m = 0.5 * (pa[i] + pb[i]);
            js += 0.5 * pa[i] * std::log2(pa[i] / m) + 0.5 * pb[i] * std::log2(pb[i] / m);
        }
        CHECK(std::abs(eval::js_augmented(a, b) - js) < 1e-12);
        CHECK(std::abs(eval::js_augmented(a, b) - eval::js_augmented(b, a)) < 1e-15);
        CHECK(eval::js_augmented(a, b) <= 1.0);
    }
    CHECK_THROWS_AS(eval::js_augmented(p, CategoricalHist{}), ContractError);
}

TEST_CASE("metrics are consistent under a shared relabeling of modes") {
    Rng rng(5);
    const CategoricalHist a = random_hist(rng), b = random_hist(rng);
    CategoricalHist pa = a, pb = b;
    const std::array<std::size_t, 8> perm = {5, 2, 7, 0, 1, 6, 4, 3};
    for (std::size_t i = 0; i < 8; ++i) {
        pa.counts[perm[i]] = a.counts[i];
        pb.counts[perm[i]] = b.counts[i];
    }
    CHECK(eval::kl_categorical(pa, pb) == doctest::Approx(eval::kl_categorical(a, b)).epsilon(1e-12));
    CHECK(eval::js_augmented(pa, pb) == doctest::Approx(eval::js_augmented(a, b)).epsilon(1e-12));
}

TEST_CASE("Brier score") {
    const double s1[] = {0.0, 1.0, 1.0};
    const int y1[] = {0, 1, 1};
    CHECK(eval::brier_score(s1, y1) == 0.0);
    const double s2[] = {0.5, 0.5, 0.5};
    const int y2[] = {0, 1, 1};
    CHECK(std::abs(eval::brier_score(s2, y2) - 0.25) < 1e-12);
    const double s3[] = {0.9, 0.2};
    const int y3[] = {1, 0};
    CHECK(std::abs(eval::brier_score(s3, y3) - 0.025) < 1e-12);
    CHECK_THROWS_AS(eval::brier_score(s3, y1), ContractError);
}

TEST_CASE("Brier decomposition") {
    SUBCASE("constant forecast at the base rate") {
        const std::vector<double> s(8, 0.25);
        const int y[] = {1, 0, 0, 0, 1, 0, 0, 0};
        const auto d = eval::brier_decomposition(s, y);
        CHECK(std::abs(d.reliability) < 1e-15);
        CHECK(std::abs(d.resolution) < 1e-15);
        CHECK(std::abs(d.uncertainty - 0.1875) < 1e-15);
    }
    SUBCASE("perfect separation") {
        const double s[] = {1, 1, 0, 0, 0};
        const int y[] = {1, 1, 0, 0, 0};
        const auto d = eval::brier_decomposition(s, y);
        CHECK(std::abs(d.uncertainty - 0.24) < 1e-15);
        CHECK(std::abs(d.resolution - 0.24) < 1e-15);
        CHECK(std::abs(d.reliability) < 1e-15);
    }
    SUBCASE("identity on random data") {
        Rng rng(6);
        for (int t = 0; t < 20; ++t) {
            const std::size_t n = 200 + rng() % 300;
            std::vector<double> s(n);
            std::vector<int> y(n);
            for (std::size_t i = 0; i < n; ++i) {
                s[i] = uniform01(rng);
                y[i] = uniform01(rng) < s[i] ? 1 : 0;
            }
            const auto d = eval::brier_decomposition(s, y, 10);

            // Independent grouping.
            std::array<double, 10> fsum{}, ysum{};
            std::array<double, 10> cnt{};
            auto bin = [](double v) { return std::min<std::size_t>(static_cast<std::size_t>(v * 10), 9); };
            for (std::size_t i = 0; i < n; ++i) {
                fsum[bin(s[i])] += s[i];
                ysum[bin(s[i])] += y[i];
                cnt[bin(s[i])] += 1;
            }
            double grouped = 0.0, rel = 0.0, res = 0.0;
            const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / n;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t b = bin(s[i]);
                grouped += std::pow(fsum[b] / cnt[b] - y[i], 2);
            }
            grouped /= n;
            for (std::size_t b = 0; b < 10; ++b) {
                if (cnt[b] == 0) continue;
                rel += cnt[b] * std::pow(fsum[b] / cnt[b] - ysum[b] / cnt[b], 2);
                res += cnt[b] * std::pow(ysum[b] / cnt[b] - ybar, 2);
            }
            rel /= n;
            res /= n;
            CHECK(std::abs(d.reliability - rel) < 1e-12);
            CHECK(std::abs(d.resolution - res) < 1e-12);
            CHECK(std::abs(d.uncertainty - ybar * (1 - ybar)) < 1e-12);
            CHECK(std::abs(d.grouped_brier - grouped) < 1e-12);
            CHECK(std::abs(d.reliability - d.resolution + d.uncertainty - grouped) < 1e-12);
        }
    }
}

TEST_CASE("Z statistic") {
    const double s1[] = {0.5, 0.5, 0.5, 0.5};
    const int y1[] = {1, 0, 1, 0};
    CHECK(eval::z_statistic(s1, y1) == 0.0);
    const double s2[] = {0.5, 0.5};
    const int y2[] = {1, 1};
    CHECK(std::abs(eval::z_statistic(s2, y2) - std::sqrt(2.0)) < 1e-12);
    const double s3[] = {0.0, 1.0};
    const int y3[] = {0, 1};
    CHECK_THROWS_AS(eval::z_statistic(s3, y3), ContractError);

    Rng rng(7);
    int within = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> s(10000);
        std::vector<int> y(10000);
        for (std::size_t i = 0; i < s.size(); ++i) {
            s[i] = uniform01(rng);
            y[i] = uniform01(rng) < s[i] ? 1 : 0;
        }
        within += std::abs(eval::z_statistic(s, y)) < 3.0;
    }
    CHECK(within >= 99);
}

TEST_CASE("expected calibration error") {
    const double s1[] = {0.5, 0.5};
    const int y1[] = {1, 1};
    CHECK(std::abs(eval::ece(s1, y1) - 0.5) < 1e-12);

    // Bin accuracies equal the bin confidences exactly.
    const double s2[] = {0.25, 0.25, 0.25, 0.25, 0.75, 0.75, 0.75, 0.75};
    const int y2[] = {1, 0, 0, 0, 1, 1, 1, 0};
    CHECK(eval::ece(s2, y2) == 0.0);

    Rng rng(8);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 300;
        std::vector<double> s(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = uniform01(rng);
            y[i] = rng() % 2;
        }
        double total = 0.0;
        for (std::size_t b = 0; b < 10; ++b) {
            double conf = 0.0, acc = 0.0, c = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (std::min<std::size_t>(static_cast<std::size_t>(s[i] * 10), 9) != b) continue;
                conf += s[i];
                acc += y[i];
                c += 1;
            }
            if (c > 0) total += c / n * std::abs(acc / c - conf / c);
        }
        const double e = eval::ece(s, y);
        CHECK(std::abs(e - total) < 1e-12);
        CHECK(e >= 0.0);
        CHECK(e <= 1.0);
    }
}

TEST_CASE("diagnose bundles the three diagnostics") {
    const double s[] = {0.9, 0.8, 0.3, 0.1};
    const int y[] = {1, 1, 0, 0};
    const auto r = eval::diagnose(s, y);
    CHECK(r.n == 4);
    CHECK(r.brier == eval::brier_score(s, y));
    CHECK(r.z_statistic == eval::z_statistic(s, y));
    CHECK(r.ece == eval::ece(s, y));
}

TEST_CASE("correlation") {
    const double xs[] = {1.2, 3.4, 0.5, 7.7, 2.2, 9.1, 4.4, 6.0, 5.3, 8.8};
    const double ys[] = {2.0, 2.9, 1.1, 6.5, 3.5, 8.0, 3.3, 4.1, 6.6, 7.0};
    const std::size_t n = 10;

    SUBCASE("perfect relationships") {
        const auto self = eval::correlate(xs, xs);
        CHECK(self.pearson == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(self.spearman == doctest::Approx(1.0).epsilon(1e-14));
        std::vector<double> dec(n);
        for (std::size_t i = 0; i < n; ++i) dec[i] = -std::exp(xs[i]);
        CHECK(eval::correlate(xs, dec).spearman == doctest::Approx(-1.0).epsilon(1e-14));
    }
    SUBCASE("textbook recomputation") {
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            syy += ys[i] * ys[i];
            sxy += xs[i] * ys[i];
        }
        const double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));

        // No ties: rank by counting smaller elements.
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double rx = 1, ry = 1;
            for (std::size_t j = 0; j < n; ++j) {
                rx += xs[j] < xs[i];
                ry += ys[j] < ys[i];
            }
            d2 += (rx - ry) * (rx - ry);
        }
        const double rho = 1.0 - 6.0 * d2 / (n * (n * n - 1.0));

        // Two-sided t-test p-value via the regularized incomplete beta.
        auto p_of = [&](double c) {
            const double df = n - 2.0;
            const double t2 = c * c * df / (1 - c * c);
            return boost::math::ibeta(df / 2, 0.5, df / (df + t2));
        };

        const auto c = eval::correlate(xs, ys);
        CHECK(std::abs(c.pearson - r) < 1e-12);
        CHECK(std::abs(c.spearman - rho) < 1e-12);
        CHECK(std::abs(c.pearson_p - p_of(r)) < 1e-12);
        CHECK(std::abs(c.spearman_p - p_of(rho)) < 1e-12);
    }
    SUBCASE("errors") {
        const double flat[] = {1, 1, 1, 1};
        const double four[] = {1, 2, 3, 4};
        CHECK_THROWS_AS(eval::correlate(flat, four), ContractError);
        CHECK_THROWS_AS(eval::correlate(four, flat), ContractError);
        CHECK_THROWS_AS(eval::correlate(std::span(four, 2), std::span(four, 2)), ContractError);
        CHECK_THROWS_AS(eval::correlate(four, std::span(four, 3)), ContractError);
    }
}

TEST_CASE("average ranks and unit normalization") {
    const double v[] = {10, 20, 20, 5, 20};
    CHECK(eval::average_ranks(v) == std::vector<double>{2, 4, 4, 1, 4});
    const double w[] = {2, 4, 3};
    CHECK(eval::normalize_unit(w) == std::vector<double>{0, 1, 0.5});
    const double c[] = {7, 7};
    CHECK(eval::normalize_unit(c) == std::vector<double>{0, 0});
}

TEST_CASE("KDE grid") {
    const eval::GridSpec grid;
    Rng rng(9);

    SUBCASE("single sample peaks at the nearest grid point") {
        const Matrix2D x = Matrix2D::from_rows({{0.61, -1.37}});
        const auto k = eval::kde_grid(x, 0.1, grid);
        const auto it = std::max_element(k.density.begin(), k.density.end());
        const std::size_t idx = static_cast<std::size_t>(it - k.density.begin());
        const std::size_t i = idx % grid.nx, j = idx / grid.nx;
        CHECK(std::abs(grid.x_at(i) - 0.61) <= grid.dx() / 2);
        CHECK(std::abs(grid.y_at(j) + 1.37) <= grid.dy() / 2);
    }
    SUBCASE("integrates to about one") {
        const eval::MixtureSpec spec = eval::default_mixture();
        const Matrix2D x = eval::sample_mixture(spec, 500, rng);
        const auto k = eval::kde_grid(x, 0.1, grid);
        const double mass = std::accumulate(k.density.begin(), k.density.end(), 0.0) * grid.dx() * grid.dy();
        CHECK(std::abs(mass - 1.0) < 0.02);
    }
    SUBCASE("mirror symmetry") {
        Matrix2D x(40, 2), m(40, 2);
        for (std::size_t i = 0; i < 40; ++i) {
            x(i, 0) = 4 * uniform01(rng) - 2;
            x(i, 1) = 4 * uniform01(rng) - 2;
            m(i, 0) = -x(i, 0);
            m(i, 1) = x(i, 1);
        }
        const auto a = eval::kde_grid(x, 0.2, grid), b = eval::kde_grid(m, 0.2, grid);
        double worst = 0.0;
        for (std::size_t j = 0; j < grid.ny; ++j)
            for (std::size_t i = 0; i < grid.nx; ++i)
                worst = std::max(worst, std::abs(a.at(i, j) - b.at(grid.nx - 1 - i, j)));
        CHECK(worst < 1e-12);
    }
    SUBCASE("union is the count-weighted average") {
        const Matrix2D a = eval::sample_mixture(eval::default_mixture(), 30, rng);
        const Matrix2D b = eval::sample_mixture(eval::default_mixture(), 70, rng);
        Matrix2D u(100, 2);
        for (std::size_t i = 0; i < 30; ++i) std::copy(a.row(i).begin(), a.row(i).end(), u.row(i).begin());
        for (std::size_t i = 0; i < 70; ++i) std::copy(b.row(i).begin(), b.row(i).end(), u.row(30 + i).begin());
        const auto ka = eval::kde_grid(a, 0.1, grid), kb = eval::kde_grid(b, 0.1, grid), ku = eval::kde_grid(u, 0.1, grid);
        for (std::size_t c = 0; c < ku.density.size(); ++c)
            CHECK(ku.density[c] == doctest::Approx(0.3 * ka.density[c] + 0.7 * kb.density[c]).epsilon(1e-10));
    }
    SUBCASE("errors and CSV") {
        CHECK_THROWS_AS(eval::kde_grid(Matrix2D(0, 2), 0.1, grid), ContractError);
        CHECK_THROWS_AS(eval::kde_grid(Matrix2D(1, 2), 0.0, grid), ContractError);
        eval::GridSpec tiny;
        tiny.nx = 2;
        tiny.ny = 3;
        std::ostringstream os;
        eval::write_kde_csv(os, eval::kde_grid(Matrix2D(1, 2), 1.0, tiny));
        const std::string text = os.str();
        CHECK(text.rfind("x,y,density\n", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 7);
    }
}

TEST_CASE("evaluate_method") {
    const eval::MixtureSpec spec = eval::default_mixture();
    Rng rng(10);
    const CategoricalHist real = eval::histogram_of(eval::sample_mixture(spec, 10000, rng), spec);

    SUBCASE("real data scores near-perfect") {
        const auto m = eval::evaluate_method(eval::sample_mixture(spec, 10000, rng), spec, real);
        CHECK(m.n == 10000);
        CHECK(m.good_fraction > 0.99);
        REQUIRE(m.kl_good.has_value());
        CHECK(*m.kl_good < 0.01);
        CHECK(m.js_augmented < 0.01);
    }
    SUBCASE("collapse onto one heavy mode") {
        Matrix2D x(1000, 2);
        for (std::size_t i = 0; i < 1000; ++i) {
            x(i, 0) = spec.centers[0][0];
            x(i, 1) = spec.centers[0][1];
        }
        const auto m = eval::evaluate_method(x, spec, real);
        CHECK(m.good_fraction == 1.0);
        const CategoricalHist one = hist({1000, 0, 0, 0, 0, 0, 0, 0, 0});
        CHECK(*m.kl_good == eval::kl_categorical(real, one));
        CHECK(*m.kl_good > 5.0);
        CHECK(m.js_augmented > 0.3);
    }
    SUBCASE("everything far from the modes") {
        // The origin is a full radius away from every center.
        const Matrix2D x(100, 2);
        const auto m = eval::evaluate_method(x, spec, real);
        CHECK(m.good_fraction == 0.0);
        CHECK_FALSE(m.kl_good.has_value());
        CHECK(m.histogram.counts[CategoricalHist::kBad] == 100);
    }
    CHECK_THROWS_AS(eval::evaluate_method(Matrix2D(0, 2), spec, real), ContractError);
}
