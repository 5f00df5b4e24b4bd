#include "cgs/eval/kde.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "cgs/errors.hpp"

namespace cgs::eval {

KdeGrid kde_grid(const Matrix2D& samples, double bandwidth, const GridSpec& grid) {
    require(samples.rows() > 0, "kde_grid: empty sample set");
    require(samples.cols() == 2, "kde_grid: samples must be 2-D");
    require(bandwidth > 0.0, "kde_grid: bandwidth must be positive");
    require(grid.nx > 0 && grid.ny > 0 && grid.x_max > grid.x_min && grid.y_max > grid.y_min,
            "kde_grid: malformed grid");

    KdeGrid out{grid, std::vector<double>(grid.nx * grid.ny, 0.0)};
    // The Gaussian kernel factorizes over the axes.
    std::vector<double> kx(grid.nx), ky(grid.ny);
    const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    for (std::size_t s = 0; s < samples.rows(); ++s) {
        for (std::size_t i = 0; i < grid.nx; ++i) {
            const double d = grid.x_at(i) - samples(s, 0);
            kx[i] = std::exp(-d * d * inv2h2);
        }
        for (std::size_t j = 0; j < grid.ny; ++j) {
            const double d = grid.y_at(j) - samples(s, 1);
            ky[j] = std::exp(-d * d * inv2h2);
        }
        for (std::size_t j = 0; j < grid.ny; ++j) {
            double* row = out.density.data() + j * grid.nx;
            for (std::size_t i = 0; i < grid.nx; ++i) row[i] += ky[j] * kx[i];
        }
    }
    const double norm = 1.0 / (2.0 * std::numbers::pi * bandwidth * bandwidth * static_cast<double>(samples.rows()));
    for (double& v : out.density) v *= norm;
    return out;
}

void write_kde_csv(std::ostream& out, const KdeGrid& kde) {
    out << "x,y,density\n";
    for (std::size_t j = 0; j < kde.grid.ny; ++j)
        for (std::size_t i = 0; i < kde.grid.nx; ++i)
            out << fmt::format("{:.17g},{:.17g},{:.17g}\n", kde.grid.x_at(i), kde.grid.y_at(j), kde.at(i, j));
}

}  // namespace cgs::eval
