#include "cgs/matrix.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "cgs/errors.hpp"

namespace cgs {

Matrix2D::Matrix2D(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix2D::Matrix2D(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    require(data_.size() == rows * cols,
            "Matrix2D: data length " + std::to_string(data_.size()) + " != " +
                std::to_string(rows) + "x" + std::to_string(cols));
    require(all_finite(), "Matrix2D: non-finite entry in constructor data");
}

Matrix2D Matrix2D::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t n = rows.size();
    const std::size_t m = n == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(n * m);
    for (const auto& r : rows) {
        require(r.size() == m, "Matrix2D::from_rows: ragged rows");
        data.insert(data.end(), r.begin(), r.end());
    }
    return Matrix2D(n, m, std::move(data));
}

bool Matrix2D::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Matrix2D::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

Matrix2D Matrix2D::transposed() const {
    Matrix2D t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Matrix2D Matrix2D::select_rows(std::span<const std::size_t> indices) const {
    Matrix2D out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        require(indices[i] < rows_, "Matrix2D::select_rows: index out of range");
        std::copy_n(data_.begin() + indices[i] * cols_, cols_, out.data_.begin() + i * cols_);
    }
    return out;
}

void Matrix2D::append_rows(const Matrix2D& other) {
    if (rows_ == 0 && data_.empty()) cols_ = other.cols_;
    require(other.cols_ == cols_, "Matrix2D::append_rows: column mismatch");
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
    rows_ += other.rows_;
}

bool bit_equal(const Matrix2D& a, const Matrix2D& b) noexcept {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    for (std::size_t i = 0; i < a.data_.size(); ++i)
        if (std::bit_cast<std::uint64_t>(a.data_[i]) != std::bit_cast<std::uint64_t>(b.data_[i]))
            return false;
    return true;
}

Matrix2D matmul(const Matrix2D& a, const Matrix2D& b) {
    require(a.cols() == b.rows(), "matmul: inner dimensions " + std::to_string(a.cols()) +
                                      " and " + std::to_string(b.rows()) + " differ");
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    Matrix2D c(n, m);
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    double* pc = c.values().data();
    for (std::size_t i = 0; i < n; ++i) {
        double* ci = pc + i * m;
        const double* ai = pa + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ai[p];
            const double* bp = pb + p * m;
            for (std::size_t j = 0; j < m; ++j) ci[j] += av * bp[j];
        }
    }
    return c;
}

Matrix2D matmul_tn(const Matrix2D& a, const Matrix2D& b) {
    require(a.rows() == b.rows(), "matmul_tn: row counts differ");
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    Matrix2D c(k, m);
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    double* pc = c.values().data();
    for (std::size_t r = 0; r < n; ++r) {
        const double* ar = pa + r * k;
        const double* br = pb + r * m;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ar[p];
            double* cp = pc + p * m;
            for (std::size_t j = 0; j < m; ++j) cp[j] += av * br[j];
        }
    }
    return c;
}

}  // namespace cgs
