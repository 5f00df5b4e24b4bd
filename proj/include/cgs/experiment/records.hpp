#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "cgs/matrix.hpp"

namespace cgs::experiment {

enum class Method { Real, Gan, Drs, Mh, Refine, Collab };

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

inline constexpr std::string_view kSampleHeader = "x0,x1,method,step_count,d_score,accepted";

struct SampleRecord {
    double x0 = 0.0;
    double x1 = 0.0;
    Method method = Method::Gan;
    std::size_t step_count = 0;
    double d_score = 0.0;
    bool accepted = true;
};

void write_samples_csv(std::ostream& out, const std::vector<SampleRecord>& records);
void write_samples_csv(const std::filesystem::path& path, const std::vector<SampleRecord>& records);

/// Throws std::runtime_error with the file name and 1-based line number on a
/// schema violation, and for a file without data rows.
std::vector<SampleRecord> read_samples_csv(std::istream& in, std::string_view source);
std::vector<SampleRecord> read_samples_csv(const std::filesystem::path& path);

/// The (x0, x1) columns as an n x 2 matrix.
Matrix2D sample_points(const std::vector<SampleRecord>& records);

}  // namespace cgs::experiment
