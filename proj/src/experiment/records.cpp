#include "cgs/experiment/records.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace cgs::experiment {

namespace {

constexpr std::string_view kMethodNames[] = {"real", "gan", "drs", "mh", "refine", "collab"};

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

std::string_view method_name(Method m) { return kMethodNames[static_cast<std::size_t>(m)]; }

std::optional<Method> parse_method(std::string_view name) {
    for (std::size_t i = 0; i < std::size(kMethodNames); ++i)
        if (kMethodNames[i] == name) return static_cast<Method>(i);
    return std::nullopt;
}

void write_samples_csv(std::ostream& out, const std::vector<SampleRecord>& records) {
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "{}\n", kSampleHeader);
    for (const SampleRecord& r : records)
        fmt::format_to(std::back_inserter(buf), "{:.17g},{:.17g},{},{},{:.17g},{}\n", r.x0, r.x1, method_name(r.method),
                       r.step_count, r.d_score, r.accepted ? 1 : 0);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_samples_csv(const std::filesystem::path& path, const std::vector<SampleRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    write_samples_csv(out, records);
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<SampleRecord> read_samples_csv(std::istream& in, std::string_view source) {
    auto fail = [&](std::size_t line, const std::string& msg) -> std::runtime_error {
        return std::runtime_error(fmt::format("{}:{}: {}", source, line, msg));
    };
    std::string line;
    if (!std::getline(in, line)) throw fail(1, "empty file, expected header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kSampleHeader) throw fail(1, fmt::format("bad header '{}', expected '{}'", line, kSampleHeader));

    std::vector<SampleRecord> records;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 6) throw fail(lineno, fmt::format("expected 6 fields, found {}", f.size()));
        SampleRecord r;
        if (!parse_number(f[0], r.x0) || !std::isfinite(r.x0)) throw fail(lineno, "x0 is not a finite number");
        if (!parse_number(f[1], r.x1) || !std::isfinite(r.x1)) throw fail(lineno, "x1 is not a finite number");
        const auto m = parse_method(f[2]);
        if (!m) throw fail(lineno, fmt::format("unknown method '{}'", f[2]));
        r.method = *m;
        if (!parse_number(f[3], r.step_count)) throw fail(lineno, "step_count is not a non-negative integer");
        if (!parse_number(f[4], r.d_score) || !(r.d_score >= 0.0 && r.d_score <= 1.0))
            throw fail(lineno, "d_score must be a number in [0, 1]");
        if (f[5] == "1") {
            r.accepted = true;
        } else if (f[5] == "0") {
            r.accepted = false;
        } else {
            throw fail(lineno, "accepted must be 0 or 1");
        }
        records.push_back(r);
    }
    if (records.empty()) throw std::runtime_error(fmt::format("{}: no sample rows", source));
    return records;
}

std::vector<SampleRecord> read_samples_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read sample file '" + path.string() + "'");
    return read_samples_csv(in, path.string());
}

Matrix2D sample_points(const std::vector<SampleRecord>& records) {
    Matrix2D m(records.size(), 2);
    for (std::size_t i = 0; i < records.size(); ++i) {
        m(i, 0) = records[i].x0;
        m(i, 1) = records[i].x1;
    }
    return m;
}

}  // namespace cgs::experiment
