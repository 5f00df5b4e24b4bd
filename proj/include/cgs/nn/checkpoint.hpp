#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cgs/nn/mlp.hpp"

namespace cgs::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NamedModel {
    std::string name;
    Mlp model;
};

/// A checkpoint file holds one or more named models plus the seed that
/// produced them. See docs/checkpoint_format.md for the byte layout.
struct Checkpoint {
    std::uint64_t seed = 0;
    std::vector<NamedModel> models;

    /// Throws CheckpointError if no model carries `name`.
    const Mlp& get(std::string_view name) const;
    bool contains(std::string_view name) const noexcept;
};

std::string encode_checkpoint(const Checkpoint& checkpoint);
/// `source` names the origin (usually a path) in error messages.
Checkpoint decode_checkpoint(std::string_view bytes, std::string_view source = "<memory>");

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace cgs::nn
