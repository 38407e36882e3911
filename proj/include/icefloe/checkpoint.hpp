#pragma once

#include <string>

#include <json.hpp>

#include "icefloe/cn.hpp"

namespace icefloe::io {

// Model checkpoints are versioned JSON: geometry, architecture, all
// weights, the normalization statistics, and the config (seed included)
// that produced the file.
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    cn::CNParams params;
    nlohmann::json config;
};

std::string format_checkpoint(const cn::CNParams& params, const nlohmann::json& config);
void save_checkpoint(const std::string& path, const cn::CNParams& params,
                     const nlohmann::json& config);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace icefloe::io
