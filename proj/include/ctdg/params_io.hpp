#pragma once

#include <filesystem>
#include <string>

#include "ctdg/model.hpp"

namespace ctdg {

// Canonical JSON for a model config; its FNV hash is the fingerprint stored
// next to saved parameters.
std::string model_config_json(const ModelConfig& config);
std::string model_config_fingerprint(const ModelConfig& config);

// JSON container with declared shapes and hex-encoded 64-bit floats;
// round-trips are bit-exact.
void save_params(const ModelParams& params, const ModelConfig& config,
                 const std::filesystem::path& path);
ModelParams load_params(const std::filesystem::path& path,
                        const ModelConfig& expected_config);

}  // namespace ctdg
