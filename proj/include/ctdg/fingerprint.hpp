#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ctdg {

// FNV-1a 64-bit; used for config fingerprints and output-manifest hashes.
std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string to_hex(std::uint64_t value);

// Deterministic stream split for per-trial RNG seeds.
std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t index);

}  // namespace ctdg
