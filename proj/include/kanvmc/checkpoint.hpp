#pragma once

#include <filesystem>
#include <string>

#include "kanvmc/ansatz.hpp"

namespace kanvmc {

inline constexpr int kCheckpointVersion = 1;

/// Layout:
///
///   KANVMC1\n
///   key=value lines (kind, sites, hidden, grid, alpha, reflected, seed,
///   delta_max, frequency_init, format_version, delta_count, param_count,
///   checksum)
///   \n
///   delta_count + param_count little-endian float64: delta, then theta.
///
/// The checksum is FNV-1a 64 over the binary payload.
std::string encode_checkpoint(const Model& model);
Model decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Model& model);
Model load_checkpoint(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace kanvmc
