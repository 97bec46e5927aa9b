#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace ftir {

/// Raw little-endian float32 array files.
void write_f32_file(std::span<const double> values, const std::filesystem::path& file);
std::vector<double> read_f32_file(const std::filesystem::path& file);

}  // namespace ftir
