#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "safa/latent_map.hpp"

namespace safa {

// SAFA tensor file: "SAFA", u32 C, u32 H, u32 W (little-endian), then C*H*W
// little-endian float32 values in row-major order.
std::vector<std::uint8_t> encode_safa(const LatentMap& map);
LatentMap decode_safa(const std::vector<std::uint8_t>& bytes);

void write_safa(const std::filesystem::path& path, const LatentMap& map);
LatentMap read_safa(const std::filesystem::path& path);

// Values as they would round-trip through a SAFA file.
LatentMap round_to_float32(const LatentMap& map);

// Binary 8-bit graymap of one channel, min-max normalized.
void write_pgm(const std::filesystem::path& path, const LatentMap& map, std::size_t channel);

}  // namespace safa
