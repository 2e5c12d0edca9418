#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>

namespace safa {

// Deterministic seed derivation through std::seed_seq; platform independent.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

// Fills out with independent standard normal draws from a mt19937_64 stream.
void fill_standard_normal(std::span<double> out, std::uint64_t seed);

// Stream tags used when deriving seeds from a run seed.
enum class SeedTag : std::uint64_t {
  CanvasInit = 0x11,
  ReferenceInit = 0x12,
  StepNoise = 0x13,
  Target = 0x14,
  Style = 0x15,
  Trial = 0x16,
  Fixture = 0x17,
};

inline std::uint64_t tag(SeedTag t) { return static_cast<std::uint64_t>(t); }

}  // namespace safa
