#pragma once

#include <cstdint>
#include <random>

namespace refshape {

// Independent engine derived from (seed, purpose, index). Distinct purposes or
// indices give unrelated streams for the same user seed.
inline std::mt19937_64 seeded_stream(std::uint64_t seed, std::uint64_t purpose,
                                     std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace refshape
