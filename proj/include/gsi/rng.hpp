#pragma once

#include <array>
#include <cstdint>

namespace gsi {

using Seed = std::uint64_t;

// Counter-based generator (Philox4x32-10). Every draw is addressed by
// (seed, stream, row, column), so values never depend on evaluation order
// or on how rows are split across threads.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Disjoint stream identifiers. Oracle streams never overlap estimator ones.
enum class Stream : std::uint32_t {
  inputs = 0,
  design_x = 1,
  design_copy = 2,
  bootstrap = 3,
  oracle_x = 16,
  oracle_copy_u = 17,
  oracle_copy_not_u = 18,
};

struct Draw {
  Seed seed;
  Stream stream;
  std::uint64_t row;
  std::uint32_t column;
};

// The raw 128-bit block behind a draw.
std::array<std::uint32_t, 4> raw_block(const Draw& d);

// Uniform on [0, 1) with 53 random bits.
double uniform01(const Draw& d);
// Standard normal via Box-Muller on the two halves of one Philox block.
double standard_normal(const Draw& d);

// Child seed for replicate / subset `index`; SplitMix64 finalizer.
Seed derive_seed(Seed parent, std::uint64_t index);

}  // namespace gsi
