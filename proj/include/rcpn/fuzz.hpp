#pragma once

// Deterministic random TinyISA programs: straight-line code with forward
// branches only, always ending in HALT. Generation tracks the architectural
// state along the executed path so every executed load/store stays inside
// data memory (registers and memory start at zero).

#include <cstdint>
#include <vector>

#include "rcpn/common.hpp"

namespace rcpn {

struct FuzzOptions {
  std::uint32_t min_length = 8;
  std::uint32_t max_length = 48;
  std::uint32_t mem_words = 1024;
  std::uint32_t address_window = 64;  // executed accesses hit [0, window)
};

std::vector<Word> generate_program(std::uint64_t seed, const FuzzOptions& options = {});

// Seed of the i-th program of a fuzz batch.
std::uint64_t fuzz_case_seed(std::uint64_t batch_seed, std::uint64_t index);

}  // namespace rcpn
