#pragma once

#include <memory>
#include <string>

#include "rcpn/memory.hpp"
#include "rcpn/net.hpp"
#include "rcpn/registers.hpp"

namespace rcpn {

struct ModelConfig {
  std::uint32_t mem_size_words = 1024;
  std::uint32_t mem_latency = 1;
  // Overrides mem_latency when set.
  MemoryUnit::LatencyFn latency_fn;
};

struct ModelDescriptor {
  std::string name;
  std::shared_ptr<const NetModel> net;
  RegisterLayout layout;
  ModelConfig config;
};

}  // namespace rcpn
