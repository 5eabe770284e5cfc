#include "rcpn/memory.hpp"

#include <string>

namespace rcpn {

MemoryUnit::MemoryUnit(std::uint32_t size_words, std::uint32_t latency)
    : MemoryUnit(size_words, [latency](Word) { return latency; }) {
  if (latency < 1) throw std::invalid_argument("memory latency must be >= 1");
}

MemoryUnit::MemoryUnit(std::uint32_t size_words, LatencyFn latency)
    : data_(size_words, 0), latency_(std::move(latency)) {}

void MemoryUnit::check(Word addr) const {
  if (addr >= data_.size()) {
    throw AddressOutOfRange("data address " + std::to_string(addr) +
                            " outside memory of " +
                            std::to_string(data_.size()) + " words");
  }
}

std::uint32_t MemoryUnit::latency(Word addr) const {
  check(addr);
  auto l = latency_(addr);
  return l < 1 ? 1 : l;
}

MemoryUnit::Access MemoryUnit::access(Op op, Word addr, Word value) {
  auto l = latency(addr);
  if (op == Op::Load) return {data_[addr], l};
  data_[addr] = value;
  return {std::nullopt, l};
}

Word MemoryUnit::peek(Word addr) const {
  check(addr);
  return data_[addr];
}

void MemoryUnit::poke(Word addr, Word value) {
  check(addr);
  data_[addr] = value;
}

}  // namespace rcpn
