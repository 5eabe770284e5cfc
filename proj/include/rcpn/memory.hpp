#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rcpn/common.hpp"

namespace rcpn {

class AddressOutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Word-addressed data memory with a per-address access latency.
class MemoryUnit {
 public:
  using LatencyFn = std::function<std::uint32_t(Word)>;

  MemoryUnit(std::uint32_t size_words, std::uint32_t latency);
  MemoryUnit(std::uint32_t size_words, LatencyFn latency);

  enum class Op { Load, Store };
  struct Access {
    std::optional<Word> value;
    std::uint32_t latency;
  };

  Access access(Op op, Word addr, Word value = 0);
  std::uint32_t latency(Word addr) const;

  Word peek(Word addr) const;
  void poke(Word addr, Word value);
  std::uint32_t size() const { return static_cast<std::uint32_t>(data_.size()); }
  const std::vector<Word>& data() const { return data_; }

 private:
  void check(Word addr) const;

  std::vector<Word> data_;
  LatencyFn latency_;
};

}  // namespace rcpn
