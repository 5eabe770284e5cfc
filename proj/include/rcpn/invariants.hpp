#pragma once

// Run-time checker for the kernel invariants. Attach through
// RunConfig::observer; violations are collected, never thrown.

#include <string>
#include <vector>

#include "rcpn/engine.hpp"

namespace rcpn {

struct InvariantCounts {
  std::uint64_t capacity = 0;
  std::uint64_t single_writer = 0;
  std::uint64_t conservation = 0;
  std::uint64_t guard_purity = 0;
  std::uint64_t priority = 0;
  std::uint64_t two_list = 0;
  std::uint64_t atomicity = 0;
};

class InvariantChecker : public Observer {
 public:
  void before_fire(const SimState& state, std::uint32_t slot, const std::vector<TransitionId>& candidates,
                   std::size_t chosen) override;
  void after_fire(const SimState& state, const FiringRecord& record) override;
  void end_cycle(const SimState& state) override;

  bool ok() const { return violations_.empty(); }
  const std::vector<std::string>& violations() const { return violations_; }
  const InvariantCounts& checks() const { return counts_; }

 private:
  void fail(const SimState& state, const std::string& what);
  void check_capacity(const SimState& state);
  void check_writers(const SimState& state);

  std::vector<std::string> violations_;
  InvariantCounts counts_;
};

// Canonical dump of everything a guard could observe or disturb.
std::string state_fingerprint(const SimState& state);

}  // namespace rcpn
