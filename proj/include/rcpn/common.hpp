#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rcpn {

using Word = std::uint32_t;
using Cycle = std::uint64_t;
using TokenId = std::uint64_t;

using StageId = std::uint32_t;
using PlaceId = std::uint32_t;
using TransitionId = std::uint32_t;
using SubnetId = std::uint32_t;
using ClassId = std::uint8_t;

inline constexpr TokenId kNoToken = 0;

enum class FaultKind {
  ActionFault,
  MaxCyclesExceeded,
  PcOutOfRange,
  IllegalInstruction,
  IllegalMicroOp,
  DanglingReservation,
  AddressOutOfRange,
};

const char* to_string(FaultKind kind);

// Raised by an engine when a run cannot continue. Carries the cycle at which
// the fault was detected.
class SimFault : public std::runtime_error {
 public:
  SimFault(FaultKind kind, Cycle cycle, const std::string& what)
      : std::runtime_error(what), kind_(kind), cycle_(cycle) {}

  FaultKind kind() const { return kind_; }
  Cycle cycle() const { return cycle_; }

 private:
  FaultKind kind_;
  Cycle cycle_;
};

}  // namespace rcpn
