#pragma once

// Cycle-accurate simulation kernels. The optimized engine dispatches through
// a precomputed sorted-transition table, caches decodes and recycles token
// storage; the reference engine rediscovers candidate transitions by scanning
// the whole net for every token. Both share is_enabled/fire.

#include <array>
#include <optional>
#include <vector>

#include "rcpn/descriptor.hpp"
#include "rcpn/state.hpp"
#include "rcpn/trace.hpp"

namespace rcpn {

class Observer {
 public:
  virtual ~Observer() = default;
  // `candidates` is the ordered list the engine scanned; `chosen` indexes
  // the transition about to fire.
  virtual void before_fire(const SimState&, std::uint32_t /*slot*/, const std::vector<TransitionId>& /*candidates*/,
                           std::size_t /*chosen*/) {}
  virtual void after_fire(const SimState&, const FiringRecord&) {}
  virtual void end_cycle(const SimState&) {}
};

struct RunConfig {
  Cycle max_cycles = 1'000'000;
  bool trace = false;
  std::optional<std::uint32_t> mem_latency;
  std::optional<std::uint32_t> mem_size_words;
  // Test hook: the optimized engine drops the first entry of every table
  // list holding two or more transitions.
  bool inject_table_fault = false;
  Observer* observer = nullptr;
};

struct RunOutcome {
  Stats stats;
  std::vector<TraceRecord> trace;
  std::optional<SimFault> fault;
  std::vector<RegValue> registers;
  std::vector<Word> memory;
  double wall_seconds = 0.0;

  bool ok() const { return !fault; }
};

class SortedTransitionsTable {
 public:
  explicit SortedTransitionsTable(const NetModel& net);

  const std::vector<TransitionId>& at(PlaceId place, ClassId cls) const {
    return lists_[place * isa::cls::kCount + cls];
  }
  void corrupt();

 private:
  std::vector<std::vector<TransitionId>> lists_;
};

// Candidate list computed the slow way: every transition of the class's
// sub-net whose driving arc leaves `place`, sorted by arc priority.
std::vector<TransitionId> scan_candidates(const NetModel& net, PlaceId place, ClassId cls);

enum class EngineKind { Optimized, Reference };

RunOutcome run(const ModelDescriptor& model, const std::vector<Word>& program, const RunConfig& config = {});
RunOutcome reference_run(const ModelDescriptor& model, const std::vector<Word>& program,
                         const RunConfig& config = {});
RunOutcome run_engine(EngineKind kind, const ModelDescriptor& model, const std::vector<Word>& program,
                      const RunConfig& config = {});

}  // namespace rcpn
