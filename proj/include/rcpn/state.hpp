#pragma once

// Mutable per-run state plus the enable/fire semantics shared by both
// engines.

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rcpn/isa.hpp"
#include "rcpn/memory.hpp"
#include "rcpn/net.hpp"
#include "rcpn/registers.hpp"

namespace rcpn {

struct Stats {
  Cycle cycles = 0;
  std::uint64_t instructions = 0;
  std::vector<std::uint64_t> stage_occupancy_sum;  // per stage, summed at cycle end
  std::vector<std::uint64_t> fires;                // per transition
  std::uint64_t fetch_stalls = 0;
  std::uint64_t decode_hits = 0;
  std::uint64_t decode_misses = 0;

  double cpi() const {
    return instructions == 0 ? 0.0 : static_cast<double>(cycles) / static_cast<double>(instructions);
  }
  double average_occupancy(StageId s) const {
    return cycles == 0 ? 0.0 : static_cast<double>(stage_occupancy_sum[s]) / static_cast<double>(cycles);
  }
};

// Boolean interface results recorded while evaluating a guard. Effectful
// calls in the action are only allowed for operands approved here.
struct GuardApproval {
  std::uint8_t read = 0;
  std::uint8_t write = 0;
  std::uint8_t read_in = 0;
  std::array<StageId, isa::kMaxOperands> read_in_stage{};
  bool all_sources = false;
  bool all_dests = false;
};

struct FiringRecord {
  TransitionId transition = 0;
  PlaceId from = 0;
  TokenId token = kNoToken;
  std::vector<TokenId> consumed_reservations;
  std::vector<std::pair<PlaceId, TokenId>> produced;
};

class SimState;

class FiringContext {
 public:
  FiringContext(SimState& state, const Transition& t, std::uint32_t slot, const GuardApproval& approval);

  isa::DecodedInstruction& inst();
  Operand& operand(isa::Symbol sym);

  void read(isa::Symbol sym);
  void read_from(isa::Symbol sym, StageId stage);
  void reserve_write(isa::Symbol sym);
  void writeback(isa::Symbol sym);
  void read_all_sources();
  void reserve_all_dests();
  void writeback_all_dests();

  // Residency of the outgoing instruction token.
  void set_delay(std::uint32_t cycles) { delay_ = cycles; }
  // Requests the conditional output arc at index `output`.
  void produce(std::size_t output);
  void spawn(const isa::DecodedInstruction& inst);

  Word pc() const;
  void set_pc(Word pc);
  void halt_fetch();
  MemoryUnit& memory();
  Cycle cycle() const;

 private:
  friend void fire(SimState&, TransitionId, std::uint32_t, const GuardApproval&, FiringRecord*);

  WriterMark mark(int slot) const;
  int slot_of(isa::Symbol sym) const;
  [[noreturn]] void refuse(const std::string& what) const;

  SimState& state_;
  const Transition& t_;
  std::uint32_t slot_;
  const GuardApproval& approval_;
  std::optional<std::uint32_t> delay_;
  std::vector<bool> produced_;
  std::vector<isa::DecodedInstruction> spawned_;
};

struct PlaceStore {
  std::vector<std::uint32_t> committed;  // pool slots, ascending token id
  std::vector<std::uint32_t> pending;
};

class SimState : public WriterLocator {
 public:
  SimState(std::shared_ptr<const NetModel> net, RegisterLayout layout, MemoryUnit memory,
           std::vector<Word> program, bool recycle_tokens);

  const NetModel& net() const { return *net_; }

  std::optional<WriterView> locate(const WriterMark& mark) const override;

  Token& token(std::uint32_t slot) { return pool_[slot]; }
  const Token& token(std::uint32_t slot) const { return pool_[slot]; }
  const PlaceStore& store(PlaceId p) const { return places_[p]; }
  bool two_list(PlaceId p) const { return two_list_[p]; }
  std::uint32_t occupancy(StageId s) const { return occupancy_[s]; }

  // Token with the given kind appended to `place` (pending if two-list).
  std::uint32_t create_token(TokenKind kind, PlaceId place, const isa::DecodedInstruction* inst);
  // Moves a live token into `place`; instruction tokens entering the end
  // stage are audited and retired.
  void deposit(std::uint32_t slot, PlaceId place);
  // Removes a committed token from its place.
  void remove(std::uint32_t slot);
  // Removes and destroys a committed token.
  void discard(std::uint32_t slot);

  void commit_pending();
  bool drained() const;
  std::size_t live_tokens() const { return live_; }

  RegisterFile regs;
  MemoryUnit mem;
  std::vector<Word> program;
  Word pc = 0;
  Cycle cycle = 0;
  bool fetch_halted = false;
  Stats stats;

  TokenId next_id = 1;
  std::uint64_t created_instructions = 0;
  std::vector<TokenId> retired_this_cycle;

 private:
  void release(std::uint32_t slot);
  void insert_committed(PlaceId p, std::uint32_t slot);

  std::shared_ptr<const NetModel> net_;
  std::vector<Token> pool_;
  std::vector<bool> alive_;
  std::vector<std::uint32_t> free_;
  bool recycle_;
  std::size_t live_ = 0;
  std::vector<PlaceStore> places_;
  std::vector<bool> two_list_;
  std::vector<std::uint32_t> occupancy_;
};

// Evaluates every enabling condition for `t` driven by the instruction token
// in `slot`. Pure: never changes `state`.
bool is_enabled(const SimState& state, TransitionId t, std::uint32_t slot, GuardApproval* approval = nullptr);

// Fires `t` for the token in `slot`. The caller has just checked
// is_enabled. Register-interface misuse surfaces as SimFault.
void fire(SimState& state, TransitionId t, std::uint32_t slot, const GuardApproval& approval,
          FiringRecord* record = nullptr);

// Oldest eligible committed reservation token in `place`, skipping the first
// `skip` matches.
std::optional<std::uint32_t> eligible_reservation(const SimState& state, PlaceId place, std::size_t skip = 0);

}  // namespace rcpn
