#include "rcpn/state.hpp"

#include <algorithm>

namespace rcpn {

SimState::SimState(std::shared_ptr<const NetModel> net, RegisterLayout layout, MemoryUnit memory,
                   std::vector<Word> prog, bool recycle_tokens)
    : regs(std::move(layout)),
      mem(std::move(memory)),
      program(std::move(prog)),
      net_(std::move(net)),
      recycle_(recycle_tokens),
      places_(net_->places().size()),
      two_list_(net_->places().size(), false),
      occupancy_(net_->stages().size(), 0) {
  for (auto p : cyclic_places(*net_)) two_list_[p] = true;
  stats.stage_occupancy_sum.assign(net_->stages().size(), 0);
  stats.fires.assign(net_->transitions().size(), 0);
}

std::optional<WriterView> SimState::locate(const WriterMark& mark) const {
  if (mark.slot >= pool_.size() || !alive_[mark.slot]) return std::nullopt;
  const Token& t = pool_[mark.slot];
  if (t.id != mark.token || mark.operand >= t.inst.count) return std::nullopt;
  return WriterView{net_->stage_of(t.place), &t.inst.operands[mark.operand]};
}

void SimState::insert_committed(PlaceId p, std::uint32_t slot) {
  auto& list = places_[p].committed;
  auto id = pool_[slot].id;
  auto it = std::upper_bound(list.begin(), list.end(), id,
                             [&](TokenId v, std::uint32_t s) { return v < pool_[s].id; });
  list.insert(it, slot);
}

std::uint32_t SimState::create_token(TokenKind kind, PlaceId place, const isa::DecodedInstruction* inst) {
  std::uint32_t slot;
  if (recycle_ && !free_.empty()) {
    slot = free_.back();
    free_.pop_back();
  } else {
    slot = static_cast<std::uint32_t>(pool_.size());
    pool_.emplace_back();
    alive_.push_back(false);
  }
  Token& t = pool_[slot];
  t = Token{};
  t.id = next_id++;
  t.kind = kind;
  t.arrival = cycle;
  t.place = place;
  if (inst) t.inst = *inst;
  alive_[slot] = true;
  ++live_;
  if (kind == TokenKind::Instruction) ++created_instructions;
  deposit(slot, place);
  return slot;
}

void SimState::deposit(std::uint32_t slot, PlaceId place) {
  Token& t = pool_[slot];
  t.place = place;
  t.arrival = cycle;
  if (net_->is_end_place(place)) {
    if (t.kind == TokenKind::Instruction) {
      try {
        regs.retire_audit(t.id);
      } catch (const DanglingReservation& e) {
        throw SimFault(FaultKind::DanglingReservation, cycle, e.what());
      }
      ++stats.instructions;
      retired_this_cycle.push_back(t.id);
    }
    release(slot);
    return;
  }
  ++occupancy_[net_->stage_of(place)];
  if (two_list_[place]) {
    t.pending = true;
    places_[place].pending.push_back(slot);
  } else {
    t.pending = false;
    insert_committed(place, slot);
  }
}

void SimState::remove(std::uint32_t slot) {
  const Token& t = pool_[slot];
  auto& list = places_[t.place].committed;
  auto it = std::find(list.begin(), list.end(), slot);
  if (it == list.end()) throw std::logic_error("token is not committed in its place");
  list.erase(it);
  --occupancy_[net_->stage_of(t.place)];
}

void SimState::discard(std::uint32_t slot) {
  remove(slot);
  release(slot);
}

void SimState::release(std::uint32_t slot) {
  alive_[slot] = false;
  --live_;
  if (recycle_) free_.push_back(slot);
}

void SimState::commit_pending() {
  for (PlaceId p = 0; p < places_.size(); ++p) {
    auto& store = places_[p];
    if (store.pending.empty()) continue;
    for (auto slot : store.pending) {
      pool_[slot].pending = false;
      insert_committed(p, slot);
    }
    store.pending.clear();
  }
}

bool SimState::drained() const {
  for (StageId s = 0; s < occupancy_.size(); ++s) {
    if (s != net_->end_stage() && occupancy_[s] != 0) return false;
  }
  return true;
}

std::optional<std::uint32_t> eligible_reservation(const SimState& state, PlaceId place, std::size_t skip) {
  const Place& p = state.net().place(place);
  for (auto slot : state.store(place).committed) {
    const Token& t = state.token(slot);
    if (t.kind != TokenKind::Reservation || !is_eligible(t, p, state.cycle)) continue;
    if (skip == 0) return slot;
    --skip;
  }
  return std::nullopt;
}

namespace {

bool holds(const SimState& state, const isa::DecodedInstruction& inst, const GuardCondition& g,
           GuardApproval& a) {
  switch (g.kind) {
    case GuardKind::CanRead: {
      int s = inst.slot(g.sym);
      if (s < 0 || !state.regs.can_read(inst.operands[s])) return false;
      a.read |= static_cast<std::uint8_t>(1u << s);
      return true;
    }
    case GuardKind::CanWrite: {
      int s = inst.slot(g.sym);
      if (s < 0 || !state.regs.can_write(inst.operands[s])) return false;
      a.write |= static_cast<std::uint8_t>(1u << s);
      return true;
    }
    case GuardKind::CanReadIn: {
      int s = inst.slot(g.sym);
      if (s < 0 || !state.regs.can_read_in(inst.operands[s], g.stage, state)) return false;
      a.read_in |= static_cast<std::uint8_t>(1u << s);
      a.read_in_stage[s] = g.stage;
      return true;
    }
    case GuardKind::AllSourcesReadable:
      for (std::uint8_t i = 0; i < inst.count; ++i) {
        const auto& op = inst.operands[i];
        if (op.is_reg() && op.role == Role::Read && !state.regs.can_read(op)) return false;
      }
      a.all_sources = true;
      return true;
    case GuardKind::AllDestsWritable:
      for (std::uint8_t i = 0; i < inst.count; ++i) {
        const auto& op = inst.operands[i];
        if (op.is_reg() && op.role == Role::Write && !state.regs.can_write(op)) return false;
      }
      a.all_dests = true;
      return true;
    case GuardKind::Predicate:
      return g.pred && g.pred(inst);
  }
  return false;
}

}  // namespace

bool is_enabled(const SimState& state, TransitionId tid, std::uint32_t slot, GuardApproval* approval) {
  const NetModel& net = state.net();
  const Transition& t = net.transition(tid);
  const Token& tok = state.token(slot);
  if (tok.kind != TokenKind::Instruction) return false;
  if (net.subnet_of(tok.inst.cls) != t.subnet) return false;

  GuardApproval a;
  for (const auto& arc : t.inputs) {
    for (const auto& g : arc.guard) {
      if (!holds(state, tok.inst, g, a)) return false;
    }
  }

  for (std::size_t i = 0; i < t.inputs.size(); ++i) {
    const auto& arc = t.inputs[i];
    if (arc.kind != ArcKind::Reservation) continue;
    std::size_t earlier = 0;
    for (std::size_t j = 0; j < i; ++j) {
      if (t.inputs[j].kind == ArcKind::Reservation && t.inputs[j].place == arc.place) ++earlier;
    }
    if (!eligible_reservation(state, arc.place, earlier)) return false;
  }

  for (const auto& [stage, delta] : t.stage_delta) {
    const auto& cap = net.stage(stage).capacity;
    if (cap && static_cast<std::int64_t>(state.occupancy(stage)) + delta > static_cast<std::int64_t>(*cap)) {
      return false;
    }
  }

  if (approval) *approval = a;
  return true;
}

FiringContext::FiringContext(SimState& state, const Transition& t, std::uint32_t slot,
                             const GuardApproval& approval)
    : state_(state), t_(t), slot_(slot), approval_(approval) {}

isa::DecodedInstruction& FiringContext::inst() { return state_.token(slot_).inst; }

Operand& FiringContext::operand(isa::Symbol sym) { return inst().operand(sym); }

int FiringContext::slot_of(isa::Symbol sym) const {
  int s = state_.token(slot_).inst.slot(sym);
  if (s < 0) refuse(std::string("symbol ") + isa::symbol_name(sym) + " is not bound");
  return s;
}

WriterMark FiringContext::mark(int s) const {
  return WriterMark{state_.token(slot_).id, slot_, static_cast<std::uint8_t>(s)};
}

void FiringContext::refuse(const std::string& what) const {
  throw SimFault(FaultKind::ActionFault, state_.cycle,
                 "transition " + t_.name + " (instruction " + std::to_string(state_.token(slot_).id) +
                     "): " + what);
}

void FiringContext::read(isa::Symbol sym) {
  int s = slot_of(sym);
  auto& op = inst().operands[s];
  bool approved = (approval_.read >> s) & 1u;
  approved = approved || (approval_.all_sources && op.role == Role::Read);
  if (!approved) refuse(std::string(isa::symbol_name(sym)) + ".read() without a passing canRead()");
  state_.regs.read(op);
}

void FiringContext::read_from(isa::Symbol sym, StageId stage) {
  int s = slot_of(sym);
  if (!((approval_.read_in >> s) & 1u) || approval_.read_in_stage[s] != stage) {
    refuse(std::string(isa::symbol_name(sym)) + ".read(s) without a passing canRead(s)");
  }
  state_.regs.read_from(inst().operands[s], stage, state_);
}

void FiringContext::reserve_write(isa::Symbol sym) {
  int s = slot_of(sym);
  auto& op = inst().operands[s];
  bool approved = (approval_.write >> s) & 1u;
  approved = approved || (approval_.all_dests && op.role == Role::Write);
  if (!approved) refuse(std::string(isa::symbol_name(sym)) + ".reserveWrite() without a passing canWrite()");
  state_.regs.reserve_write(op, mark(s));
}

void FiringContext::writeback(isa::Symbol sym) {
  int s = slot_of(sym);
  state_.regs.writeback(inst().operands[s], mark(s));
}

void FiringContext::read_all_sources() {
  if (!approval_.all_sources) refuse("read of all sources without a passing all-sources guard");
  auto& di = inst();
  for (std::uint8_t i = 0; i < di.count; ++i) {
    if (di.operands[i].is_reg() && di.operands[i].role == Role::Read) state_.regs.read(di.operands[i]);
  }
}

void FiringContext::reserve_all_dests() {
  if (!approval_.all_dests) refuse("reservation of all destinations without a passing all-destinations guard");
  auto& di = inst();
  for (std::uint8_t i = 0; i < di.count; ++i) {
    if (di.operands[i].is_reg() && di.operands[i].role == Role::Write) {
      state_.regs.reserve_write(di.operands[i], mark(i));
    }
  }
}

void FiringContext::writeback_all_dests() {
  auto& di = inst();
  for (std::uint8_t i = 0; i < di.count; ++i) {
    if (di.operands[i].is_reg() && di.operands[i].role == Role::Write) {
      state_.regs.writeback(di.operands[i], mark(i));
    }
  }
}

void FiringContext::produce(std::size_t output) {
  if (output >= t_.outputs.size() || !t_.outputs[output].conditional) {
    refuse("produce() names an output that is not a conditional arc");
  }
  if (produced_.empty()) produced_.assign(t_.outputs.size(), false);
  produced_[output] = true;
}

void FiringContext::spawn(const isa::DecodedInstruction& di) {
  if (!t_.spawn_place || spawned_.size() >= t_.max_spawns) refuse("spawn() beyond the declared limit");
  spawned_.push_back(di);
}

Word FiringContext::pc() const { return state_.pc; }
void FiringContext::set_pc(Word pc) { state_.pc = pc; }
void FiringContext::halt_fetch() { state_.fetch_halted = true; }
MemoryUnit& FiringContext::memory() { return state_.mem; }
Cycle FiringContext::cycle() const { return state_.cycle; }

void fire(SimState& state, TransitionId tid, std::uint32_t slot, const GuardApproval& approval,
          FiringRecord* record) {
  const NetModel& net = state.net();
  const Transition& t = net.transition(tid);
  const TokenId id = state.token(slot).id;
  const PlaceId from = state.token(slot).place;

  state.remove(slot);
  std::vector<TokenId> consumed;
  for (const auto& arc : t.inputs) {
    if (arc.kind != ArcKind::Reservation) continue;
    auto r = eligible_reservation(state, arc.place);
    if (!r) throw std::logic_error("fire() without the reservation is_enabled() saw");
    if (record) consumed.push_back(state.token(*r).id);
    state.discard(*r);
  }

  FiringContext ctx(state, t, slot, approval);
  try {
    if (t.action) t.action(ctx);
  } catch (const HazardViolation& e) {
    ctx.refuse(e.what());
  } catch (const AddressOutOfRange& e) {
    throw SimFault(FaultKind::AddressOutOfRange, state.cycle, "transition " + t.name + ": " + e.what());
  } catch (const std::out_of_range& e) {
    ctx.refuse(e.what());
  }

  std::vector<std::pair<PlaceId, TokenId>> produced;
  for (std::size_t i = 0; i < t.outputs.size(); ++i) {
    const auto& arc = t.outputs[i];
    if (arc.kind == ArcKind::Instruction) {
      Token& tok = state.token(slot);
      tok.delay_override = ctx.delay_ ? ctx.delay_ : t.delay;
      if (arc.transform) arc.transform(tok.inst);
      if (record) produced.emplace_back(arc.place, id);
      state.deposit(slot, arc.place);
    } else {
      if (arc.conditional && (i >= ctx.produced_.size() || !ctx.produced_[i])) continue;
      auto r = state.create_token(TokenKind::Reservation, arc.place, nullptr);
      if (!net.is_end_place(arc.place)) state.token(r).delay_override = t.delay;
      if (record) produced.emplace_back(arc.place, state.next_id - 1);
    }
  }
  for (const auto& di : ctx.spawned_) {
    state.create_token(TokenKind::Instruction, *t.spawn_place, &di);
    if (record) produced.emplace_back(*t.spawn_place, state.next_id - 1);
  }
  ++state.stats.fires[tid];

  if (record) {
    record->transition = tid;
    record->from = from;
    record->token = id;
    record->consumed_reservations = std::move(consumed);
    record->produced = std::move(produced);
  }
}

}  // namespace rcpn
