#include "rcpn/invariants.hpp"

#include <algorithm>
#include <sstream>

namespace rcpn {

std::string state_fingerprint(const SimState& state) {
  std::ostringstream os;
  os << snapshot(state, {}, std::nullopt).text << " | halted=" << state.fetch_halted << " next=" << state.next_id;
  const NetModel& net = state.net();
  for (PlaceId p = 0; p < net.places().size(); ++p) {
    for (const auto* list : {&state.store(p).committed, &state.store(p).pending}) {
      for (auto slot : *list) {
        const auto& t = state.token(slot);
        os << " #" << t.id << (t.inst.taken ? "T" : "");
        for (std::uint8_t i = 0; i < t.inst.count; ++i) {
          os << ',' << t.inst.operands[i].has_value << ':' << t.inst.operands[i].internal;
        }
      }
    }
  }
  os << " M";
  for (auto w : state.mem.data()) os << ' ' << w;
  return os.str();
}

void InvariantChecker::fail(const SimState& state, const std::string& what) {
  if (violations_.size() < 32) violations_.push_back("cycle " + std::to_string(state.cycle) + ": " + what);
}

void InvariantChecker::before_fire(const SimState& state, std::uint32_t slot,
                                   const std::vector<TransitionId>& candidates, std::size_t chosen) {
  const NetModel& net = state.net();
  const Token& tok = state.token(slot);
  const TransitionId fired = candidates[chosen];
  const auto& ft = net.transition(fired);

  // Guard purity: two evaluations agree and leave no trace.
  auto before = state_fingerprint(state);
  bool first = is_enabled(state, fired, slot);
  bool second = is_enabled(state, fired, slot);
  ++counts_.guard_purity;
  if (!first || !second) fail(state, "fired transition " + ft.name + " is not enabled");
  if (state_fingerprint(state) != before) fail(state, "guard evaluation of " + ft.name + " changed the state");

  // Priority monotonicity, rediscovered from the net itself.
  ++counts_.priority;
  for (TransitionId t = 0; t < net.transitions().size(); ++t) {
    const auto& tr = net.transition(t);
    if (tr.subnet != ft.subnet || tr.driver().place != tok.place) continue;
    if (tr.driver().priority >= ft.driver().priority) continue;
    if (is_enabled(state, t, slot)) {
      fail(state, ft.name + " fired for i" + std::to_string(tok.id) + " while higher-priority " + tr.name +
                      " was enabled");
    }
  }

  // Two-list visibility: nothing deposited this cycle is consumed this cycle.
  ++counts_.two_list;
  if (tok.pending) fail(state, "pending token i" + std::to_string(tok.id) + " drives " + ft.name);
  if (state.two_list(tok.place) && tok.arrival >= state.cycle) {
    fail(state, "i" + std::to_string(tok.id) + " consumed in its arrival cycle from two-list place " +
                    net.place(tok.place).name);
  }
  for (const auto& arc : ft.inputs) {
    if (arc.kind != ArcKind::Reservation || !state.two_list(arc.place)) continue;
    if (auto r = eligible_reservation(state, arc.place); r && state.token(*r).arrival >= state.cycle) {
      fail(state, "reservation consumed in its arrival cycle in " + net.place(arc.place).name);
    }
  }
}

void InvariantChecker::after_fire(const SimState& state, const FiringRecord& rec) {
  const NetModel& net = state.net();
  ++counts_.atomicity;
  auto where = [&](TokenId id) -> std::optional<PlaceId> {
    for (PlaceId p = 0; p < net.places().size(); ++p) {
      for (const auto* list : {&state.store(p).committed, &state.store(p).pending}) {
        for (auto slot : *list) {
          if (state.token(slot).id == id) return p;
        }
      }
    }
    return std::nullopt;
  };
  for (auto id : rec.consumed_reservations) {
    if (where(id)) fail(state, "consumed reservation r" + std::to_string(id) + " still present");
  }
  for (const auto& [place, id] : rec.produced) {
    auto at = where(id);
    if (net.is_end_place(place)) {
      if (at) fail(state, "retired token " + std::to_string(id) + " still in a place");
    } else if (!at || *at != place) {
      fail(state, "produced token " + std::to_string(id) + " not found in " + net.place(place).name);
    }
  }
  if (std::none_of(rec.produced.begin(), rec.produced.end(), [&](auto& p) { return p.second == rec.token; })) {
    fail(state, "instruction i" + std::to_string(rec.token) + " vanished during firing");
  }
  check_capacity(state);
  check_writers(state);
}

void InvariantChecker::check_capacity(const SimState& state) {
  const NetModel& net = state.net();
  ++counts_.capacity;
  std::vector<std::uint32_t> count(net.stages().size(), 0);
  for (PlaceId p = 0; p < net.places().size(); ++p) {
    count[net.stage_of(p)] += static_cast<std::uint32_t>(state.store(p).committed.size() + state.store(p).pending.size());
    if (!state.two_list(p) && !state.store(p).pending.empty()) {
      fail(state, "pending tokens in single-list place " + net.place(p).name);
    }
  }
  for (StageId s = 0; s < count.size(); ++s) {
    if (count[s] != state.occupancy(s)) fail(state, "occupancy bookkeeping drifted for " + net.stage(s).name);
    const auto& cap = net.stage(s).capacity;
    if (cap && count[s] > *cap) {
      fail(state, "stage " + net.stage(s).name + " holds " + std::to_string(count[s]) + " tokens, capacity " +
                      std::to_string(*cap));
    }
  }
}

void InvariantChecker::check_writers(const SimState& state) {
  ++counts_.single_writer;
  const auto& cells = state.regs.cells();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& w = cells[c].writer;
    if (w.empty()) continue;
    auto view = state.locate(w);
    if (!view) {
      fail(state, "cell " + std::to_string(c) + " names a writer that is no longer in flight");
      continue;
    }
    if (!view->ref->is_reg() || view->ref->role != Role::Write) {
      fail(state, "cell " + std::to_string(c) + " writer is not a write operand");
      continue;
    }
    const auto& decl_cells = state.regs.decl(view->ref->reg).cells;
    if (std::find(decl_cells.begin(), decl_cells.end(), c) == decl_cells.end()) {
      fail(state, "cell " + std::to_string(c) + " reserved by an operand of another register");
    }
  }
}

void InvariantChecker::end_cycle(const SimState& state) {
  check_capacity(state);
  check_writers(state);
  ++counts_.conservation;
  std::uint64_t in_flight = 0;
  const NetModel& net = state.net();
  for (PlaceId p = 0; p < net.places().size(); ++p) {
    for (const auto* list : {&state.store(p).committed, &state.store(p).pending}) {
      for (auto slot : *list) {
        if (state.token(slot).kind == TokenKind::Instruction) ++in_flight;
      }
    }
  }
  if (state.created_instructions != state.stats.instructions + in_flight) {
    fail(state, "token conservation: created " + std::to_string(state.created_instructions) + ", retired " +
                    std::to_string(state.stats.instructions) + ", in flight " + std::to_string(in_flight));
  }
}

}  // namespace rcpn
