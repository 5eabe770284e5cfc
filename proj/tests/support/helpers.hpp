#pragma once

#include <string>
#include <vector>

#include "rcpn/assembler.hpp"
#include "rcpn/engine.hpp"
#include "rcpn/models.hpp"
#include "rcpn/state.hpp"

namespace th {

using namespace rcpn;

inline std::vector<Word> prog(const std::string& source) { return assemble(source); }

inline RunOutcome run_src(const std::string& model, const std::string& source, RunConfig cfg = {}) {
  return run(model_by_name(model), prog(source), cfg);
}

inline Cycle cycles(const std::string& model, const std::string& source, RunConfig cfg = {}) {
  auto out = run_src(model, source, cfg);
  if (out.fault) throw *out.fault;
  return out.stats.cycles;
}

inline std::string n_alu(int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += "ADDI r" + std::to_string(1 + i % 15) + ", r0, #" + std::to_string(i) + "\n";
  return s + "HALT\n";
}

// Small net-building shorthands.
inline InputArc drive(PlaceId p, std::uint32_t priority = 0, std::vector<GuardCondition> guard = {}) {
  return InputArc{p, ArcKind::Instruction, priority, std::move(guard)};
}
inline InputArc res_in(PlaceId p) { return InputArc{p, ArcKind::Reservation, 0, {}}; }
inline OutputArc to(PlaceId p) { return OutputArc{p, ArcKind::Instruction, false, nullptr}; }
inline OutputArc res_out(PlaceId p, bool conditional = false) {
  return OutputArc{p, ArcKind::Reservation, conditional, nullptr};
}

inline Transition tr(std::string name, SubnetId subnet, std::vector<InputArc> in, std::vector<OutputArc> out,
                     std::vector<OperandUse> uses = {}, Action action = nullptr) {
  Transition t;
  t.name = std::move(name);
  t.subnet = subnet;
  t.inputs = std::move(in);
  t.outputs = std::move(out);
  t.uses = std::move(uses);
  t.action = std::move(action);
  return t;
}

// A builder preloaded with an independent sub-net and one catch-all sub-net
// for every operation class.
struct Skeleton {
  NetBuilder b;
  SubnetId any;
  Skeleton() {
    b.independent_subnet("fetch");
    any = b.subnet("all", {isa::cls::Alu, isa::cls::LoadStore, isa::cls::Branch, isa::cls::Halt});
  }
};

inline SimState make_state(std::shared_ptr<const NetModel> net, std::vector<Word> program = {}, bool recycle = false) {
  return SimState(std::move(net), RegisterLayout::flat(isa::kRegisterCount), MemoryUnit(64, 1), std::move(program),
                  recycle);
}

inline std::uint32_t put(SimState& s, PlaceId p, Word word) {
  auto inst = isa::decode(word, 0);
  return s.create_token(TokenKind::Instruction, p, &inst);
}

}  // namespace th
