#include "rcpn/models.hpp"

#include <stdexcept>

#include "rcpn/state.hpp"

namespace rcpn {

namespace {

using isa::Symbol;
using G = GuardCondition;
using U = OperandUse;

bool is_load(const isa::DecodedInstruction& i) { return i.is_load(); }
bool is_store(const isa::DecodedInstruction& i) { return i.is_store(); }
bool taken(const isa::DecodedInstruction& i) { return i.taken; }
bool not_taken(const isa::DecodedInstruction& i) { return !i.taken; }

InputArc drive(PlaceId p, std::uint32_t priority, std::vector<GuardCondition> guard = {}) {
  return InputArc{p, ArcKind::Instruction, priority, std::move(guard)};
}
InputArc reservation_in(PlaceId p) { return InputArc{p, ArcKind::Reservation, 0, {}}; }
OutputArc to(PlaceId p) { return OutputArc{p, ArcKind::Instruction, false, nullptr}; }
OutputArc reservation_out(PlaceId p) { return OutputArc{p, ArcKind::Reservation, true, nullptr}; }

Transition make(std::string name, SubnetId subnet, std::vector<InputArc> in, std::vector<OutputArc> out,
                std::vector<OperandUse> uses, Action action) {
  Transition t;
  t.name = std::move(name);
  t.subnet = subnet;
  t.inputs = std::move(in);
  t.outputs = std::move(out);
  t.uses = std::move(uses);
  t.action = std::move(action);
  return t;
}

void alu_compute(FiringContext& c) {
  auto& d = c.operand(Symbol::d);
  auto fn = static_cast<isa::AluFn>(c.operand(Symbol::op).internal);
  d.internal = isa::alu_compute(fn, c.operand(Symbol::s1).word(), c.operand(Symbol::s2).word());
  d.has_value = true;
}

Word effective_address(FiringContext& c) {
  return c.operand(Symbol::base).word() + c.operand(Symbol::off).word();
}

// Performs the access; loads capture their value in t. Returns the latency.
std::uint32_t memory_stage(FiringContext& c) {
  Word addr = effective_address(c);
  auto& t = c.operand(Symbol::t);
  if (c.inst().is_load()) {
    auto a = mem_access(c.memory(), MemoryUnit::Op::Load, addr);
    t.internal = *a.value;
    t.has_value = true;
    return a.latency;
  }
  return mem_access(c.memory(), MemoryUnit::Op::Store, addr, t.word()).latency;
}

// Evaluates the branch; on a taken branch redirects fetch and requests the
// conditional reservation output at `reservation_output`.
void resolve_branch(FiringContext& c, std::size_t reservation_output) {
  auto cond = static_cast<isa::BranchCond>(c.operand(Symbol::cond).internal);
  bool t = isa::branch_taken(cond, c.operand(Symbol::rs).word());
  c.inst().taken = t;
  if (t) {
    c.set_pc(c.inst().pc + 1 + c.operand(Symbol::off).word());
    c.produce(reservation_output);
  }
}

std::shared_ptr<const NetModel> finish(NetBuilder& b) { return std::make_shared<const NetModel>(b.build()); }

}  // namespace

MemoryUnit::Access mem_access(MemoryUnit& unit, MemoryUnit::Op op, Word addr, Word value) {
  return unit.access(op, addr, value);
}

ModelDescriptor build_fig2_model() {
  NetBuilder b;
  auto l1 = b.stage("L1", 1);
  auto l2 = b.stage("L2", 1);
  auto end = b.end_stage();
  auto p1 = b.place("L1", l1);
  auto p2 = b.place("L2", l2);
  auto pe = b.place("end", end);
  b.independent_subnet("fetch");
  auto compute = b.subnet("compute", {isa::cls::Alu, isa::cls::LoadStore, isa::cls::Halt});
  auto control = b.subnet("control", {isa::cls::Branch});
  b.entry(p1);

  b.transition(make("U2", compute, {drive(p1, 0, {G::all_sources_readable(), G::all_dests_writable()})}, {to(p2)},
                    {U::read_all_sources(), U::reserve_all_dests()}, [](FiringContext& c) {
                      c.read_all_sources();
                      c.reserve_all_dests();
                      switch (c.inst().cls) {
                        case isa::cls::Alu:
                          alu_compute(c);
                          break;
                        case isa::cls::LoadStore:
                          c.set_delay(memory_stage(c));
                          break;
                        default:
                          c.halt_fetch();
                          break;
                      }
                      c.writeback_all_dests();
                    }));
  b.transition(make("U3", control, {drive(p1, 0, {G::all_sources_readable()})}, {to(p2)}, {U::read_all_sources()},
                    [](FiringContext& c) {
                      c.read_all_sources();
                      auto cond = static_cast<isa::BranchCond>(c.operand(Symbol::cond).internal);
                      if (isa::branch_taken(cond, c.operand(Symbol::rs).word())) {
                        c.inst().taken = true;
                        c.set_pc(c.inst().pc + 1 + c.operand(Symbol::off).word());
                      }
                    }));
  b.transition(make("U4", compute, {drive(p2, 0)}, {to(pe)}, {}, nullptr));
  b.transition(make("U5", control, {drive(p2, 0)}, {to(pe)}, {}, nullptr));
  return {"fig2", finish(b), RegisterLayout::flat(isa::kRegisterCount), {}};
}

ModelDescriptor build_example_ooc_model(bool forwarding) {
  NetBuilder b;
  auto l1 = b.stage("L1", 1);
  auto l2 = b.stage("L2", 1);
  auto l3 = b.stage("L3", 2);
  auto l4 = b.stage("L4", 1);
  auto br = b.stage("BR", 1);
  auto end = b.end_stage();
  auto p1 = b.place("L1", l1);
  auto p2 = b.place("L2", l2);
  auto p3 = b.place("L3", l3, 2);
  auto p4 = b.place("L4", l4);
  auto pb = b.place("BR", br);
  auto pe = b.place("end", end);
  b.independent_subnet("fetch");
  auto alu = b.subnet("ALU", {isa::cls::Alu});
  auto ls = b.subnet("LoadStore", {isa::cls::LoadStore});
  auto bra = b.subnet("Branch", {isa::cls::Branch});
  auto halt = b.subnet("Halt", {isa::cls::Halt});
  b.entry(p1);

  // ALU
  b.transition(make("E", alu, {drive(p1, 0, {G::can_read(Symbol::s1), G::can_read(Symbol::s2), G::can_write(Symbol::d)})},
                    {to(p3)}, {U::read(Symbol::s1), U::read(Symbol::s2), U::reserve_write(Symbol::d)},
                    [](FiringContext& c) {
                      c.read(Symbol::s1);
                      c.read(Symbol::s2);
                      c.reserve_write(Symbol::d);
                      alu_compute(c);
                    }));
  if (forwarding) {
    b.transition(make("E_fwd", alu,
                      {drive(p1, 1, {G::can_read_in(Symbol::s1, l3), G::can_read(Symbol::s2), G::can_write(Symbol::d)})},
                      {to(p3)}, {U::read_from(Symbol::s1, l3), U::read(Symbol::s2), U::reserve_write(Symbol::d)},
                      [l3](FiringContext& c) {
                        c.read_from(Symbol::s1, l3);
                        c.read(Symbol::s2);
                        c.reserve_write(Symbol::d);
                        alu_compute(c);
                      }));
  }
  b.transition(make("We", alu, {drive(p3, 0)}, {to(pe)}, {}, [](FiringContext& c) { c.writeback(Symbol::d); }));

  // LoadStore
  b.transition(make("X_load", ls,
                    {drive(p1, 0, {G::predicate("isLoad", is_load), G::can_read(Symbol::base), G::can_write(Symbol::t)})},
                    {to(p2)}, {U::read(Symbol::base), U::reserve_write(Symbol::t)}, [](FiringContext& c) {
                      c.read(Symbol::base);
                      c.reserve_write(Symbol::t);
                    }));
  b.transition(make("X_store", ls,
                    {drive(p1, 1, {G::predicate("isStore", is_store), G::can_read(Symbol::base), G::can_read(Symbol::t)})},
                    {to(p2)}, {U::read(Symbol::base), U::read(Symbol::t)}, [](FiringContext& c) {
                      c.read(Symbol::base);
                      c.read(Symbol::t);
                    }));
  b.transition(make("M", ls, {drive(p2, 0)}, {to(p4)}, {}, [](FiringContext& c) { c.set_delay(memory_stage(c)); }));
  b.transition(make("Wm", ls, {drive(p4, 0)}, {to(pe)}, {}, [](FiringContext& c) {
    if (c.inst().is_load()) c.writeback(Symbol::t);
  }));

  // Branch
  b.transition(make("B", bra, {drive(p1, 0, {G::can_read(Symbol::rs)})}, {to(pb), reservation_out(p1)},
                    {U::read(Symbol::rs)}, [](FiringContext& c) {
                      c.read(Symbol::rs);
                      resolve_branch(c, 1);
                    }));
  b.transition(make("Bk", bra, {drive(pb, 0, {G::predicate("taken", taken)}), reservation_in(p1)}, {to(pe)}, {},
                    nullptr));
  b.transition(make("Bk_nt", bra, {drive(pb, 1, {G::predicate("notTaken", not_taken)})}, {to(pe)}, {}, nullptr));

  // Halt
  b.transition(make("H", halt, {drive(p1, 0)}, {to(pe)}, {}, [](FiringContext& c) { c.halt_fetch(); }));

  return {forwarding ? "ooc" : "ooc-nofwd", finish(b), RegisterLayout::flat(isa::kRegisterCount), {}};
}

ModelDescriptor build_scalar5_model(bool forwarding) {
  NetBuilder b;
  auto ifid = b.stage("IFID", 1, "D");
  auto idex = b.stage("IDEX", 1, "E");
  auto exmem = b.stage("EXMEM", 1, "M");
  auto memwb = b.stage("MEMWB", 1, "W");
  auto end = b.end_stage();
  // Downstream first: the forwarding observations tie IDEX, EXMEM and MEMWB
  // into one component, evaluated in declaration order.
  auto pw = b.place("MEMWB", memwb);
  auto pm = b.place("EXMEM", exmem);
  auto px = b.place("IDEX", idex);
  auto pd = b.place("IFID", ifid);
  auto pe = b.place("end", end);
  b.independent_subnet("fetch");
  auto alu = b.subnet("ALU", {isa::cls::Alu});
  auto ls = b.subnet("LoadStore", {isa::cls::LoadStore});
  auto bra = b.subnet("Branch", {isa::cls::Branch});
  auto halt = b.subnet("Halt", {isa::cls::Halt});
  b.entry(pd);

  // ALU
  b.transition(make("D", alu, {drive(pd, 0, {G::can_read(Symbol::s1), G::can_read(Symbol::s2), G::can_write(Symbol::d)})},
                    {to(px)}, {U::read(Symbol::s1), U::read(Symbol::s2), U::reserve_write(Symbol::d)},
                    [](FiringContext& c) {
                      c.read(Symbol::s1);
                      c.read(Symbol::s2);
                      c.reserve_write(Symbol::d);
                    }));
  if (forwarding) {
    std::uint32_t priority = 1;
    for (auto [name, stage] : {std::pair{"D_fwd_M", exmem}, std::pair{"D_fwd_W", memwb}}) {
      b.transition(make(name, alu,
                        {drive(pd, priority++,
                               {G::can_read_in(Symbol::s1, stage), G::can_read(Symbol::s2), G::can_write(Symbol::d)})},
                        {to(px)}, {U::read_from(Symbol::s1, stage), U::read(Symbol::s2), U::reserve_write(Symbol::d)},
                        [stage](FiringContext& c) {
                          c.read_from(Symbol::s1, stage);
                          c.read(Symbol::s2);
                          c.reserve_write(Symbol::d);
                        }));
    }
  }
  b.transition(make("X", alu, {drive(px, 0)}, {to(pm)}, {}, alu_compute));
  b.transition(make("M", alu, {drive(pm, 0)}, {to(pw)}, {}, nullptr));
  b.transition(make("W", alu, {drive(pw, 0)}, {to(pe)}, {}, [](FiringContext& c) { c.writeback(Symbol::d); }));

  // LoadStore
  b.transition(make("D_load", ls,
                    {drive(pd, 0, {G::predicate("isLoad", is_load), G::can_read(Symbol::base), G::can_write(Symbol::t)})},
                    {to(px)}, {U::read(Symbol::base), U::reserve_write(Symbol::t)}, [](FiringContext& c) {
                      c.read(Symbol::base);
                      c.reserve_write(Symbol::t);
                    }));
  b.transition(make("D_store", ls,
                    {drive(pd, 1, {G::predicate("isStore", is_store), G::can_read(Symbol::base), G::can_read(Symbol::t)})},
                    {to(px)}, {U::read(Symbol::base), U::read(Symbol::t)}, [](FiringContext& c) {
                      c.read(Symbol::base);
                      c.read(Symbol::t);
                    }));
  b.transition(make("X_ls", ls, {drive(px, 0)}, {to(pm)}, {}, [](FiringContext& c) {
    c.set_delay(c.memory().latency(effective_address(c)));
  }));
  b.transition(make("M_ls", ls, {drive(pm, 0)}, {to(pw)}, {}, [](FiringContext& c) { memory_stage(c); }));
  b.transition(make("W_ls", ls, {drive(pw, 0)}, {to(pe)}, {}, [](FiringContext& c) {
    if (c.inst().is_load()) c.writeback(Symbol::t);
  }));

  // Branch
  b.transition(make("D_br", bra, {drive(pd, 0, {G::can_read(Symbol::rs)})}, {to(px), reservation_out(pd)},
                    {U::read(Symbol::rs)}, [](FiringContext& c) {
                      c.read(Symbol::rs);
                      resolve_branch(c, 1);
                    }));
  b.transition(make("X_br", bra, {drive(px, 0, {G::predicate("taken", taken)}), reservation_in(pd)}, {to(pm)}, {},
                    nullptr));
  b.transition(make("X_br_nt", bra, {drive(px, 1, {G::predicate("notTaken", not_taken)})}, {to(pm)}, {}, nullptr));
  b.transition(make("M_br", bra, {drive(pm, 0)}, {to(pw)}, {}, nullptr));
  b.transition(make("W_br", bra, {drive(pw, 0)}, {to(pe)}, {}, nullptr));

  // Halt
  b.transition(make("H", halt, {drive(pd, 0)}, {to(pe)}, {}, [](FiringContext& c) { c.halt_fetch(); }));

  return {forwarding ? "scalar5" : "scalar5-nofwd", finish(b), RegisterLayout::flat(isa::kRegisterCount), {}};
}

ModelDescriptor model_by_name(std::string_view name) {
  if (name == "fig2") return build_fig2_model();
  if (name == "ooc") return build_example_ooc_model(true);
  if (name == "ooc-nofwd") return build_example_ooc_model(false);
  if (name == "scalar5") return build_scalar5_model(true);
  if (name == "scalar5-nofwd") return build_scalar5_model(false);
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

std::vector<std::string> model_names() { return {"fig2", "ooc", "ooc-nofwd", "scalar5", "scalar5-nofwd"}; }

}  // namespace rcpn
