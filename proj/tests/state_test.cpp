#include "doctest.h"
#include "rcpn/models.hpp"
#include "support/helpers.hpp"

using namespace rcpn;
using namespace th;
using G = GuardCondition;
using U = OperandUse;
using isa::Symbol;

namespace {

struct Ooc {
  ModelDescriptor m = build_example_ooc_model();
  SimState s = make_state(m.net);
  PlaceId p(const char* n) const { return *m.net->find_place(n); }
  TransitionId t(const char* n) const { return *m.net->find_transition(n); }
  // Token placed and made eligible.
  std::uint32_t inject(const char* place, Word w) {
    auto slot = put(s, p(place), w);
    s.commit_pending();
    s.cycle = 1;
    return slot;
  }
};

// Two stages, A (cap 1) holding places A1 and A2, then end.
struct SameStage {
  NetModel net;
  PlaceId a1, a2, b1;
  TransitionId hop, out;
  SameStage() {
    Skeleton s;
    auto a = s.b.stage("A", 1);
    auto b = s.b.stage("B", 1);
    auto e = s.b.end_stage();
    a1 = s.b.place("A1", a);
    a2 = s.b.place("A2", a);
    b1 = s.b.place("B1", b);
    auto pe = s.b.place("end", e);
    s.b.entry(a1);
    hop = s.b.transition(tr("hop", s.any, {drive(a1)}, {to(a2)}));
    out = s.b.transition(tr("out", s.any, {drive(a2)}, {to(b1)}));
    s.b.transition(tr("done", s.any, {drive(b1)}, {to(pe)}));
    net = s.b.build();
  }
};

}  // namespace

TEST_CASE("E is enabled when operands are ready and L3 is free") {
  Ooc o;
  auto slot = o.inject("L1", 0x10123000u);
  GuardApproval ap;
  CHECK(is_enabled(o.s, o.t("E"), slot, &ap));
  CHECK_FALSE(is_enabled(o.s, o.t("E_fwd"), slot));
}

TEST_CASE("a full output stage disables the transition") {
  SameStage n;
  auto s = make_state(std::make_shared<const NetModel>(n.net));
  auto blocker = put(s, n.b1, 0x10123000u);
  auto mover = put(s, n.a2, 0x10456000u);
  s.cycle = 1;
  CHECK_FALSE(is_enabled(s, n.out, mover));
  (void)blocker;
}

TEST_CASE("moving between places of one capacity-1 stage is legal") {
  SameStage n;
  auto s = make_state(std::make_shared<const NetModel>(n.net));
  auto slot = put(s, n.a1, 0x10123000u);
  s.cycle = 1;
  CHECK(s.occupancy(n.net.stage_of(n.a1)) == 1);
  GuardApproval ap;
  REQUIRE(is_enabled(s, n.hop, slot, &ap));
  fire(s, n.hop, slot, ap);
  CHECK(s.token(slot).place == n.a2);
  CHECK(s.occupancy(n.net.stage_of(n.a1)) == 1);
}

TEST_CASE("a freshly deposited token becomes eligible one cycle later") {
  SameStage n;
  auto s = make_state(std::make_shared<const NetModel>(n.net));
  auto slot = put(s, n.a1, 0x10123000u);
  const auto& place = n.net.place(n.a1);
  CHECK_FALSE(is_eligible(s.token(slot), place, s.cycle));
  s.cycle = 1;
  CHECK(is_eligible(s.token(slot), place, s.cycle));
  CHECK(is_enabled(s, n.hop, slot));
}

TEST_CASE("firing E computes the result into L3") {
  Ooc o;
  o.s.regs.set_value(2, 40);
  o.s.regs.set_value(3, 2);
  auto slot = o.inject("L1", 0x10123000u);
  GuardApproval ap;
  REQUIRE(is_enabled(o.s, o.t("E"), slot, &ap));
  FiringRecord rec;
  fire(o.s, o.t("E"), slot, ap, &rec);
  const auto& tok = o.s.token(slot);
  CHECK(tok.place == o.p("L3"));
  CHECK(tok.arrival == 1);
  CHECK(tok.inst.operand(Symbol::d).has_value);
  CHECK(tok.inst.operand(Symbol::d).internal == 42);
  CHECK_FALSE(o.s.regs.can_read(Operand::reg_ref(1, Role::Read)));
  CHECK(rec.produced.size() == 1);
  CHECK(o.s.stats.fires[o.t("E")] == 1);
}

TEST_CASE("firing a taken branch deposits a reservation token into L1") {
  Ooc o;
  auto slot = o.inject("L1", 0x40000003u);  // B +3
  GuardApproval ap;
  REQUIRE(is_enabled(o.s, o.t("B"), slot, &ap));
  FiringRecord rec;
  fire(o.s, o.t("B"), slot, ap, &rec);
  CHECK(o.s.pc == 4);
  const auto& l1 = o.s.store(o.p("L1"));
  REQUIRE(l1.pending.size() == 1);
  CHECK(o.s.token(l1.pending[0]).kind == TokenKind::Reservation);
  CHECK(o.s.token(slot).place == o.p("BR"));
  CHECK(rec.produced.size() == 2);
}

TEST_CASE("a not-taken branch leaves L1 empty") {
  Ooc o;
  o.s.regs.set_value(1, 5);
  auto slot = o.inject("L1", 0x41010003u);  // BEQZ r1, +3
  GuardApproval ap;
  REQUIRE(is_enabled(o.s, o.t("B"), slot, &ap));
  fire(o.s, o.t("B"), slot, ap);
  CHECK(o.s.store(o.p("L1")).pending.empty());
  CHECK(o.s.pc == 0);
}

TEST_CASE("Bk needs the reservation token and consumes it") {
  Ooc o;
  auto slot = o.inject("L1", 0x40000003u);
  GuardApproval ap;
  REQUIRE(is_enabled(o.s, o.t("B"), slot, &ap));
  fire(o.s, o.t("B"), slot, ap);
  o.s.cycle = 2;
  CHECK_FALSE(is_enabled(o.s, o.t("Bk"), slot));  // reservation still pending
  o.s.commit_pending();
  GuardApproval bk;
  REQUIRE(is_enabled(o.s, o.t("Bk"), slot, &bk));
  FiringRecord rec;
  fire(o.s, o.t("Bk"), slot, bk, &rec);
  CHECK(rec.consumed_reservations.size() == 1);
  CHECK(o.s.store(o.p("L1")).committed.empty());
  CHECK(o.s.stats.instructions == 1);
  CHECK(o.s.drained());
}

TEST_CASE("an action that reads without its guard approval faults") {
  Skeleton sk;
  auto l1 = sk.b.stage("L1", 1);
  auto e = sk.b.end_stage();
  auto p1 = sk.b.place("L1", l1);
  auto pe = sk.b.place("end", e);
  sk.b.entry(p1);
  auto t = sk.b.transition(tr("sneak", sk.any, {drive(p1)}, {to(pe)}, {},
                              [](FiringContext& c) { c.read(Symbol::s1); }));
  auto s = make_state(std::make_shared<const NetModel>(sk.b.build()));
  auto slot = put(s, p1, 0x10123000u);
  s.cycle = 1;
  GuardApproval ap;
  REQUIRE(is_enabled(s, t, slot, &ap));
  try {
    fire(s, t, slot, ap);
    FAIL("expected ActionFault");
  } catch (const SimFault& f) {
    CHECK(f.kind() == FaultKind::ActionFault);
  }
}

TEST_CASE("a register read with a pending writer is refused") {
  Ooc o;
  auto w = Operand::reg_ref(2, Role::Write);
  o.s.regs.reserve_write(w, WriterMark{999, 0, 0});
  auto slot = o.inject("L1", 0x10123000u);  // reads r2
  CHECK_FALSE(is_enabled(o.s, o.t("E"), slot));
  GuardApproval forged;
  forged.read = 0xFF;
  forged.write = 0xFF;
  try {
    fire(o.s, o.t("E"), slot, forged);
    FAIL("expected ActionFault");
  } catch (const SimFault& f) {
    CHECK(f.kind() == FaultKind::ActionFault);
  }
}

TEST_CASE("retiring with an outstanding reservation is reported") {
  NetBuilder b;
  b.independent_subnet("fetch");
  auto alu = b.subnet("alu", {isa::cls::Alu});
  auto rest = b.subnet("rest", {isa::cls::LoadStore, isa::cls::Branch, isa::cls::Halt});
  auto l1 = b.stage("L1", 1);
  auto e = b.end_stage();
  auto p1 = b.place("L1", l1);
  auto pe = b.place("end", e);
  b.entry(p1);
  b.transition(tr("other", rest, {drive(p1)}, {to(pe)}));
  auto t = b.transition(tr("forget", alu, {drive(p1, 0, {G::can_write(Symbol::d)})}, {to(pe)},
                              {U::reserve_write(Symbol::d)},
                           [](FiringContext& c) { c.reserve_write(Symbol::d); }));
  auto s = make_state(std::make_shared<const NetModel>(b.build()));
  auto slot = put(s, p1, 0x10123000u);
  s.cycle = 1;
  GuardApproval ap;
  REQUIRE(is_enabled(s, t, slot, &ap));
  try {
    fire(s, t, slot, ap);
    FAIL("expected DanglingReservation");
  } catch (const SimFault& f) {
    CHECK(f.kind() == FaultKind::DanglingReservation);
  }
}

TEST_CASE("transition delay becomes the output token's residency") {
  Skeleton sk;
  auto l1 = sk.b.stage("L1", 1);
  auto l2 = sk.b.stage("L2", 1);
  auto e = sk.b.end_stage();
  auto p1 = sk.b.place("L1", l1);
  auto p2 = sk.b.place("L2", l2);
  auto pe = sk.b.place("end", e);
  sk.b.entry(p1);
  auto slow = tr("slow", sk.any, {drive(p1)}, {to(p2)});
  slow.delay = 3;
  auto t = sk.b.transition(slow);
  sk.b.transition(tr("done", sk.any, {drive(p2)}, {to(pe)}));
  auto s = make_state(std::make_shared<const NetModel>(sk.b.build()));
  auto slot = put(s, p1, 0x10123000u);
  s.cycle = 1;
  GuardApproval ap;
  REQUIRE(is_enabled(s, t, slot, &ap));
  fire(s, t, slot, ap);
  CHECK(s.token(slot).delay_override == 3u);
}

TEST_CASE("arc transforms rewrite the payload only") {
  Skeleton sk;
  auto l1 = sk.b.stage("L1", 1);
  auto l2 = sk.b.stage("L2", 1);
  auto e = sk.b.end_stage();
  auto p1 = sk.b.place("L1", l1);
  auto p2 = sk.b.place("L2", l2);
  auto pe = sk.b.place("end", e);
  sk.b.entry(p1);
  auto out = to(p2);
  out.transform = [](isa::DecodedInstruction& d) { d.taken = true; };
  auto t = sk.b.transition(tr("mark", sk.any, {drive(p1)}, {out}));
  sk.b.transition(tr("done", sk.any, {drive(p2)}, {to(pe)}));
  auto s = make_state(std::make_shared<const NetModel>(sk.b.build()));
  auto slot = put(s, p1, 0x10123000u);
  s.cycle = 1;
  GuardApproval ap;
  REQUIRE(is_enabled(s, t, slot, &ap));
  fire(s, t, slot, ap);
  CHECK(s.token(slot).inst.taken);
  CHECK(s.token(slot).kind == TokenKind::Instruction);
}

TEST_CASE("spawned micro-operations enter the entry place under its capacity") {
  Skeleton sk;
  auto l1 = sk.b.stage("L1", 2);
  auto l2 = sk.b.stage("L2", 1);
  auto e = sk.b.end_stage();
  auto p1 = sk.b.place("L1", l1);
  auto p2 = sk.b.place("L2", l2);
  auto pe = sk.b.place("end", e);
  sk.b.entry(p1);
  auto split = tr("split", sk.any, {drive(p2)}, {to(pe)}, {},
                  [](FiringContext& c) { c.spawn(isa::decode(0xF0000000u, c.inst().pc)); });
  split.spawn_place = p1;
  split.max_spawns = 1;
  auto t = sk.b.transition(split);
  sk.b.transition(tr("go", sk.any, {drive(p1)}, {to(p2)}));
  auto s = make_state(std::make_shared<const NetModel>(sk.b.build()));
  auto slot = put(s, p2, 0x10123000u);
  put(s, p1, 0x10123000u);
  put(s, p1, 0x10123000u);
  s.commit_pending();
  s.cycle = 1;
  CHECK_FALSE(is_enabled(s, t, slot));  // L1 already full
  auto s2 = make_state(std::make_shared<const NetModel>(sk.b.build()));
  auto slot2 = put(s2, p2, 0x10123000u);
  s2.commit_pending();
  s2.cycle = 1;
  GuardApproval ap;
  REQUIRE(is_enabled(s2, t, slot2, &ap));
  fire(s2, t, slot2, ap);
  CHECK(s2.store(p1).committed.size() + s2.store(p1).pending.size() == 1);
  CHECK(s2.created_instructions == 2);
}

TEST_CASE("guard evaluation leaves the state untouched") {
  Ooc o;
  auto slot = o.inject("L1", 0x10123000u);
  auto before = o.s.regs.cells();
  for (TransitionId t = 0; t < o.m.net->transitions().size(); ++t) {
    if (o.m.net->transition(t).driver().place != o.p("L1")) continue;
    bool a = is_enabled(o.s, t, slot);
    bool b = is_enabled(o.s, t, slot);
    CHECK(a == b);
  }
  for (std::size_t k = 0; k < before.size(); ++k) CHECK(o.s.regs.cells()[k].writer == before[k].writer);
}
