#include <algorithm>
#include <random>

#include "doctest.h"
#include "rcpn/models.hpp"
#include "support/helpers.hpp"

using namespace rcpn;
using namespace th;
using G = GuardCondition;
using U = OperandUse;
using isa::Symbol;

namespace {

std::vector<std::string> names(const NetModel& net, const std::vector<PlaceId>& ps) {
  std::vector<std::string> out;
  for (auto p : ps) out.push_back(net.place(p).name);
  return out;
}

NetErrorCode only_error(const NetBuilder& b) {
  auto issues = b.validate();
  REQUIRE(issues.size() >= 1);
  return issues.front().code;
}

bool has_error(const NetBuilder& b, NetErrorCode code) {
  auto issues = b.validate();
  return std::any_of(issues.begin(), issues.end(), [&](const NetIssue& i) { return i.code == code; });
}

// L1 -> L2 -> L3 -> end, no hazards.
NetModel linear(bool self_loop = false) {
  Skeleton s;
  auto l1 = s.b.stage("L1", 1);
  auto l2 = s.b.stage("L2", 1);
  auto l3 = s.b.stage("L3", 1);
  auto e = s.b.end_stage();
  auto p1 = s.b.place("L1", l1);
  auto p2 = s.b.place("L2", l2);
  auto p3 = s.b.place("L3", l3);
  auto pe = s.b.place("end", e);
  s.b.entry(p1);
  s.b.transition(tr("a", s.any, {drive(p1)}, {to(p2)}));
  s.b.transition(tr("b", s.any, {drive(p2)}, {to(p3)}));
  s.b.transition(tr("c", s.any, {drive(p3)}, {to(pe)}));
  if (self_loop) s.b.transition(tr("spin", s.any, {drive(p2, 1)}, {to(p2)}));
  return s.b.build();
}

}  // namespace

TEST_CASE("bundled models validate") {
  for (const auto& name : model_names()) {
    CAPTURE(name);
    CHECK_NOTHROW(model_by_name(name));
  }
  auto fig2 = build_fig2_model();
  CHECK(fig2.net->stages().size() == 3);
  CHECK(fig2.net->find_stage("L1"));
  CHECK(fig2.net->find_stage("L2"));
  CHECK(fig2.net->find_stage("end"));
  int instruction_subnets = 0;
  for (const auto& sn : fig2.net->subnets()) instruction_subnets += !sn.independent;
  CHECK(instruction_subnets >= 2);
}

TEST_CASE("duplicate priority into one sub-net") {
  Skeleton s;
  auto l1 = s.b.stage("L1", 1);
  auto e = s.b.end_stage();
  auto p1 = s.b.place("L1", l1);
  auto pe = s.b.place("end", e);
  s.b.entry(p1);
  s.b.transition(tr("x", s.any, {drive(p1, 0)}, {to(pe)}));
  s.b.transition(tr("y", s.any, {drive(p1, 0)}, {to(pe)}));
  CHECK(only_error(s.b) == NetErrorCode::DuplicatePriority);
  CHECK_THROWS_AS(s.b.build(), NetValidationError);
}

TEST_CASE("equal priorities in different sub-nets are fine") {
  NetBuilder b;
  b.independent_subnet("fetch");
  auto a = b.subnet("a", {isa::cls::Alu, isa::cls::LoadStore});
  auto c = b.subnet("c", {isa::cls::Branch, isa::cls::Halt});
  auto l1 = b.stage("L1", 1);
  auto e = b.end_stage();
  auto p1 = b.place("L1", l1);
  auto pe = b.place("end", e);
  b.entry(p1);
  b.transition(tr("x", a, {drive(p1, 0)}, {to(pe)}));
  b.transition(tr("y", c, {drive(p1, 0)}, {to(pe)}));
  CHECK(b.validate().empty());
}

TEST_CASE("reserveWrite without canWrite in the guard") {
  Skeleton s;
  auto l1 = s.b.stage("L1", 1);
  auto e = s.b.end_stage();
  auto p1 = s.b.place("L1", l1);
  auto pe = s.b.place("end", e);
  s.b.entry(p1);
  s.b.transition(tr("x", s.any, {drive(p1, 0, {G::can_read(Symbol::s1)})}, {to(pe)},
                    {U::read(Symbol::s1), U::reserve_write(Symbol::d)}));
  CHECK(only_error(s.b) == NetErrorCode::UnpairedHazardInterface);
}

TEST_CASE("read(s) must be paired with canRead(s) for the same stage") {
  Skeleton s;
  auto l1 = s.b.stage("L1", 1);
  auto l2 = s.b.stage("L2", 1);
  auto e = s.b.end_stage();
  auto p1 = s.b.place("L1", l1);
  auto p2 = s.b.place("L2", l2);
  auto pe = s.b.place("end", e);
  s.b.entry(p1);
  s.b.transition(tr("x", s.any, {drive(p1, 0, {G::can_read_in(Symbol::s1, l1)})}, {to(p2)},
                    {U::read_from(Symbol::s1, l2)}));
  s.b.transition(tr("y", s.any, {drive(p2)}, {to(pe)}));
  CHECK(has_error(s.b, NetErrorCode::UnpairedHazardInterface));
}

TEST_CASE("missing end stage") {
  NetBuilder b;
  b.independent_subnet("fetch");
  auto any = b.subnet("all", {isa::cls::Alu, isa::cls::LoadStore, isa::cls::Branch, isa::cls::Halt});
  auto l1 = b.stage("L1", 1);
  auto l2 = b.stage("L2", 1);
  auto p1 = b.place("L1", l1);
  auto p2 = b.place("L2", l2);
  b.entry(p1);
  b.transition(tr("x", any, {drive(p1)}, {to(p2)}));
  CHECK(has_error(b, NetErrorCode::MissingEndStage));
}

TEST_CASE("dangling references") {
  Skeleton s;
  auto l1 = s.b.stage("L1", 1);
  auto e = s.b.end_stage();
  auto p1 = s.b.place("L1", l1);
  s.b.place("end", e);
  s.b.place("ghost", 42);
  s.b.entry(p1);
  s.b.transition(tr("x", s.any, {drive(p1)}, {to(17)}));
  CHECK(has_error(s.b, NetErrorCode::DanglingReference));
}

TEST_CASE("two instruction input arcs") {
  Skeleton s;
  auto l1 = s.b.stage("L1", 1);
  auto l2 = s.b.stage("L2", 1);
  auto e = s.b.end_stage();
  auto p1 = s.b.place("L1", l1);
  auto p2 = s.b.place("L2", l2);
  auto pe = s.b.place("end", e);
  s.b.entry(p1);
  s.b.transition(tr("x", s.any, {drive(p1), drive(p2, 1)}, {to(pe)}));
  CHECK(has_error(s.b, NetErrorCode::MultipleInstructionInputArcs));
}

TEST_CASE("capacity and end-stage rules") {
  NetBuilder b;
  b.independent_subnet("fetch");
  auto any = b.subnet("all", {isa::cls::Alu, isa::cls::LoadStore, isa::cls::Branch, isa::cls::Halt});
  auto l1 = b.raw_stage({"L1", 0u, ""});
  auto e = b.end_stage();
  auto p1 = b.place("L1", l1);
  auto pe = b.place("end", e);
  b.entry(p1);
  b.transition(tr("x", any, {drive(p1)}, {to(pe)}));
  CHECK(has_error(b, NetErrorCode::InvalidCapacity));
}

TEST_CASE("every class needs a sub-net") {
  NetBuilder b;
  b.independent_subnet("fetch");
  auto alu = b.subnet("alu", {isa::cls::Alu});
  auto l1 = b.stage("L1", 1);
  auto e = b.end_stage();
  auto p1 = b.place("L1", l1);
  auto pe = b.place("end", e);
  b.entry(p1);
  b.transition(tr("x", alu, {drive(p1)}, {to(pe)}));
  CHECK(has_error(b, NetErrorCode::UnmappedClass));
}

TEST_CASE("effective_delay") {
  Place p{"L1", 0, 1};
  Token t;
  CHECK(effective_delay(t, p) == 1);
  t.delay_override = 4;
  CHECK(effective_delay(t, p) == 4);
  Place slow{"L2", 0, 3};
  t.delay_override = 0;
  CHECK(effective_delay(t, slow) == 0);
}

TEST_CASE("is_eligible") {
  Place p{"L1", 0, 1};
  Token t;
  t.arrival = 5;
  CHECK(is_eligible(t, p, 6));
  CHECK_FALSE(is_eligible(t, p, 5));
  t.delay_override = 4;
  CHECK_FALSE(is_eligible(t, p, 8));
  CHECK(is_eligible(t, p, 9));
}

TEST_CASE("eligibility formula agrees with a brute-force count") {
  // a token is eligible once it has sat through delay full cycles
  std::mt19937 rng(3);
  for (int i = 0; i < 500; ++i) {
    Place p{"P", 0, static_cast<std::uint32_t>(rng() % 5)};
    Token t;
    t.arrival = rng() % 100;
    if (rng() % 2) t.delay_override = rng() % 6;
    std::uint32_t need = t.delay_override ? *t.delay_override : p.delay;
    for (Cycle c = t.arrival; c < t.arrival + 10; ++c) {
      std::uint32_t waited = 0;
      for (Cycle k = t.arrival; k < c; ++k) ++waited;
      CHECK(is_eligible(t, p, c) == (waited >= need));
    }
  }
}

TEST_CASE("cyclic places") {
  auto ooc = build_example_ooc_model();
  CHECK(names(*ooc.net, cyclic_places(*ooc.net)) == std::vector<std::string>{"L1", "L3"});
  CHECK(cyclic_places(*build_fig2_model().net).empty());
  CHECK(cyclic_places(linear()).empty());
  auto looped = linear(true);
  CHECK(names(looped, cyclic_places(looped)) == std::vector<std::string>{"L2"});
}

TEST_CASE("scalar5 cycle set matches the hand enumeration") {
  // IDEX -> EXMEM -> IDEX and IDEX -> EXMEM -> MEMWB -> IDEX through the
  // forwarding observations; IFID loops on itself through the branch
  // reservation.
  auto s5 = build_scalar5_model();
  auto got = names(*s5.net, cyclic_places(*s5.net));
  std::sort(got.begin(), got.end());
  CHECK(got == std::vector<std::string>{"EXMEM", "IDEX", "IFID", "MEMWB"});
  auto plain = build_scalar5_model(false);
  CHECK(names(*plain.net, cyclic_places(*plain.net)) == std::vector<std::string>{"IFID"});
}

TEST_CASE("place order") {
  auto lin = linear();
  CHECK(names(lin, place_order(lin)) == std::vector<std::string>{"end", "L3", "L2", "L1"});

  Skeleton s;
  auto l1 = s.b.stage("L1", 1);
  auto e = s.b.end_stage();
  auto p1 = s.b.place("L1", l1);
  s.b.place("end", e);
  s.b.entry(p1);
  s.b.transition(tr("x", s.any, {drive(p1)}, {to(p1)}));
  auto single = s.b.build();
  auto order = place_order(single);
  CHECK(std::find(order.begin(), order.end(), p1) != order.end());

  auto ooc = build_example_ooc_model();
  auto o = names(*ooc.net, place_order(*ooc.net));
  auto pos = [&](const std::string& n) { return std::find(o.begin(), o.end(), n) - o.begin(); };
  CHECK(pos("L3") < pos("L2"));
  CHECK(pos("L4") < pos("L2"));
  CHECK(pos("L2") < pos("L1"));
  CHECK(pos("BR") < pos("L1"));
}

TEST_CASE("acyclic outputs are processed before the places feeding them") {
  for (const auto& name : model_names()) {
    auto m = model_by_name(name);
    const auto& net = *m.net;
    auto order = place_order(net);
    auto cyc = cyclic_places(net);
    std::vector<std::size_t> index(net.places().size());
    for (std::size_t i = 0; i < order.size(); ++i) index[order[i]] = i;
    CHECK(order.size() == net.places().size());
    for (const auto& t : net.transitions()) {
      for (const auto& out : t.outputs) {
        if (std::binary_search(cyc.begin(), cyc.end(), out.place)) continue;
        for (const auto& in : t.inputs) {
          CAPTURE(name);
          CAPTURE(t.name);
          CHECK(index[out.place] < index[in.place]);
        }
      }
    }
  }
}

TEST_CASE("place graph edges") {
  auto lin = linear();
  auto g = place_graph(lin);
  CHECK(g[0] == std::vector<PlaceId>{1});
  CHECK(g[1] == std::vector<PlaceId>{2});
  CHECK(g[2] == std::vector<PlaceId>{3});
  CHECK(g[3].empty());
}
