#pragma once

// Reduced Colored Petri Net model description.
//
// Places are bound to pipeline stages and share the stage's capacity.
// Transitions belong to one sub-net; every operation class maps to exactly
// one sub-net, and one extra "independent" sub-net generates instruction
// tokens (fetch). A transition is driven by exactly one instruction input arc
// and may additionally consume reservation tokens.

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcpn/common.hpp"
#include "rcpn/isa.hpp"

namespace rcpn {

enum class TokenKind : std::uint8_t { Reservation, Instruction };

struct Token {
  TokenId id = kNoToken;
  TokenKind kind = TokenKind::Instruction;
  Cycle arrival = 0;
  std::optional<std::uint32_t> delay_override;
  PlaceId place = 0;
  bool pending = false;
  isa::DecodedInstruction inst;  // meaningless for reservation tokens
};

struct PipelineStage {
  std::string name;
  std::optional<std::uint32_t> capacity;  // nullopt: unbounded
  std::string label;                      // short name for diagrams
};

struct Place {
  std::string name;
  StageId stage = 0;
  std::uint32_t delay = 1;
};

enum class ArcKind : std::uint8_t { Instruction, Reservation };

enum class GuardKind : std::uint8_t {
  CanRead,
  CanWrite,
  CanReadIn,
  AllSourcesReadable,
  AllDestsWritable,
  Predicate,
};

using TokenPredicate = bool (*)(const isa::DecodedInstruction&);

struct GuardCondition {
  GuardKind kind = GuardKind::Predicate;
  isa::Symbol sym{};
  StageId stage = 0;
  TokenPredicate pred = nullptr;
  const char* pred_name = "";

  static GuardCondition can_read(isa::Symbol s) { return {GuardKind::CanRead, s}; }
  static GuardCondition can_write(isa::Symbol s) { return {GuardKind::CanWrite, s}; }
  static GuardCondition can_read_in(isa::Symbol s, StageId stage) {
    return {GuardKind::CanReadIn, s, stage};
  }
  static GuardCondition all_sources_readable() {
    return {GuardKind::AllSourcesReadable};
  }
  static GuardCondition all_dests_writable() {
    return {GuardKind::AllDestsWritable};
  }
  static GuardCondition predicate(const char* name, TokenPredicate fn) {
    return {GuardKind::Predicate, {}, 0, fn, name};
  }
};

struct InputArc {
  PlaceId place = 0;
  ArcKind kind = ArcKind::Instruction;
  std::uint32_t priority = 0;
  std::vector<GuardCondition> guard;  // conjunction
};

// Payload-only mapping; a transform never changes a token's kind.
using PayloadTransform = void (*)(isa::DecodedInstruction&);

struct OutputArc {
  PlaceId place = 0;
  ArcKind kind = ArcKind::Instruction;
  // Conditional reservation outputs are produced only when the action asks
  // for them; capacity is still checked as if they were.
  bool conditional = false;
  PayloadTransform transform = nullptr;
};

// Effectful register interfaces a transition action may call. Each one must
// be paired with its Boolean counterpart in the driving arc's guard.
enum class Interface : std::uint8_t {
  Read,              // needs CanRead(sym)
  ReserveWrite,      // needs CanWrite(sym)
  ReadFrom,          // needs CanReadIn(sym, stage)
  ReadAllSources,    // needs AllSourcesReadable
  ReserveAllDests,   // needs AllDestsWritable
};

struct OperandUse {
  Interface iface;
  isa::Symbol sym{};
  StageId stage = 0;

  static OperandUse read(isa::Symbol s) { return {Interface::Read, s}; }
  static OperandUse reserve_write(isa::Symbol s) { return {Interface::ReserveWrite, s}; }
  static OperandUse read_from(isa::Symbol s, StageId st) { return {Interface::ReadFrom, s, st}; }
  static OperandUse read_all_sources() { return {Interface::ReadAllSources}; }
  static OperandUse reserve_all_dests() { return {Interface::ReserveAllDests}; }
};

class FiringContext;
using Action = std::function<void(FiringContext&)>;

struct Transition {
  std::string name;
  SubnetId subnet = 0;
  std::vector<InputArc> inputs;
  std::vector<OutputArc> outputs;
  std::optional<std::uint32_t> delay;
  std::vector<OperandUse> uses;
  Action action;
  // Multi-micro-op support: up to max_spawns new instruction tokens may be
  // emitted into spawn_place per firing.
  std::optional<PlaceId> spawn_place;
  std::uint32_t max_spawns = 0;

  // Derived by NetBuilder::build().
  int driver_input = -1;
  int instruction_output = -1;
  std::vector<std::pair<StageId, std::int32_t>> stage_delta;

  const InputArc& driver() const { return inputs[driver_input]; }
};

struct Subnet {
  std::string name;
  bool independent = false;
  std::vector<ClassId> classes;
};

enum class NetErrorCode {
  DuplicatePriority,
  MissingEndStage,
  DanglingReference,
  UnpairedHazardInterface,
  MultipleInstructionInputArcs,
  MissingInstructionArc,
  MultipleInstructionOutputArcs,
  InvalidCapacity,
  UnmappedClass,
  UndeclaredSymbol,
  InvalidConditionalArc,
};

const char* to_string(NetErrorCode code);

struct NetIssue {
  NetErrorCode code;
  std::string message;
};

class NetValidationError : public std::runtime_error {
 public:
  explicit NetValidationError(std::vector<NetIssue> issues);
  const std::vector<NetIssue>& issues() const { return issues_; }
  bool has(NetErrorCode code) const;

 private:
  std::vector<NetIssue> issues_;
};

class NetModel {
 public:
  const std::vector<PipelineStage>& stages() const { return stages_; }
  const std::vector<Place>& places() const { return places_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::vector<Subnet>& subnets() const { return subnets_; }

  const PipelineStage& stage(StageId id) const { return stages_[id]; }
  const Place& place(PlaceId id) const { return places_[id]; }
  const Transition& transition(TransitionId id) const { return transitions_[id]; }
  StageId stage_of(PlaceId p) const { return places_[p].stage; }
  bool is_end_place(PlaceId p) const { return places_[p].stage == end_stage_; }

  SubnetId subnet_of(ClassId cls) const { return class_subnet_[cls]; }
  PlaceId entry_place() const { return entry_place_; }
  StageId end_stage() const { return end_stage_; }

  std::optional<PlaceId> find_place(std::string_view name) const;
  std::optional<StageId> find_stage(std::string_view name) const;
  std::optional<TransitionId> find_transition(std::string_view name) const;

 private:
  friend class NetBuilder;

  std::vector<PipelineStage> stages_;
  std::vector<Place> places_;
  std::vector<Transition> transitions_;
  std::vector<Subnet> subnets_;
  std::array<SubnetId, isa::cls::kCount> class_subnet_{};
  PlaceId entry_place_ = 0;
  StageId end_stage_ = 0;
};

class NetBuilder {
 public:
  StageId stage(std::string name, std::uint32_t capacity, std::string label = {});
  // The virtual final stage, named "end", with unlimited capacity.
  StageId end_stage(std::string label = {});
  // Escape hatch for tests that need malformed stages.
  StageId raw_stage(PipelineStage s);

  PlaceId place(std::string name, StageId stage, std::uint32_t delay = 1);

  SubnetId independent_subnet(std::string name);
  SubnetId subnet(std::string name, std::vector<ClassId> classes);

  TransitionId transition(Transition t);
  void entry(PlaceId place) { entry_ = place; }

  std::vector<NetIssue> validate() const;
  // Throws NetValidationError listing every problem found.
  NetModel build() const;

 private:
  std::vector<PipelineStage> stages_;
  std::vector<Place> places_;
  std::vector<Transition> transitions_;
  std::vector<Subnet> subnets_;
  std::optional<PlaceId> entry_;
};

std::uint32_t effective_delay(const Token& token, const Place& place);
bool is_eligible(const Token& token, const Place& place, Cycle cycle);

// Place dependency graph: an edge p -> q for every transition that consumes
// from (or observes, via a forwarding guard) p and deposits into q.
std::vector<std::vector<PlaceId>> place_graph(const NetModel& net);

// Places on a directed cycle of the place graph, ascending by id. These are
// the places that need double-buffered (two-list) token storage.
std::vector<PlaceId> cyclic_places(const NetModel& net);

// Reverse topological order of the strongly connected components, members of
// one component in declaration order.
std::vector<PlaceId> place_order(const NetModel& net);

}  // namespace rcpn
