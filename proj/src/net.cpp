#include "rcpn/net.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace rcpn {

const char* to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::ActionFault: return "ActionFault";
    case FaultKind::MaxCyclesExceeded: return "MaxCyclesExceeded";
    case FaultKind::PcOutOfRange: return "PcOutOfRange";
    case FaultKind::IllegalInstruction: return "IllegalInstruction";
    case FaultKind::IllegalMicroOp: return "IllegalMicroOp";
    case FaultKind::DanglingReservation: return "DanglingReservation";
    case FaultKind::AddressOutOfRange: return "AddressOutOfRange";
  }
  return "?";
}

const char* to_string(NetErrorCode code) {
  switch (code) {
    case NetErrorCode::DuplicatePriority: return "DuplicatePriority";
    case NetErrorCode::MissingEndStage: return "MissingEndStage";
    case NetErrorCode::DanglingReference: return "DanglingReference";
    case NetErrorCode::UnpairedHazardInterface: return "UnpairedHazardInterface";
    case NetErrorCode::MultipleInstructionInputArcs: return "MultipleInstructionInputArcs";
    case NetErrorCode::MissingInstructionArc: return "MissingInstructionArc";
    case NetErrorCode::MultipleInstructionOutputArcs: return "MultipleInstructionOutputArcs";
    case NetErrorCode::InvalidCapacity: return "InvalidCapacity";
    case NetErrorCode::UnmappedClass: return "UnmappedClass";
    case NetErrorCode::UndeclaredSymbol: return "UndeclaredSymbol";
    case NetErrorCode::InvalidConditionalArc: return "InvalidConditionalArc";
  }
  return "?";
}

namespace {

std::string join_issues(const std::vector<NetIssue>& issues) {
  std::string out = "invalid net:";
  for (const auto& i : issues) {
    out += "\n  ";
    out += to_string(i.code);
    out += ": ";
    out += i.message;
  }
  return out;
}

}  // namespace

NetValidationError::NetValidationError(std::vector<NetIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

bool NetValidationError::has(NetErrorCode code) const {
  return std::any_of(issues_.begin(), issues_.end(),
                     [&](const NetIssue& i) { return i.code == code; });
}

std::optional<PlaceId> NetModel::find_place(std::string_view name) const {
  for (PlaceId i = 0; i < places_.size(); ++i) {
    if (places_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<StageId> NetModel::find_stage(std::string_view name) const {
  for (StageId i = 0; i < stages_.size(); ++i) {
    if (stages_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<TransitionId> NetModel::find_transition(std::string_view name) const {
  for (TransitionId i = 0; i < transitions_.size(); ++i) {
    if (transitions_[i].name == name) return i;
  }
  return std::nullopt;
}

StageId NetBuilder::stage(std::string name, std::uint32_t capacity, std::string label) {
  if (label.empty()) label = name;
  stages_.push_back({std::move(name), capacity, std::move(label)});
  return static_cast<StageId>(stages_.size() - 1);
}

StageId NetBuilder::end_stage(std::string label) {
  if (label.empty()) label = "end";
  stages_.push_back({"end", std::nullopt, std::move(label)});
  return static_cast<StageId>(stages_.size() - 1);
}

StageId NetBuilder::raw_stage(PipelineStage s) {
  if (s.label.empty()) s.label = s.name;
  stages_.push_back(std::move(s));
  return static_cast<StageId>(stages_.size() - 1);
}

PlaceId NetBuilder::place(std::string name, StageId stage, std::uint32_t delay) {
  places_.push_back({std::move(name), stage, delay});
  return static_cast<PlaceId>(places_.size() - 1);
}

SubnetId NetBuilder::independent_subnet(std::string name) {
  subnets_.push_back({std::move(name), true, {}});
  return static_cast<SubnetId>(subnets_.size() - 1);
}

SubnetId NetBuilder::subnet(std::string name, std::vector<ClassId> classes) {
  subnets_.push_back({std::move(name), false, std::move(classes)});
  return static_cast<SubnetId>(subnets_.size() - 1);
}

TransitionId NetBuilder::transition(Transition t) {
  transitions_.push_back(std::move(t));
  return static_cast<TransitionId>(transitions_.size() - 1);
}

std::vector<NetIssue> NetBuilder::validate() const {
  std::vector<NetIssue> issues;
  auto add = [&](NetErrorCode c, std::string m) { issues.push_back({c, std::move(m)}); };

  // Stages.
  int end_count = 0;
  for (const auto& s : stages_) {
    if (s.name == "end") {
      ++end_count;
      if (s.capacity) add(NetErrorCode::MissingEndStage, "stage 'end' must be unbounded");
    } else if (!s.capacity) {
      add(NetErrorCode::InvalidCapacity, "stage '" + s.name + "' is unbounded but is not the end stage");
    } else if (*s.capacity < 1) {
      add(NetErrorCode::InvalidCapacity, "stage '" + s.name + "' has capacity 0");
    }
  }
  if (end_count != 1) {
    add(NetErrorCode::MissingEndStage,
        "expected exactly one stage named 'end', found " + std::to_string(end_count));
  }

  auto place_ok = [&](PlaceId p) { return p < places_.size(); };
  auto stage_ok = [&](StageId s) { return s < stages_.size(); };

  for (const auto& p : places_) {
    if (!stage_ok(p.stage)) add(NetErrorCode::DanglingReference, "place '" + p.name + "' names an unknown stage");
  }

  if (!entry_) {
    add(NetErrorCode::DanglingReference, "no entry place declared for the fetch sub-net");
  } else if (!place_ok(*entry_)) {
    add(NetErrorCode::DanglingReference, "entry place does not exist");
  } else if (stage_ok(places_[*entry_].stage) && !stages_[places_[*entry_].stage].capacity) {
    add(NetErrorCode::DanglingReference, "entry place lies in the end stage");
  }

  // Sub-nets and class coverage.
  int independent = 0;
  std::map<ClassId, int> class_hits;
  for (const auto& sn : subnets_) {
    if (sn.independent) {
      ++independent;
      continue;
    }
    for (auto c : sn.classes) {
      if (c >= isa::cls::kCount) {
        add(NetErrorCode::DanglingReference, "sub-net '" + sn.name + "' names unknown class " + std::to_string(c));
      } else {
        ++class_hits[c];
      }
    }
  }
  if (independent != 1) {
    add(NetErrorCode::UnmappedClass,
        "expected exactly one instruction independent sub-net, found " + std::to_string(independent));
  }
  for (ClassId c = 0; c < isa::cls::kCount; ++c) {
    int hits = class_hits.count(c) ? class_hits[c] : 0;
    if (hits != 1) {
      add(NetErrorCode::UnmappedClass, "operation class " + isa::operation_class(c).name + " is mapped to " +
                                           std::to_string(hits) + " sub-nets (need exactly 1)");
    }
  }

  // Transitions.
  std::map<std::pair<PlaceId, SubnetId>, std::map<std::uint32_t, std::string>> priorities;
  for (const auto& t : transitions_) {
    const std::string who = "transition '" + t.name + "'";
    bool subnet_ok = t.subnet < subnets_.size() && !subnets_[t.subnet].independent;
    if (!subnet_ok) add(NetErrorCode::DanglingReference, who + " is not in an instruction sub-net");

    int drivers = 0;
    const InputArc* driver = nullptr;
    for (const auto& a : t.inputs) {
      if (!place_ok(a.place)) {
        add(NetErrorCode::DanglingReference, who + " has an input arc from an unknown place");
        continue;
      }
      for (const auto& g : a.guard) {
        if (g.kind == GuardKind::CanReadIn && !stage_ok(g.stage)) {
          add(NetErrorCode::DanglingReference, who + " guard names an unknown stage");
        }
        if (g.kind == GuardKind::Predicate && !g.pred) {
          add(NetErrorCode::DanglingReference, who + " guard predicate is null");
        }
      }
      if (a.kind == ArcKind::Instruction) {
        ++drivers;
        driver = &a;
        if (subnet_ok) {
          auto& seen = priorities[{a.place, t.subnet}];
          auto [it, fresh] = seen.emplace(a.priority, t.name);
          if (!fresh) {
            add(NetErrorCode::DuplicatePriority,
                "place '" + places_[a.place].name + "' has two arcs into sub-net '" + subnets_[t.subnet].name +
                    "' with priority " + std::to_string(a.priority) + " ('" + it->second + "', '" + t.name + "')");
          }
        }
      }
    }
    if (drivers == 0) add(NetErrorCode::MissingInstructionArc, who + " has no instruction input arc");
    if (drivers > 1) add(NetErrorCode::MultipleInstructionInputArcs, who + " has " + std::to_string(drivers) + " instruction input arcs");

    int inst_outputs = 0;
    for (const auto& a : t.outputs) {
      if (!place_ok(a.place)) {
        add(NetErrorCode::DanglingReference, who + " has an output arc to an unknown place");
        continue;
      }
      if (a.kind == ArcKind::Instruction) {
        ++inst_outputs;
        if (a.conditional) add(NetErrorCode::InvalidConditionalArc, who + " has a conditional instruction output");
      } else if (a.transform) {
        add(NetErrorCode::InvalidConditionalArc, who + " transforms a reservation token");
      }
    }
    if (inst_outputs != 1) {
      add(NetErrorCode::MultipleInstructionOutputArcs,
          who + " must have exactly one instruction output arc, has " + std::to_string(inst_outputs));
    }
    if (t.spawn_place && !place_ok(*t.spawn_place)) {
      add(NetErrorCode::DanglingReference, who + " spawns into an unknown place");
    }

    // Paired interfaces: effectful calls need their Boolean twin in the
    // driving arc's guard.
    if (driver) {
      auto guarded = [&](GuardKind k, isa::Symbol s, StageId st) {
        return std::any_of(driver->guard.begin(), driver->guard.end(), [&](const GuardCondition& g) {
          if (g.kind != k) return false;
          if (k == GuardKind::AllSourcesReadable || k == GuardKind::AllDestsWritable) return true;
          return g.sym == s && (k != GuardKind::CanReadIn || g.stage == st);
        });
      };
      for (const auto& u : t.uses) {
        bool ok = false;
        std::string what;
        switch (u.iface) {
          case Interface::Read:
            ok = guarded(GuardKind::CanRead, u.sym, 0) || guarded(GuardKind::AllSourcesReadable, u.sym, 0);
            what = std::string(isa::symbol_name(u.sym)) + ".read() without " + isa::symbol_name(u.sym) + ".canRead()";
            break;
          case Interface::ReserveWrite:
            ok = guarded(GuardKind::CanWrite, u.sym, 0) || guarded(GuardKind::AllDestsWritable, u.sym, 0);
            what = std::string(isa::symbol_name(u.sym)) + ".reserveWrite() without " + isa::symbol_name(u.sym) +
                   ".canWrite()";
            break;
          case Interface::ReadFrom:
            ok = guarded(GuardKind::CanReadIn, u.sym, u.stage);
            what = std::string(isa::symbol_name(u.sym)) + ".read(s) without a matching canRead(s)";
            break;
          case Interface::ReadAllSources:
            ok = guarded(GuardKind::AllSourcesReadable, u.sym, 0);
            what = "read of all sources without an all-sources-readable guard";
            break;
          case Interface::ReserveAllDests:
            ok = guarded(GuardKind::AllDestsWritable, u.sym, 0);
            what = "reservation of all destinations without an all-destinations-writable guard";
            break;
        }
        if (!ok) add(NetErrorCode::UnpairedHazardInterface, who + ": " + what);
      }
    }

    // Every named symbol must exist in every class served by the sub-net.
    if (subnet_ok) {
      std::set<isa::Symbol> named;
      for (const auto& a : t.inputs) {
        for (const auto& g : a.guard) {
          if (g.kind == GuardKind::CanRead || g.kind == GuardKind::CanWrite || g.kind == GuardKind::CanReadIn) {
            named.insert(g.sym);
          }
        }
      }
      for (const auto& u : t.uses) {
        if (u.iface == Interface::Read || u.iface == Interface::ReserveWrite || u.iface == Interface::ReadFrom) {
          named.insert(u.sym);
        }
      }
      for (auto c : subnets_[t.subnet].classes) {
        if (c >= isa::cls::kCount) continue;
        auto syms = isa::operation_class(c).symbols();
        for (auto s : named) {
          if (std::find(syms.begin(), syms.end(), s) == syms.end()) {
            add(NetErrorCode::UndeclaredSymbol, who + " uses symbol '" + isa::symbol_name(s) +
                                                    "' not declared by class " + isa::operation_class(c).name);
          }
        }
      }
    }
  }
  return issues;
}

NetModel NetBuilder::build() const {
  auto issues = validate();
  if (!issues.empty()) throw NetValidationError(std::move(issues));

  NetModel net;
  net.stages_ = stages_;
  net.places_ = places_;
  net.transitions_ = transitions_;
  net.subnets_ = subnets_;
  net.entry_place_ = *entry_;
  for (StageId s = 0; s < stages_.size(); ++s) {
    if (stages_[s].name == "end") net.end_stage_ = s;
  }
  for (SubnetId sn = 0; sn < subnets_.size(); ++sn) {
    for (auto c : subnets_[sn].classes) net.class_subnet_[c] = sn;
  }

  for (auto& t : net.transitions_) {
    std::map<StageId, std::int32_t> delta;
    std::set<StageId> touched;
    for (std::size_t i = 0; i < t.inputs.size(); ++i) {
      if (t.inputs[i].kind == ArcKind::Instruction) t.driver_input = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < t.outputs.size(); ++i) {
      if (t.outputs[i].kind == ArcKind::Instruction) t.instruction_output = static_cast<int>(i);
      StageId s = net.places_[t.outputs[i].place].stage;
      ++delta[s];
      touched.insert(s);
    }
    if (t.spawn_place) {
      StageId s = net.places_[*t.spawn_place].stage;
      delta[s] += static_cast<std::int32_t>(t.max_spawns);
      touched.insert(s);
    }
    for (const auto& a : t.inputs) --delta[net.places_[a.place].stage];
    for (auto s : touched) {
      if (s != net.end_stage_) t.stage_delta.emplace_back(s, delta[s]);
    }
  }
  return net;
}

std::uint32_t effective_delay(const Token& token, const Place& place) {
  return token.delay_override ? *token.delay_override : place.delay;
}

bool is_eligible(const Token& token, const Place& place, Cycle cycle) {
  return cycle >= token.arrival + effective_delay(token, place);
}

std::vector<std::vector<PlaceId>> place_graph(const NetModel& net) {
  const auto n = net.places().size();
  std::vector<std::set<PlaceId>> adj(n);
  std::vector<std::vector<PlaceId>> stage_places(net.stages().size());
  for (PlaceId p = 0; p < n; ++p) stage_places[net.stage_of(p)].push_back(p);

  for (const auto& t : net.transitions()) {
    std::set<PlaceId> sources, targets;
    for (const auto& a : t.inputs) {
      sources.insert(a.place);
      for (const auto& g : a.guard) {
        if (g.kind == GuardKind::CanReadIn) {
          for (auto p : stage_places[g.stage]) sources.insert(p);
        }
      }
    }
    for (const auto& a : t.outputs) targets.insert(a.place);
    if (t.spawn_place) targets.insert(*t.spawn_place);
    for (auto s : sources) {
      for (auto d : targets) adj[s].insert(d);
    }
  }
  std::vector<std::vector<PlaceId>> out(n);
  for (PlaceId p = 0; p < n; ++p) out[p].assign(adj[p].begin(), adj[p].end());
  return out;
}

namespace {

// Tarjan's algorithm; returns the component index of every vertex and the
// number of components. Components are numbered in reverse topological order.
struct Sccs {
  std::vector<int> component;
  int count = 0;
};

class Tarjan {
 public:
  explicit Tarjan(const std::vector<std::vector<PlaceId>>& graph)
      : graph_(graph), index_(graph.size(), -1), low_(graph.size(), 0), on_stack_(graph.size(), false) {
    result_.component.assign(graph.size(), -1);
  }

  Sccs run() {
    for (PlaceId v = 0; v < graph_.size(); ++v) {
      if (index_[v] < 0) visit(v);
    }
    return result_;
  }

 private:
  void visit(PlaceId v) {
    index_[v] = low_[v] = next_++;
    stack_.push_back(v);
    on_stack_[v] = true;
    for (auto w : graph_[v]) {
      if (index_[w] < 0) {
        visit(w);
        low_[v] = std::min(low_[v], low_[w]);
      } else if (on_stack_[w]) {
        low_[v] = std::min(low_[v], index_[w]);
      }
    }
    if (low_[v] == index_[v]) {
      PlaceId w;
      do {
        w = stack_.back();
        stack_.pop_back();
        on_stack_[w] = false;
        result_.component[w] = result_.count;
      } while (w != v);
      ++result_.count;
    }
  }

  const std::vector<std::vector<PlaceId>>& graph_;
  std::vector<int> index_, low_;
  std::vector<bool> on_stack_;
  std::vector<PlaceId> stack_;
  int next_ = 0;
  Sccs result_;
};

}  // namespace

std::vector<PlaceId> cyclic_places(const NetModel& net) {
  auto graph = place_graph(net);
  auto sccs = Tarjan(graph).run();
  std::vector<int> size(sccs.count, 0);
  for (auto c : sccs.component) ++size[c];
  std::vector<PlaceId> out;
  for (PlaceId p = 0; p < graph.size(); ++p) {
    bool self_loop = std::binary_search(graph[p].begin(), graph[p].end(), p);
    if (size[sccs.component[p]] > 1 || self_loop) out.push_back(p);
  }
  return out;
}

std::vector<PlaceId> place_order(const NetModel& net) {
  auto graph = place_graph(net);
  auto sccs = Tarjan(graph).run();
  const int k = sccs.count;

  std::vector<std::vector<PlaceId>> members(k);
  for (PlaceId p = 0; p < graph.size(); ++p) members[sccs.component[p]].push_back(p);

  std::vector<std::set<int>> succ(k);
  std::vector<int> indegree(k, 0);
  for (PlaceId p = 0; p < graph.size(); ++p) {
    for (auto q : graph[p]) {
      int a = sccs.component[p], b = sccs.component[q];
      if (a != b && succ[a].insert(b).second) ++indegree[b];
    }
  }

  // Kahn's algorithm on the condensation, preferring the component whose
  // first-declared place comes earliest; then reverse.
  auto key = [&](int c) { return members[c].front(); };
  std::set<std::pair<PlaceId, int>> ready;
  for (int c = 0; c < k; ++c) {
    if (indegree[c] == 0) ready.insert({key(c), c});
  }
  std::vector<int> topo;
  while (!ready.empty()) {
    int c = ready.begin()->second;
    ready.erase(ready.begin());
    topo.push_back(c);
    for (int s : succ[c]) {
      if (--indegree[s] == 0) ready.insert({key(s), s});
    }
  }

  std::vector<PlaceId> order;
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    for (auto p : members[*it]) order.push_back(p);
  }
  return order;
}

}  // namespace rcpn
