#include "rcpn/engine.hpp"

#include <algorithm>
#include <chrono>

namespace rcpn {

SortedTransitionsTable::SortedTransitionsTable(const NetModel& net)
    : lists_(net.places().size() * isa::cls::kCount) {
  for (PlaceId p = 0; p < net.places().size(); ++p) {
    for (ClassId c = 0; c < isa::cls::kCount; ++c) {
      std::vector<std::pair<std::uint32_t, TransitionId>> found;
      for (TransitionId t = 0; t < net.transitions().size(); ++t) {
        const auto& tr = net.transition(t);
        if (tr.subnet == net.subnet_of(c) && tr.driver().place == p) {
          found.emplace_back(tr.driver().priority, t);
        }
      }
      std::sort(found.begin(), found.end());
      auto& list = lists_[p * isa::cls::kCount + c];
      for (const auto& f : found) list.push_back(f.second);
    }
  }
}

void SortedTransitionsTable::corrupt() {
  for (auto& list : lists_) {
    if (list.size() >= 2) list.erase(list.begin());
  }
}

std::vector<TransitionId> scan_candidates(const NetModel& net, PlaceId place, ClassId cls) {
  std::vector<TransitionId> out;
  for (TransitionId t = 0; t < net.transitions().size(); ++t) {
    const auto& tr = net.transition(t);
    if (tr.subnet != net.subnet_of(cls)) continue;
    if (tr.driver().place != place) continue;
    out.push_back(t);
  }
  std::stable_sort(out.begin(), out.end(), [&](TransitionId a, TransitionId b) {
    return net.transition(a).driver().priority < net.transition(b).driver().priority;
  });
  return out;
}

namespace {

MemoryUnit make_memory(const ModelDescriptor& model, const RunConfig& config) {
  auto size = config.mem_size_words.value_or(model.config.mem_size_words);
  if (config.mem_latency) return MemoryUnit(size, *config.mem_latency);
  if (model.config.latency_fn) return MemoryUnit(size, model.config.latency_fn);
  return MemoryUnit(size, model.config.mem_latency);
}

class Kernel {
 public:
  Kernel(EngineKind kind, const ModelDescriptor& model, const std::vector<Word>& program, const RunConfig& config)
      : kind_(kind),
        config_(config),
        state_(model.net, model.layout, make_memory(model, config), program, kind == EngineKind::Optimized),
        order_(place_order(*model.net)) {
    if (kind_ == EngineKind::Optimized) {
      table_.emplace(*model.net);
      if (config.inject_table_fault) table_->corrupt();
    }
  }

  RunOutcome run() {
    RunOutcome out;
    auto start = std::chrono::steady_clock::now();
    try {
      while (!(state_.fetch_halted && state_.drained())) {
        if (state_.cycle >= config_.max_cycles) {
          throw SimFault(FaultKind::MaxCyclesExceeded, state_.cycle,
                         "no clean halt within " + std::to_string(config_.max_cycles) + " cycles");
        }
        step(out);
      }
    } catch (const SimFault& f) {
      out.fault = f;
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    state_.stats.cycles = state_.cycle;
    if (kind_ == EngineKind::Optimized) {
      state_.stats.decode_hits = cache_.hits();
      state_.stats.decode_misses = cache_.misses();
    }
    out.stats = state_.stats;
    for (std::uint16_t r = 0; r < state_.regs.register_count(); ++r) out.registers.push_back(state_.regs.value(r));
    out.memory = state_.mem.data();
    return out;
  }

 private:
  const std::vector<TransitionId>& candidates(PlaceId p, ClassId cls) {
    if (table_) return table_->at(p, cls);
    scratch_ = scan_candidates(state_.net(), p, cls);
    return scratch_;
  }

  isa::DecodedInstruction decode(Word word, Word pc) {
    try {
      if (kind_ == EngineKind::Optimized) return cache_.decode(word, pc);
      return isa::decode(word, pc);
    } catch (const isa::IllegalInstruction& e) {
      throw SimFault(FaultKind::IllegalInstruction, state_.cycle, e.what());
    } catch (const isa::IllegalMicroOp& e) {
      throw SimFault(FaultKind::IllegalMicroOp, state_.cycle, e.what());
    }
  }

  void process_place(PlaceId p) {
    const Place& place = state_.net().place(p);
    ready_.clear();
    for (auto slot : state_.store(p).committed) {
      const Token& t = state_.token(slot);
      if (t.kind == TokenKind::Instruction && is_eligible(t, place, state_.cycle)) ready_.push_back(slot);
    }
    for (auto slot : ready_) {
      const auto& list = candidates(p, state_.token(slot).inst.cls);
      for (std::size_t i = 0; i < list.size(); ++i) {
        GuardApproval approval;
        if (!is_enabled(state_, list[i], slot, &approval)) continue;
        if (!config_.trace && !config_.observer) {
          fire(state_, list[i], slot, approval);
          break;
        }
        if (config_.observer) config_.observer->before_fire(state_, slot, list, i);
        FiringRecord rec;
        fire(state_, list[i], slot, approval, &rec);
        if (config_.observer) config_.observer->after_fire(state_, rec);
        if (config_.trace) firings_.push_back(std::move(rec));
        break;
      }
    }
  }

  std::optional<TokenId> fetch() {
    if (state_.fetch_halted) return std::nullopt;
    const NetModel& net = state_.net();
    PlaceId entry = net.entry_place();
    StageId stage = net.stage_of(entry);
    bool blocked = state_.occupancy(stage) >= *net.stage(stage).capacity;
    for (PlaceId p = 0; p < net.places().size() && !blocked; ++p) {
      if (net.stage_of(p) != stage) continue;
      for (auto slot : state_.store(p).committed) {
        if (state_.token(slot).kind == TokenKind::Reservation) blocked = true;
      }
    }
    if (blocked) {
      ++state_.stats.fetch_stalls;
      return std::nullopt;
    }
    if (state_.pc >= state_.program.size()) {
      throw SimFault(FaultKind::PcOutOfRange, state_.cycle,
                     "fetch from pc " + std::to_string(state_.pc) + " outside a program of " +
                         std::to_string(state_.program.size()) + " words");
    }
    auto di = decode(state_.program[state_.pc], state_.pc);
    state_.create_token(TokenKind::Instruction, entry, &di);
    ++state_.pc;
    return state_.next_id - 1;
  }

  void step(RunOutcome& out) {
    state_.retired_this_cycle.clear();
    firings_.clear();
    state_.commit_pending();
    for (auto p : order_) {
      if (!state_.net().is_end_place(p)) process_place(p);
    }
    auto fetched = fetch();
    for (StageId s = 0; s < state_.net().stages().size(); ++s) {
      state_.stats.stage_occupancy_sum[s] += state_.occupancy(s);
    }
    if (config_.trace) out.trace.push_back(snapshot(state_, firings_, fetched));
    if (config_.observer) config_.observer->end_cycle(state_);
    ++state_.cycle;
  }

  EngineKind kind_;
  const RunConfig& config_;
  SimState state_;
  std::vector<PlaceId> order_;
  std::optional<SortedTransitionsTable> table_;
  isa::DecodeCache cache_;
  std::vector<TransitionId> scratch_;
  std::vector<std::uint32_t> ready_;
  std::vector<FiringRecord> firings_;
};

}  // namespace

RunOutcome run_engine(EngineKind kind, const ModelDescriptor& model, const std::vector<Word>& program,
                      const RunConfig& config) {
  return Kernel(kind, model, program, config).run();
}

RunOutcome run(const ModelDescriptor& model, const std::vector<Word>& program, const RunConfig& config) {
  return run_engine(EngineKind::Optimized, model, program, config);
}

RunOutcome reference_run(const ModelDescriptor& model, const std::vector<Word>& program,
                         const RunConfig& config) {
  return run_engine(EngineKind::Reference, model, program, config);
}

}  // namespace rcpn
