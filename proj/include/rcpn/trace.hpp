#pragma once

// Per-cycle trace records, their comparison, and pipeline diagrams.

#include <optional>
#include <string>
#include <vector>

#include "rcpn/state.hpp"

namespace rcpn {

struct TraceRecord {
  Cycle cycle = 0;
  // Canonical one-line form; the unit of engine comparison.
  std::string text;

  // Structured extras for diagrams (derivable from text).
  std::vector<std::pair<TokenId, StageId>> positions;  // instruction tokens outside end
  std::optional<TokenId> fetched;
  std::vector<TokenId> retired;
};

// Snapshot of `state` at the end of its current cycle.
TraceRecord snapshot(const SimState& state, const std::vector<FiringRecord>& firings,
                     std::optional<TokenId> fetched);

struct TraceDiff {
  bool empty = true;
  Cycle cycle = 0;
  std::string path;
  std::string left;
  std::string right;

  std::string describe() const;
};

TraceDiff compare_traces(const std::vector<TraceRecord>& a, const std::vector<TraceRecord>& b);

struct DiagramRow {
  TokenId id = kNoToken;
  Cycle first = 0;                 // fetch cycle
  std::vector<std::string> cells;  // one per cycle from `first`
  std::string joined() const;
};

std::vector<DiagramRow> diagram_rows(const NetModel& net, const std::vector<TraceRecord>& trace);
std::string render_diagram(const NetModel& net, const std::vector<TraceRecord>& trace);

}  // namespace rcpn
