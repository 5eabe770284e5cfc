#include "rcpn/trace.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace rcpn {

namespace {

void write_token(std::ostringstream& os, const Token& t) {
  if (t.kind == TokenKind::Reservation) {
    os << 'r' << t.id;
  } else {
    os << 'i' << t.id << '.' << isa::operation_class(t.inst.cls).name;
  }
  os << '@' << t.arrival;
  if (t.delay_override) os << '+' << *t.delay_override;
}

}  // namespace

TraceRecord snapshot(const SimState& state, const std::vector<FiringRecord>& firings,
                     std::optional<TokenId> fetched) {
  const NetModel& net = state.net();
  TraceRecord rec;
  rec.cycle = state.cycle;
  rec.fetched = fetched;
  rec.retired = state.retired_this_cycle;

  std::ostringstream os;
  os << 'C' << state.cycle;
  for (PlaceId p = 0; p < net.places().size(); ++p) {
    if (net.is_end_place(p)) continue;
    const auto& store = state.store(p);
    os << " | " << net.place(p).name << ":[";
    bool first = true;
    for (auto slot : store.committed) {
      if (!first) os << ' ';
      first = false;
      write_token(os, state.token(slot));
    }
    if (!store.pending.empty()) {
      os << " /";
      std::vector<std::uint32_t> pending = store.pending;
      std::sort(pending.begin(), pending.end(),
                [&](auto a, auto b) { return state.token(a).id < state.token(b).id; });
      for (auto slot : pending) {
        os << ' ';
        write_token(os, state.token(slot));
      }
    }
    os << ']';
    for (auto slot : store.committed) {
      if (state.token(slot).kind == TokenKind::Instruction) {
        rec.positions.emplace_back(state.token(slot).id, net.stage_of(p));
      }
    }
    for (auto slot : store.pending) {
      if (state.token(slot).kind == TokenKind::Instruction) {
        rec.positions.emplace_back(state.token(slot).id, net.stage_of(p));
      }
    }
  }
  std::sort(rec.positions.begin(), rec.positions.end());

  os << " | PC=" << state.pc << " | R=[";
  const auto& cells = state.regs.cells();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (c) os << ',';
    os << cells[c].value;
  }
  os << "] | W=[";
  bool first = true;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].writer.empty()) continue;
    if (!first) os << ',';
    first = false;
    os << 'c' << c << ":i" << cells[c].writer.token << '.' << int(cells[c].writer.operand);
  }
  os << "] | F=[";
  first = true;
  for (const auto& f : firings) {
    if (!first) os << ',';
    first = false;
    os << net.transition(f.transition).name << ":i" << f.token;
  }
  os << ']';
  rec.text = os.str();
  return rec;
}

namespace {

std::vector<std::string> split_fields(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(" | ", start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 3;
  }
  return out;
}

std::string field_name(const std::string& f) {
  if (f.empty()) return f;
  if (f[0] == 'C' && f.find(':') == std::string::npos && f.find('=') == std::string::npos) return "cycle";
  auto cut = f.find_first_of(":=");
  return f.substr(0, cut);
}

std::string diff_path(const std::string& a, const std::string& b) {
  auto fa = split_fields(a);
  auto fb = split_fields(b);
  for (std::size_t i = 0; i < std::max(fa.size(), fb.size()); ++i) {
    if (i >= fa.size()) return field_name(fb[i]);
    if (i >= fb.size() || fa[i] != fb[i]) return field_name(fa[i]);
  }
  return "";
}

}  // namespace

TraceDiff compare_traces(const std::vector<TraceRecord>& a, const std::vector<TraceRecord>& b) {
  TraceDiff d;
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= a.size() || i >= b.size()) {
      d.empty = false;
      d.cycle = i < a.size() ? a[i].cycle : b[i].cycle;
      d.path = "<missing>";
      d.left = i < a.size() ? a[i].text : "";
      d.right = i < b.size() ? b[i].text : "";
      return d;
    }
    if (a[i].text != b[i].text) {
      d.empty = false;
      d.cycle = a[i].cycle;
      d.path = diff_path(a[i].text, b[i].text);
      d.left = a[i].text;
      d.right = b[i].text;
      return d;
    }
  }
  return d;
}

std::string TraceDiff::describe() const {
  if (empty) return "traces identical";
  std::ostringstream os;
  os << "first divergence at cycle " << cycle << " in " << path << "\n  optimized: " << left
     << "\n  reference: " << right;
  return os.str();
}

std::string DiagramRow::joined() const {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ' ';
    out += c;
  }
  return out;
}

std::vector<DiagramRow> diagram_rows(const NetModel& net, const std::vector<TraceRecord>& trace) {
  std::vector<DiagramRow> rows;
  std::map<TokenId, std::size_t> open;
  const TraceRecord* prev = nullptr;
  for (const auto& rec : trace) {
    if (prev) {
      for (const auto& [id, stage] : prev->positions) {
        auto it = open.find(id);
        if (it != open.end()) rows[it->second].cells.push_back(net.stage(stage).label);
      }
    }
    for (auto id : rec.retired) open.erase(id);
    if (rec.fetched) {
      open[*rec.fetched] = rows.size();
      rows.push_back({*rec.fetched, rec.cycle, {"F"}});
    }
    prev = &rec;
  }
  return rows;
}

std::string render_diagram(const NetModel& net, const std::vector<TraceRecord>& trace) {
  auto rows = diagram_rows(net, trace);
  if (rows.empty()) return "";
  std::size_t width = 1;
  for (const auto& s : net.stages()) width = std::max(width, s.label.size());
  Cycle last = 0;
  for (const auto& r : rows) last = std::max<Cycle>(last, r.first + r.cells.size());

  auto pad = [&](const std::string& s) { return s + std::string(width - std::min(width, s.size()), ' '); };
  std::ostringstream os;
  os << pad("") << "      ";
  for (Cycle c = 0; c < last; ++c) os << ' ' << pad(std::to_string(c % 10));
  os << '\n';
  for (const auto& r : rows) {
    std::string id = "i" + std::to_string(r.id);
    os << id << std::string(id.size() < 6 + width ? 6 + width - id.size() : 1, ' ');
    for (Cycle c = 0; c < last; ++c) {
      std::string cell;
      if (c >= r.first && c - r.first < r.cells.size()) cell = r.cells[c - r.first];
      os << ' ' << pad(cell);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace rcpn
