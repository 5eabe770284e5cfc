#include "rcpn/report.hpp"

#include <charconv>
#include <iomanip>
#include <sstream>

namespace rcpn {

nlohmann::json stats_json(const NetModel& net, const Stats& stats, double wall_seconds) {
  nlohmann::json j;
  j["cycles"] = stats.cycles;
  j["instructions"] = stats.instructions;
  j["cpi"] = stats.cpi();
  auto occ = nlohmann::json::object();
  for (StageId s = 0; s < net.stages().size(); ++s) {
    if (s == net.end_stage()) continue;
    occ[net.stage(s).name] = stats.average_occupancy(s);
  }
  j["stage_occupancy"] = occ;
  auto fires = nlohmann::json::object();
  for (TransitionId t = 0; t < net.transitions().size(); ++t) fires[net.transition(t).name] = stats.fires[t];
  j["fires"] = fires;
  j["fetch_stalls"] = stats.fetch_stalls;
  j["decode_cache"] = {{"hits", stats.decode_hits}, {"misses", stats.decode_misses}};
  j["wall_time_seconds"] = wall_seconds;
  j["simulated_cycles_per_second"] = wall_seconds > 0 ? static_cast<double>(stats.cycles) / wall_seconds : 0.0;
  return j;
}

std::string stats_text(const NetModel& net, const Stats& stats, double wall_seconds) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "cycles        " << stats.cycles << '\n';
  os << "instructions  " << stats.instructions << '\n';
  os << "cpi           " << std::fixed << std::setprecision(4) << stats.cpi() << '\n';
  os << "fetch stalls  " << stats.fetch_stalls << '\n';
  os << "decode cache  " << stats.decode_hits << " hits, " << stats.decode_misses << " misses\n";
  os << "occupancy\n";
  for (StageId s = 0; s < net.stages().size(); ++s) {
    if (s == net.end_stage()) continue;
    os << "  " << std::left << std::setw(8) << net.stage(s).name << std::right << stats.average_occupancy(s) << '\n';
  }
  os << "fires\n";
  for (TransitionId t = 0; t < net.transitions().size(); ++t) {
    os << "  " << std::left << std::setw(8) << net.transition(t).name << std::right << stats.fires[t] << '\n';
  }
  os << "wall time     " << std::setprecision(6) << wall_seconds << " s\n";
  if (wall_seconds > 0) {
    os << "throughput    " << std::setprecision(0) << static_cast<double>(stats.cycles) / wall_seconds
       << " cycles/s\n";
  }
  return os.str();
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::uint32_t parse_u32(const std::string& key, const std::string& v, std::size_t line) {
  std::uint32_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError("line " + std::to_string(line) + ": " + key + " expects an unsigned integer, got '" + v + "'");
  }
  return out;
}

}  // namespace

RunFileConfig parse_config(std::string_view text) {
  RunFileConfig cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    auto s = trim(raw);
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
    auto key = trim(std::string_view(s).substr(0, eq));
    auto value = trim(std::string_view(s).substr(eq + 1));
    if (key == "model") {
      cfg.model = value;
    } else if (key == "mem.size.words") {
      cfg.mem_size_words = parse_u32(key, value, line);
    } else if (key == "mem.latency") {
      cfg.mem_latency = parse_u32(key, value, line);
      if (*cfg.mem_latency < 1) throw ConfigError("line " + std::to_string(line) + ": mem.latency must be >= 1");
    } else {
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

}  // namespace rcpn
