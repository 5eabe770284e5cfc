#pragma once

// Statistics reports and the flat key=value config file.

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "rcpn/engine.hpp"

namespace rcpn {

// Keys: cycles, instructions, cpi, stage_occupancy, fires, fetch_stalls,
// decode_cache {hits, misses}, wall_time_seconds,
// simulated_cycles_per_second.
nlohmann::json stats_json(const NetModel& net, const Stats& stats, double wall_seconds);
std::string stats_text(const NetModel& net, const Stats& stats, double wall_seconds);

struct RunFileConfig {
  std::optional<std::string> model;
  std::optional<std::uint32_t> mem_size_words;
  std::optional<std::uint32_t> mem_latency;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// `key = value` lines, `#` comments. Recognised keys: model,
// mem.size.words, mem.latency.
RunFileConfig parse_config(std::string_view text);

}  // namespace rcpn
