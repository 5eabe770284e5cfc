// rcpn: assemble, run and cross-check TinyISA programs on the bundled
// RCPN machine models.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "rcpn/assembler.hpp"
#include "rcpn/engine.hpp"
#include "rcpn/fuzz.hpp"
#include "rcpn/isa.hpp"
#include "rcpn/models.hpp"
#include "rcpn/report.hpp"

namespace {

using namespace rcpn;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool is_source(const std::string& path) {
  auto dot = path.rfind('.');
  if (dot == std::string::npos) return false;
  auto ext = path.substr(dot);
  return ext == ".s" || ext == ".asm";
}

std::vector<Word> load_program(const std::string& path) {
  auto text = read_text(path);
  if (is_source(path)) return assemble(text);
  return from_bytes(std::vector<unsigned char>(text.begin(), text.end()));
}

struct RunArgs {
  std::string model;
  std::string program;
  std::string engine = "optimized";
  std::optional<std::uint32_t> mem_latency;
  std::optional<std::uint32_t> mem_size;
  std::uint64_t max_cycles = 1'000'000;
  std::string trace = "none";
  std::string stats = "text";
  std::string config;
  bool diagram = false;
};

void apply_config(const std::string& path, std::string& model, std::optional<std::uint32_t>& latency,
                  std::optional<std::uint32_t>& size) {
  if (path.empty()) return;
  auto cfg = parse_config(read_text(path));
  if (model.empty() && cfg.model) model = *cfg.model;
  if (!latency) latency = cfg.mem_latency;
  if (!size) size = cfg.mem_size_words;
}

int cmd_run(RunArgs a) {
  apply_config(a.config, a.model, a.mem_latency, a.mem_size);
  if (a.model.empty()) throw std::runtime_error("no model given (use --model or a config file)");
  auto model = model_by_name(a.model);
  auto program = load_program(a.program);

  RunConfig cfg;
  cfg.max_cycles = a.max_cycles;
  cfg.mem_latency = a.mem_latency;
  cfg.mem_size_words = a.mem_size;
  cfg.trace = a.trace == "text" || a.diagram;
  auto kind = a.engine == "reference" ? EngineKind::Reference : EngineKind::Optimized;
  auto out = run_engine(kind, model, program, cfg);

  if (a.trace == "text") {
    for (const auto& r : out.trace) std::cout << r.text << '\n';
  }
  if (a.diagram) std::cout << render_diagram(*model.net, out.trace);
  if (a.stats == "json") {
    std::cout << stats_json(*model.net, out.stats, out.wall_seconds).dump(2) << '\n';
  } else {
    std::cout << stats_text(*model.net, out.stats, out.wall_seconds);
  }
  if (out.fault) {
    std::cerr << "error: " << to_string(out.fault->kind()) << " at cycle " << out.fault->cycle() << ": "
              << out.fault->what() << '\n';
    return 2;
  }
  return 0;
}

struct VerifyArgs {
  std::vector<std::string> models;
  std::string program;
  std::uint64_t fuzz = 0;
  std::uint64_t seed = 1;
  std::optional<std::uint32_t> mem_latency;
  std::uint64_t max_cycles = 100'000;
  bool inject = false;
};

// Returns true when both engines agree.
bool verify_one(const ModelDescriptor& model, const std::vector<Word>& program, const VerifyArgs& a,
                const std::string& label) {
  RunConfig cfg;
  cfg.trace = true;
  cfg.max_cycles = a.max_cycles;
  cfg.mem_latency = a.mem_latency;
  RunConfig opt_cfg = cfg;
  opt_cfg.inject_table_fault = a.inject;
  auto fast = run(model, program, opt_cfg);
  auto slow = reference_run(model, program, cfg);
  auto diff = compare_traces(fast.trace, slow.trace);
  bool same_fault = fast.fault.has_value() == slow.fault.has_value() &&
                    (!fast.fault || fast.fault->kind() == slow.fault->kind());
  if (diff.empty && same_fault) return true;
  std::cout << model.name << " " << label << ": ";
  if (!diff.empty) {
    std::cout << diff.describe() << '\n';
  } else {
    std::cout << "engines disagree on the run outcome\n";
  }
  return false;
}

int cmd_verify(const VerifyArgs& a) {
  std::vector<std::string> models = a.models;
  if (models.empty()) models = {"fig2", "ooc", "scalar5"};
  std::uint64_t cases = 0, bad = 0;
  for (const auto& name : models) {
    auto model = model_by_name(name);
    if (!a.program.empty()) {
      ++cases;
      if (!verify_one(model, load_program(a.program), a, a.program)) ++bad;
    }
    for (std::uint64_t i = 0; i < a.fuzz; ++i) {
      auto s = fuzz_case_seed(a.seed, i);
      ++cases;
      if (!verify_one(model, generate_program(s), a, "fuzz case " + std::to_string(i) + " (seed " + std::to_string(s) + ")")) {
        ++bad;
      }
    }
  }
  std::cout << "verified " << cases << " runs, " << bad << " divergent\n";
  return bad == 0 ? 0 : 1;
}

int cmd_asm(const std::string& source, const std::string& output, bool hex) {
  auto words = assemble(read_text(source));
  if (hex || output.empty()) {
    for (auto w : words) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%08X", w);
      std::cout << buf << "  " << isa::disassemble(w) << '\n';
    }
  }
  if (!output.empty()) {
    auto bytes = to_bytes(words);
    std::ofstream out(output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + output);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RCPN pipeline simulator"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run_cmd = app.add_subcommand("run", "simulate a program on a model");
  run_cmd->add_option("--model", ra.model, "fig2 | ooc | scalar5 (or a -nofwd variant)");
  run_cmd->add_option("--program", ra.program, "program (.s/.asm source or binary image)")->required();
  run_cmd->add_option("--engine", ra.engine)->check(CLI::IsMember({"optimized", "reference"}));
  run_cmd->add_option("--mem-latency", ra.mem_latency)->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-cycles", ra.max_cycles);
  run_cmd->add_option("--trace", ra.trace)->check(CLI::IsMember({"text", "none"}));
  run_cmd->add_option("--stats", ra.stats)->check(CLI::IsMember({"json", "text"}));
  run_cmd->add_option("--config", ra.config, "key = value file (model, mem.size.words, mem.latency)");
  run_cmd->add_flag("--diagram", ra.diagram, "print a pipeline diagram");

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "cross-check the optimized engine against the reference");
  verify_cmd->add_option("--model", va.models, "models to check (default: fig2 ooc scalar5)");
  verify_cmd->add_option("--program", va.program);
  verify_cmd->add_option("--fuzz", va.fuzz, "number of random programs per model");
  verify_cmd->add_option("--seed", va.seed);
  verify_cmd->add_option("--mem-latency", va.mem_latency)->check(CLI::PositiveNumber);
  verify_cmd->add_option("--max-cycles", va.max_cycles);
  verify_cmd->add_flag("--inject-table-fault", va.inject)->group("");

  std::string source, output;
  bool hex = false;
  auto* asm_cmd = app.add_subcommand("asm", "assemble TinyISA source");
  asm_cmd->add_option("source", source)->required();
  asm_cmd->add_option("-o,--output", output, "binary image to write");
  asm_cmd->add_flag("--hex", hex, "list encoded words");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(ra);
    if (*verify_cmd) return cmd_verify(va);
    if (*asm_cmd) return cmd_asm(source, output, hex);
  } catch (const AssemblyError& e) {
    std::cerr << "assembly error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
