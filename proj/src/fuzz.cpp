#include "rcpn/fuzz.hpp"

#include <algorithm>
#include <array>
#include <random>

#include "rcpn/isa.hpp"

namespace rcpn {

namespace {

class Generator {
 public:
  Generator(std::uint64_t seed, const FuzzOptions& o) : rng_(seed), o_(o), mem_(o.mem_words, 0) {}

  std::vector<Word> run() {
    // HALT sits at halt_at_, so the image holds halt_at_ + 1 words.
    const std::uint32_t lo = std::max<std::uint32_t>(o_.min_length, 1);
    const std::uint32_t span = std::max(o_.max_length, lo) - lo + 1;
    halt_at_ = lo - 1 + pick(span);
    std::uint32_t resume = 0;  // next index that executes
    while (out_.size() < halt_at_) emit_one(out_.size() == resume, resume);
    out_.push_back(isa::encode("HALT", std::array<std::int64_t, 0>{}));
    return out_;
  }

 private:
  std::uint32_t pick(std::uint32_t n) { return static_cast<std::uint32_t>(rng_() % n); }
  std::int64_t reg() { return pick(isa::kRegisterCount); }

  void put(std::string_view m, std::initializer_list<std::int64_t> ops) {
    std::vector<std::int64_t> v(ops);
    out_.push_back(isa::encode(m, v));
  }

  static constexpr std::array<std::string_view, 7> kAlu = {"ADD", "SUB", "AND", "OR", "XOR", "SLT", "MUL"};

  // `resume` is the next executing index; a taken branch moves it forward.
  void emit_one(bool live, std::uint32_t& resume) {
    const std::uint32_t room = halt_at_ - static_cast<std::uint32_t>(out_.size());
    std::uint32_t kind = pick(100);
    if (kind < 30) {
      auto fn = pick(7);
      auto rd = reg(), rs1 = reg(), rs2 = reg();
      put(kAlu[fn], {rd, rs1, rs2});
      if (live) regs_[rd] = isa::alu_compute(static_cast<isa::AluFn>(fn), regs_[rs1], regs_[rs2]);
      if (live) resume = static_cast<std::uint32_t>(out_.size());
    } else if (kind < 58) {
      auto fn = pick(7);
      auto rd = reg(), rs1 = reg();
      std::int64_t imm = pick(4) == 0 ? static_cast<std::int64_t>(pick(65536)) - 32768
                                      : static_cast<std::int64_t>(pick(101)) - 50;
      put(std::string(kAlu[fn]) + "I", {rd, rs1, imm});
      if (live) regs_[rd] = isa::alu_compute(static_cast<isa::AluFn>(fn), regs_[rs1], static_cast<Word>(imm));
      if (live) resume = static_cast<std::uint32_t>(out_.size());
    } else if (kind < 84 && room >= 2) {
      bool load = pick(5) < 3;
      auto rt = reg(), base = reg();
      std::int64_t off;
      if (live) {
        Word target = pick(std::min(o_.address_window, o_.mem_words));
        std::int64_t delta = static_cast<std::int64_t>(target) - static_cast<std::int32_t>(regs_[base]);
        if (delta < -32768 || delta > 32767) {
          put("XOR", {base, base, base});
          regs_[base] = 0;
          delta = target;
        }
        off = delta;
        Word addr = regs_[base] + static_cast<Word>(off);
        if (load) {
          regs_[rt] = mem_[addr];
        } else {
          mem_[addr] = regs_[rt];
        }
      } else {
        off = static_cast<std::int64_t>(pick(64)) - 32;
      }
      put(load ? "LD" : "ST", {rt, base, off});
      if (live) resume = static_cast<std::uint32_t>(out_.size());
    } else {
      // Forward branch to an index in (here, halt_at_].
      auto here = static_cast<std::uint32_t>(out_.size());
      std::uint32_t target = here + 1 + pick(std::min<std::uint32_t>(halt_at_ - here, 8));
      std::int64_t off = static_cast<std::int64_t>(target) - (here + 1);
      auto cond = pick(3);
      auto rs = reg();
      if (cond == 0) {
        put("B", {off});
      } else {
        put(cond == 1 ? "BEQZ" : "BNEZ", {rs, off});
      }
      if (live) {
        bool taken = isa::branch_taken(static_cast<isa::BranchCond>(cond), regs_[rs]);
        resume = taken ? target : here + 1;
      }
    }
  }

  std::mt19937_64 rng_;
  FuzzOptions o_;
  std::uint32_t halt_at_ = 0;
  std::array<Word, isa::kRegisterCount> regs_{};
  std::vector<Word> mem_;
  std::vector<Word> out_;
};

}  // namespace

std::vector<Word> generate_program(std::uint64_t seed, const FuzzOptions& options) {
  return Generator(seed, options).run();
}

std::uint64_t fuzz_case_seed(std::uint64_t batch_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(batch_seed), static_cast<std::uint32_t>(batch_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

}  // namespace rcpn
