#include "rcpn/isa.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace rcpn::isa {

namespace {

constexpr std::array<std::string_view, kAluFnCount> kAluNames = {
    "ADD", "SUB", "AND", "OR", "XOR", "SLT", "MUL"};
constexpr std::array<std::string_view, kBranchCondCount> kBranchNames = {
    "B", "BEQZ", "BNEZ"};

Word field(Word word, std::uint8_t lo, std::uint8_t width) {
  return (word >> lo) & ((width >= 32) ? ~0u : ((1u << width) - 1));
}

std::vector<OperationClass> build_classes() {
  using S = Symbol;
  using K = SymbolKind;
  using M = PostMap;
  std::vector<OperationClass> classes;
  classes.push_back(
      {cls::Alu,
       "ALU",
       {{0xF0000000u, 0x10000000u,
         {{S::op, K::MicroOp, 24, 4, M::AluSelector},
          {S::d, K::Register, 20, 4, M::WriteReg},
          {S::s1, K::Register, 16, 4, M::ReadReg},
          {S::s2, K::Register, 12, 4, M::ReadReg}}},
        {0xF0000000u, 0x20000000u,
         {{S::op, K::MicroOp, 24, 4, M::AluSelector},
          {S::d, K::Register, 20, 4, M::WriteReg},
          {S::s1, K::Register, 16, 4, M::ReadReg},
          {S::s2, K::Constant, 0, 16, M::SignedConst}}}}});
  classes.push_back({cls::LoadStore,
                     "LoadStore",
                     {{0xF0000000u, 0x30000000u,
                       {{S::L, K::Constant, 27, 1, M::Flag},
                        {S::t, K::Register, 20, 4, M::LoadStoreData},
                        {S::base, K::Register, 16, 4, M::ReadReg},
                        {S::off, K::Constant, 0, 16, M::SignedConst}}}}});
  classes.push_back({cls::Branch,
                     "Branch",
                     {{0xF0000000u, 0x40000000u,
                       {{S::cond, K::MicroOp, 24, 4, M::CondSelector},
                        {S::rs, K::Register, 16, 4, M::BranchSource},
                        {S::off, K::Constant, 0, 16, M::SignedConst}}}}});
  classes.push_back({cls::Halt, "Halt", {{0xF0000000u, 0xF0000000u, {}}}});
  return classes;
}

// Extraction template: class plus the encoding that matched.
struct Match {
  const OperationClass* cls;
  const Encoding* enc;
};

Match find_match(Word word, Word pc) {
  for (const auto& c : operation_classes()) {
    for (const auto& e : c.encodings) {
      if ((word & e.mask) == e.pattern) return {&c, &e};
    }
  }
  throw IllegalInstruction(word, pc);
}

std::int64_t sign_extend(Word value, std::uint8_t width) {
  auto shift = 64 - width;
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(value) << shift) >>
         shift;
}

}  // namespace

const char* symbol_name(Symbol sym) {
  switch (sym) {
    case Symbol::op: return "op";
    case Symbol::d: return "d";
    case Symbol::s1: return "s1";
    case Symbol::s2: return "s2";
    case Symbol::L: return "L";
    case Symbol::t: return "t";
    case Symbol::base: return "base";
    case Symbol::off: return "off";
    case Symbol::cond: return "cond";
    case Symbol::rs: return "rs";
  }
  return "?";
}

std::vector<Symbol> OperationClass::symbols() const {
  std::vector<Symbol> out;
  if (encodings.empty()) return out;
  for (const auto& s : encodings.front().symbols) out.push_back(s.sym);
  return out;
}

const std::vector<OperationClass>& operation_classes() {
  static const std::vector<OperationClass> classes = build_classes();
  return classes;
}

const OperationClass& operation_class(ClassId id) {
  return operation_classes().at(id);
}

IllegalInstruction::IllegalInstruction(Word word, Word pc)
    : std::runtime_error([&] {
        char buf[64];
        std::snprintf(buf, sizeof buf, "illegal instruction 0x%08X at pc %u",
                      word, pc);
        return std::string(buf);
      }()),
      word_(word),
      pc_(pc) {}

Operand& DecodedInstruction::operand(Symbol sym) {
  int s = slot(sym);
  if (s < 0) {
    throw std::out_of_range(std::string("symbol ") + symbol_name(sym) +
                            " not bound for this instruction");
  }
  return operands[s];
}

const Operand& DecodedInstruction::operand(Symbol sym) const {
  return const_cast<DecodedInstruction*>(this)->operand(sym);
}

const OperationClass& match_class(Word word, Word pc) {
  return *find_match(word, pc).cls;
}

DecodedInstruction decode(Word word, Word pc) {
  auto m = find_match(word, pc);
  DecodedInstruction di;
  di.cls = m.cls->id;
  di.raw = word;
  di.pc = pc;
  // Load/store direction is needed before the data register is bound.
  bool is_load = m.cls->id == cls::LoadStore && field(word, 27, 1) != 0;
  bool always = m.cls->id == cls::Branch && field(word, 24, 4) == 0;
  for (const auto& s : m.enc->symbols) {
    Word raw = field(word, s.lo, s.width);
    Operand op;
    switch (s.map) {
      case PostMap::ReadReg:
        op = Operand::reg_ref(static_cast<std::uint16_t>(raw), Role::Read);
        break;
      case PostMap::WriteReg:
        op = Operand::reg_ref(static_cast<std::uint16_t>(raw), Role::Write);
        break;
      case PostMap::LoadStoreData:
        op = Operand::reg_ref(static_cast<std::uint16_t>(raw),
                              is_load ? Role::Write : Role::Read);
        break;
      case PostMap::BranchSource:
        op = always ? Operand::const_ref(0)
                    : Operand::reg_ref(static_cast<std::uint16_t>(raw),
                                       Role::Read);
        break;
      case PostMap::SignedConst:
        op = Operand::const_ref(
            static_cast<Word>(sign_extend(raw, s.width)));
        break;
      case PostMap::Flag:
        op = Operand::flag(raw != 0);
        break;
      case PostMap::AluSelector:
        if (raw >= kAluFnCount) {
          throw IllegalMicroOp("undefined ALU function code " +
                               std::to_string(raw) + " at pc " +
                               std::to_string(pc));
        }
        op = Operand::micro_op(raw);
        break;
      case PostMap::CondSelector:
        if (raw >= kBranchCondCount) {
          throw IllegalMicroOp("undefined branch condition " +
                               std::to_string(raw) + " at pc " +
                               std::to_string(pc));
        }
        op = Operand::micro_op(raw);
        break;
    }
    di.symbols[di.count] = s.sym;
    di.operands[di.count] = op;
    ++di.count;
  }
  return di;
}

DecodedInstruction DecodeCache::decode(Word word, Word pc) {
  auto it = templates_.find(word);
  if (it == templates_.end()) {
    ++misses_;
    it = templates_.emplace(word, isa::decode(word, pc)).first;
  } else {
    ++hits_;
  }
  DecodedInstruction di = it->second;
  di.pc = pc;
  return di;
}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

Word reg_field(std::int64_t r, std::string_view what) {
  if (r < 0 || r >= static_cast<std::int64_t>(kRegisterCount)) {
    throw OperandRange(std::string(what) + " register r" + std::to_string(r) +
                       " out of range");
  }
  return static_cast<Word>(r);
}

Word imm16(std::int64_t v, std::string_view what) {
  if (v < -32768 || v > 32767) {
    throw OperandRange(std::string(what) + " " + std::to_string(v) +
                       " does not fit in a signed 16-bit field");
  }
  return static_cast<Word>(v) & 0xFFFFu;
}

void expect_count(std::string_view m, std::span<const std::int64_t> ops,
                  std::size_t n) {
  if (ops.size() != n) {
    throw OperandRange(std::string(m) + " takes " + std::to_string(n) +
                       " operands, got " + std::to_string(ops.size()));
  }
}

}  // namespace

Word encode(std::string_view mnemonic, std::span<const std::int64_t> ops) {
  const std::string m = upper(mnemonic);
  for (std::uint32_t fn = 0; fn < kAluFnCount; ++fn) {
    if (m == kAluNames[fn]) {
      expect_count(m, ops, 3);
      return 0x10000000u | fn << 24 | reg_field(ops[0], "rd") << 20 |
             reg_field(ops[1], "rs1") << 16 | reg_field(ops[2], "rs2") << 12;
    }
    if (m == std::string(kAluNames[fn]) + "I") {
      expect_count(m, ops, 3);
      return 0x20000000u | fn << 24 | reg_field(ops[0], "rd") << 20 |
             reg_field(ops[1], "rs1") << 16 | imm16(ops[2], "immediate");
    }
  }
  if (m == "LD" || m == "ST") {
    expect_count(m, ops, 3);
    Word l = m == "LD" ? 1u : 0u;
    return 0x30000000u | l << 27 | reg_field(ops[0], "rt") << 20 |
           reg_field(ops[1], "base") << 16 | imm16(ops[2], "offset");
  }
  if (m == "B") {
    expect_count(m, ops, 1);
    return 0x40000000u | imm16(ops[0], "branch offset");
  }
  if (m == "BEQZ" || m == "BNEZ") {
    expect_count(m, ops, 2);
    Word cond = m == "BEQZ" ? 1u : 2u;
    return 0x40000000u | cond << 24 | reg_field(ops[0], "rs") << 16 |
           imm16(ops[1], "branch offset");
  }
  if (m == "HALT") {
    expect_count(m, ops, 0);
    return 0xF0000000u;
  }
  throw UnknownMnemonic("unknown mnemonic '" + std::string(mnemonic) + "'");
}

std::string disassemble(Word word) {
  auto di = decode(word, 0);
  auto reg = [&](Symbol s) { return "r" + std::to_string(di.operand(s).reg); };
  auto imm = [&](Symbol s) {
    return std::to_string(static_cast<std::int32_t>(di.operand(s).word()));
  };
  switch (di.cls) {
    case cls::Alu: {
      std::string name(kAluNames[di.operand(Symbol::op).internal]);
      if (di.operand(Symbol::s2).is_reg()) {
        return name + " " + reg(Symbol::d) + ", " + reg(Symbol::s1) + ", " +
               reg(Symbol::s2);
      }
      return name + "I " + reg(Symbol::d) + ", " + reg(Symbol::s1) + ", #" +
             imm(Symbol::s2);
    }
    case cls::LoadStore:
      return std::string(di.is_load() ? "LD " : "ST ") + reg(Symbol::t) +
             ", [" + reg(Symbol::base) + ", #" + imm(Symbol::off) + "]";
    case cls::Branch: {
      auto cond = di.operand(Symbol::cond).internal;
      std::string out(kBranchNames[cond]);
      out += " ";
      if (cond != 0) out += reg(Symbol::rs) + ", ";
      return out + "#" + imm(Symbol::off);
    }
    default:
      return "HALT";
  }
}

Word alu_compute(AluFn fn, Word a, Word b) {
  switch (fn) {
    case AluFn::Add: return a + b;
    case AluFn::Sub: return a - b;
    case AluFn::And: return a & b;
    case AluFn::Or: return a | b;
    case AluFn::Xor: return a ^ b;
    case AluFn::Slt:
      return static_cast<std::int32_t>(a) < static_cast<std::int32_t>(b) ? 1u
                                                                          : 0u;
    case AluFn::Mul: return a * b;
  }
  return 0;
}

bool branch_taken(BranchCond cond, Word value) {
  switch (cond) {
    case BranchCond::Always: return true;
    case BranchCond::EqZero: return value == 0;
    case BranchCond::NeZero: return value != 0;
  }
  return false;
}

}  // namespace rcpn::isa
