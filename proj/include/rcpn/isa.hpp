#pragma once

// TinyISA: 32-bit words, 16 general registers, word-addressed memories.
//
//   [31:28] major   0x1 ALU reg   fn[27:24] rd[23:20] rs1[19:16] rs2[15:12]
//                   0x2 ALU imm   fn[27:24] rd[23:20] rs1[19:16] imm16
//                   0x3 LoadStore L[27]     rt[23:20] base[19:16] imm16
//                   0x4 Branch    cond[27:24]         rs[19:16]   imm16
//                   0xF Halt
//
// Instructions are grouped into operation classes. Each class names its
// symbols; decode binds every symbol to an operand handle.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rcpn/common.hpp"
#include "rcpn/registers.hpp"

namespace rcpn::isa {

inline constexpr std::size_t kRegisterCount = 16;
inline constexpr std::size_t kMaxOperands = 4;

enum class Symbol : std::uint8_t { op, d, s1, s2, L, t, base, off, cond, rs };
const char* symbol_name(Symbol sym);

namespace cls {
inline constexpr ClassId Alu = 0;
inline constexpr ClassId LoadStore = 1;
inline constexpr ClassId Branch = 2;
inline constexpr ClassId Halt = 3;
inline constexpr std::size_t kCount = 4;
}  // namespace cls

enum class AluFn : std::uint8_t { Add, Sub, And, Or, Xor, Slt, Mul };
inline constexpr std::uint32_t kAluFnCount = 7;
enum class BranchCond : std::uint8_t { Always, EqZero, NeZero };
inline constexpr std::uint32_t kBranchCondCount = 3;

enum class SymbolKind : std::uint8_t { Constant, Register, MicroOp };

// How an extracted bit-field becomes an operand handle.
enum class PostMap : std::uint8_t {
  ReadReg,         // register index -> read RegRef
  WriteReg,        // register index -> write RegRef
  LoadStoreData,   // write RegRef for loads, read RegRef for stores
  BranchSource,    // read RegRef, or ConstRef(0) for unconditional branches
  SignedConst,     // sign-extended immediate -> ConstRef
  Flag,            // single bit -> Boolean constant
  AluSelector,     // function code -> micro-op, must be < kAluFnCount
  CondSelector,    // condition code -> micro-op, must be < kBranchCondCount
};

struct SymbolDecl {
  Symbol sym;
  SymbolKind kind;
  std::uint8_t lo;
  std::uint8_t width;
  PostMap map;
};

struct Encoding {
  Word mask;
  Word pattern;
  std::vector<SymbolDecl> symbols;
};

struct OperationClass {
  ClassId id;
  std::string name;
  std::vector<Encoding> encodings;

  // Symbol names in binding order (identical across encodings).
  std::vector<Symbol> symbols() const;
};

const std::vector<OperationClass>& operation_classes();
const OperationClass& operation_class(ClassId id);

class IllegalInstruction : public std::runtime_error {
 public:
  IllegalInstruction(Word word, Word pc);
  Word word() const { return word_; }
  Word pc() const { return pc_; }

 private:
  Word word_;
  Word pc_;
};

class IllegalMicroOp : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OperandRange : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnknownMnemonic : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DecodedInstruction {
  ClassId cls = cls::Halt;
  Word raw = 0;
  Word pc = 0;
  // Branch outcome, written by the branch-resolving transition.
  bool taken = false;
  std::uint8_t count = 0;
  std::array<Symbol, kMaxOperands> symbols{};
  std::array<Operand, kMaxOperands> operands{};

  int slot(Symbol sym) const {
    for (std::uint8_t i = 0; i < count; ++i) {
      if (symbols[i] == sym) return i;
    }
    return -1;
  }
  bool has(Symbol sym) const { return slot(sym) >= 0; }
  Operand& operand(Symbol sym);
  const Operand& operand(Symbol sym) const;

  bool is_load() const { return cls == cls::LoadStore && operand(Symbol::L).internal != 0; }
  bool is_store() const { return cls == cls::LoadStore && operand(Symbol::L).internal == 0; }

  friend bool operator==(const DecodedInstruction&,
                         const DecodedInstruction&) = default;
};

const OperationClass& match_class(Word word, Word pc = 0);
DecodedInstruction decode(Word word, Word pc);

// Per-run memo of decode results keyed by the raw word. Every lookup hands
// out a fresh copy so operand state is never shared between instructions.
class DecodeCache {
 public:
  DecodedInstruction decode(Word word, Word pc);
  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }

 private:
  std::unordered_map<Word, DecodedInstruction> templates_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

// Operands are register indices, immediates or word offsets in source order,
// e.g. encode("ADDI", {1, 2, 5}) or encode("ST", {rt, base, off}).
Word encode(std::string_view mnemonic, std::span<const std::int64_t> operands);
std::string disassemble(Word word);

Word alu_compute(AluFn fn, Word a, Word b);
bool branch_taken(BranchCond cond, Word value);

}  // namespace rcpn::isa
