#pragma once

// Three-level register model: a register file owns storage cells, registers
// name lists of cells (shared cells model overlapping registers), and operand
// handles (RegRef / ConstRef) carry per-instruction copies of values.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcpn/common.hpp"

namespace rcpn {

using RegValue = std::uint64_t;

enum class OperandKind : std::uint8_t { Reg, Const, MicroOp, Flag };
enum class Role : std::uint8_t { Read, Write };

// An operand handle bound at decode time. Reg operands behave as RegRefs,
// Const operands as ConstRefs; MicroOp and Flag operands are plain selectors
// and never touch the register file.
struct Operand {
  OperandKind kind = OperandKind::Const;
  Role role = Role::Read;
  std::uint16_t reg = 0;
  bool has_value = true;
  RegValue internal = 0;

  static Operand reg_ref(std::uint16_t reg, Role role) {
    return Operand{OperandKind::Reg, role, reg, false, 0};
  }
  static Operand const_ref(RegValue value) {
    return Operand{OperandKind::Const, Role::Read, 0, true, value};
  }
  static Operand micro_op(std::uint32_t selector) {
    return Operand{OperandKind::MicroOp, Role::Read, 0, true, selector};
  }
  static Operand flag(bool value) {
    return Operand{OperandKind::Flag, Role::Read, 0, true, value ? 1u : 0u};
  }

  bool is_reg() const { return kind == OperandKind::Reg; }
  Word word() const { return static_cast<Word>(internal); }

  friend bool operator==(const Operand&, const Operand&) = default;
};

// Identifies the RegRef that holds a pending write: the owning instruction
// token, the pool slot currently storing it, and the operand index inside the
// decoded instruction.
struct WriterMark {
  TokenId token = kNoToken;
  std::uint32_t slot = 0;
  std::uint8_t operand = 0;

  bool empty() const { return token == kNoToken; }
  friend bool operator==(const WriterMark&, const WriterMark&) = default;
};

struct WriterView {
  StageId stage;
  const Operand* ref;
};

// Resolves a writer mark to where its instruction currently is.
class WriterLocator {
 public:
  virtual ~WriterLocator() = default;
  virtual std::optional<WriterView> locate(const WriterMark& mark) const = 0;
};

class HazardViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DanglingReservation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct RegisterDecl {
  std::string name;
  std::vector<std::uint32_t> cells;  // low cell first
};

struct RegisterLayout {
  std::uint32_t cell_count = 0;
  std::vector<RegisterDecl> registers;

  // r0..r(n-1), one private cell each.
  static RegisterLayout flat(std::uint32_t count);
};

struct StorageCell {
  Word value = 0;
  WriterMark writer;
};

class RegisterFile {
 public:
  explicit RegisterFile(RegisterLayout layout);

  bool can_read(const Operand& ref) const;
  bool can_read_in(const Operand& ref, StageId stage,
                   const WriterLocator& locator) const;
  void read(Operand& ref) const;
  void read_from(Operand& ref, StageId stage,
                 const WriterLocator& locator) const;
  bool can_write(const Operand& ref) const;
  void reserve_write(const Operand& ref, const WriterMark& who);
  void writeback(const Operand& ref, const WriterMark& who);

  // Throws DanglingReservation if any cell still names `token` as writer.
  void retire_audit(TokenId token) const;

  RegValue value(std::uint16_t reg) const;
  void set_value(std::uint16_t reg, RegValue value);

  std::size_t register_count() const { return layout_.registers.size(); }
  const RegisterDecl& decl(std::uint16_t reg) const {
    return layout_.registers.at(reg);
  }
  const std::vector<StorageCell>& cells() const { return cells_; }

 private:
  const std::vector<std::uint32_t>& cells_of(const Operand& ref) const;

  RegisterLayout layout_;
  std::vector<StorageCell> cells_;
};

}  // namespace rcpn
