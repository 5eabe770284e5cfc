#include "rcpn/registers.hpp"

#include <algorithm>

namespace rcpn {

RegisterLayout RegisterLayout::flat(std::uint32_t count) {
  RegisterLayout layout;
  layout.cell_count = count;
  for (std::uint32_t i = 0; i < count; ++i) {
    layout.registers.push_back({"r" + std::to_string(i), {i}});
  }
  return layout;
}

RegisterFile::RegisterFile(RegisterLayout layout)
    : layout_(std::move(layout)), cells_(layout_.cell_count) {
  for (const auto& decl : layout_.registers) {
    if (decl.cells.empty()) {
      throw std::invalid_argument("register " + decl.name + " maps to no cell");
    }
    for (auto c : decl.cells) {
      if (c >= layout_.cell_count) {
        throw std::invalid_argument("register " + decl.name +
                                    " names cell out of range");
      }
    }
  }
}

const std::vector<std::uint32_t>& RegisterFile::cells_of(
    const Operand& ref) const {
  if (ref.reg >= layout_.registers.size()) {
    throw HazardViolation("operand names unknown register " +
                          std::to_string(ref.reg));
  }
  return layout_.registers[ref.reg].cells;
}

bool RegisterFile::can_read(const Operand& ref) const {
  if (!ref.is_reg()) return true;
  for (auto c : cells_of(ref)) {
    if (!cells_[c].writer.empty()) return false;
  }
  return true;
}

bool RegisterFile::can_read_in(const Operand& ref, StageId stage,
                               const WriterLocator& locator) const {
  if (!ref.is_reg()) return false;
  bool any_writer = false;
  for (auto c : cells_of(ref)) {
    const auto& mark = cells_[c].writer;
    if (mark.empty()) continue;
    any_writer = true;
    auto view = locator.locate(mark);
    if (!view || view->stage != stage || !view->ref->has_value) return false;
  }
  return any_writer;
}

void RegisterFile::read(Operand& ref) const {
  if (!ref.is_reg()) return;
  if (!can_read(ref)) {
    throw HazardViolation(layout_.registers[ref.reg].name +
                          ".read() with a pending writer");
  }
  RegValue v = 0;
  const auto& cells = cells_of(ref);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    v |= static_cast<RegValue>(cells_[cells[k]].value) << (32 * k);
  }
  ref.internal = v;
  ref.has_value = true;
}

void RegisterFile::read_from(Operand& ref, StageId stage,
                             const WriterLocator& locator) const {
  if (!ref.is_reg()) return;
  if (!can_read_in(ref, stage, locator)) {
    throw HazardViolation(layout_.registers[ref.reg].name +
                          ".read(s) without a ready writer in that stage");
  }
  RegValue v = 0;
  const auto& cells = cells_of(ref);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& cell = cells_[cells[k]];
    Word chunk = cell.value;
    if (!cell.writer.empty()) {
      // Pick this cell's slice out of the writer's (possibly wider or
      // narrower) register value.
      const Operand& writer = *locator.locate(cell.writer)->ref;
      const auto& wcells = cells_of(writer);
      auto pos = std::find(wcells.begin(), wcells.end(), cells[k]) -
                 wcells.begin();
      chunk = static_cast<Word>(writer.internal >> (32 * pos));
    }
    v |= static_cast<RegValue>(chunk) << (32 * k);
  }
  ref.internal = v;
  ref.has_value = true;
}

bool RegisterFile::can_write(const Operand& ref) const {
  return can_read(ref);
}

void RegisterFile::reserve_write(const Operand& ref, const WriterMark& who) {
  if (!ref.is_reg()) return;
  if (ref.role != Role::Write) {
    throw HazardViolation(layout_.registers[ref.reg].name +
                          ".reserveWrite() on a read operand");
  }
  if (!can_write(ref)) {
    throw HazardViolation(layout_.registers[ref.reg].name +
                          ".reserveWrite() with a pending writer");
  }
  for (auto c : cells_of(ref)) cells_[c].writer = who;
}

void RegisterFile::writeback(const Operand& ref, const WriterMark& who) {
  if (!ref.is_reg()) return;
  const auto& cells = cells_of(ref);
  for (auto c : cells) {
    if (cells_[c].writer != who) {
      throw HazardViolation(layout_.registers[ref.reg].name +
                            ".writeback() without holding the reservation");
    }
  }
  if (!ref.has_value) {
    throw HazardViolation(layout_.registers[ref.reg].name +
                          ".writeback() before a value was computed");
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    cells_[cells[k]].value = static_cast<Word>(ref.internal >> (32 * k));
    cells_[cells[k]].writer = WriterMark{};
  }
}

void RegisterFile::retire_audit(TokenId token) const {
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    if (cells_[c].writer.token == token) {
      throw DanglingReservation("instruction " + std::to_string(token) +
                                " retired still holding a write reservation "
                                "on cell " + std::to_string(c));
    }
  }
}

RegValue RegisterFile::value(std::uint16_t reg) const {
  const auto& cells = layout_.registers.at(reg).cells;
  RegValue v = 0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    v |= static_cast<RegValue>(cells_[cells[k]].value) << (32 * k);
  }
  return v;
}

void RegisterFile::set_value(std::uint16_t reg, RegValue value) {
  const auto& cells = layout_.registers.at(reg).cells;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    cells_[cells[k]].value = static_cast<Word>(value >> (32 * k));
  }
}

}  // namespace rcpn
