#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rcpn/common.hpp"

namespace rcpn {

class AssemblyError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownLabel, OperandRange };
  AssemblyError(Kind kind, std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        kind_(kind),
        line_(line) {}
  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

// Two-pass assembler for TinyISA source. Branch targets are labels or
// `#n` literal word offsets relative to pc+1.
std::vector<Word> assemble(std::string_view source);

// Little-endian 32-bit words.
std::vector<unsigned char> to_bytes(const std::vector<Word>& words);
std::vector<Word> from_bytes(const std::vector<unsigned char>& bytes);

}  // namespace rcpn
