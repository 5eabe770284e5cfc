#include "rcpn/assembler.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>

#include "rcpn/isa.hpp"

namespace rcpn {

namespace {

struct Line {
  std::size_t number;
  std::string mnemonic;
  std::vector<std::string> operands;  // brackets kept as "[" and "]"
};

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(cur), cur.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t') {
      flush();
    } else if (c == '[' || c == ']') {
      flush();
      out.emplace_back(1, c);
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    s.remove_prefix(2);
  }
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return neg ? -v : v;
}

class Pass2 {
 public:
  Pass2(const std::map<std::string, std::size_t>& labels) : labels_(labels) {}

  Word encode(const Line& line, std::size_t pc) {
    line_ = line.number;
    const auto& m = line.mnemonic;
    const auto& ops = line.operands;
    std::vector<std::int64_t> v;
    if (m == "HALT") {
      arity(ops, 0);
    } else if (m == "LD" || m == "ST") {
      // rt [ base #off ]  or  rt [ base ]
      if (ops.size() == 4 && ops[1] == "[" && ops[3] == "]") {
        v = {reg(ops[0]), reg(ops[2]), 0};
      } else if (ops.size() == 5 && ops[1] == "[" && ops[4] == "]") {
        v = {reg(ops[0]), reg(ops[2]), imm(ops[3])};
      } else {
        syntax("expected '" + m + " rt, [base, #off]'");
      }
    } else if (m == "B") {
      arity(ops, 1);
      v = {target(ops[0], pc)};
    } else if (m == "BEQZ" || m == "BNEZ") {
      arity(ops, 2);
      v = {reg(ops[0]), target(ops[1], pc)};
    } else if (!m.empty() && m.back() == 'I') {
      arity(ops, 3);
      v = {reg(ops[0]), reg(ops[1]), imm(ops[2])};
    } else {
      arity(ops, 3);
      v = {reg(ops[0]), reg(ops[1]), reg(ops[2])};
    }
    try {
      return isa::encode(m, v);
    } catch (const isa::UnknownMnemonic& e) {
      syntax(e.what());
    } catch (const isa::OperandRange& e) {
      throw AssemblyError(AssemblyError::Kind::OperandRange, line_, e.what());
    }
  }

 private:
  [[noreturn]] void syntax(const std::string& what) {
    throw AssemblyError(AssemblyError::Kind::Syntax, line_, what);
  }

  void arity(const std::vector<std::string>& ops, std::size_t n) {
    if (ops.size() != n) {
      syntax("expected " + std::to_string(n) + " operands, got " +
             std::to_string(ops.size()));
    }
  }

  std::int64_t reg(const std::string& s) {
    if (s.size() < 2 || (s[0] != 'r' && s[0] != 'R')) {
      syntax("expected a register, got '" + s + "'");
    }
    auto v = parse_int(std::string_view(s).substr(1));
    if (!v) syntax("bad register '" + s + "'");
    return *v;
  }

  std::int64_t imm(const std::string& s) {
    if (s.empty() || s[0] != '#') syntax("expected '#imm', got '" + s + "'");
    auto v = parse_int(std::string_view(s).substr(1));
    if (!v) syntax("bad immediate '" + s + "'");
    return *v;
  }

  std::int64_t target(const std::string& s, std::size_t pc) {
    if (!s.empty() && s[0] == '#') return imm(s);
    if (auto v = parse_int(s)) return *v;
    auto it = labels_.find(s);
    if (it == labels_.end()) {
      throw AssemblyError(AssemblyError::Kind::UnknownLabel, line_,
                          "unknown label '" + s + "'");
    }
    return static_cast<std::int64_t>(it->second) -
           static_cast<std::int64_t>(pc + 1);
  }

  const std::map<std::string, std::size_t>& labels_;
  std::size_t line_ = 0;
};

}  // namespace

std::vector<Word> assemble(std::string_view source) {
  std::map<std::string, std::size_t> labels;
  std::vector<Line> lines;

  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= source.size()) {
    auto end = source.find('\n', start);
    if (end == std::string_view::npos) end = source.size();
    std::string_view raw = source.substr(start, end - start);
    start = end + 1;
    ++number;

    if (auto c = raw.find(';'); c != std::string_view::npos) raw = raw.substr(0, c);
    std::string text = trim(raw);
    // Any number of leading "label:" definitions.
    for (;;) {
      auto colon = text.find(':');
      if (colon == std::string::npos) break;
      std::string label = trim(std::string_view(text).substr(0, colon));
      if (label.empty() || std::isdigit(static_cast<unsigned char>(label[0]))) {
        throw AssemblyError(AssemblyError::Kind::Syntax, number,
                            "bad label '" + label + "'");
      }
      for (char ch : label) {
        if (!is_ident_char(ch)) {
          throw AssemblyError(AssemblyError::Kind::Syntax, number,
                              "bad label '" + label + "'");
        }
      }
      if (!labels.emplace(label, lines.size()).second) {
        throw AssemblyError(AssemblyError::Kind::Syntax, number,
                            "duplicate label '" + label + "'");
      }
      text = trim(std::string_view(text).substr(colon + 1));
    }
    if (text.empty()) continue;

    auto toks = tokenize(text);
    Line line{number, toks.front(), {toks.begin() + 1, toks.end()}};
    for (auto& ch : line.mnemonic) {
      ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    }
    lines.push_back(std::move(line));
  }

  Pass2 pass2(labels);
  std::vector<Word> image;
  image.reserve(lines.size());
  for (std::size_t pc = 0; pc < lines.size(); ++pc) {
    image.push_back(pass2.encode(lines[pc], pc));
  }
  return image;
}

std::vector<unsigned char> to_bytes(const std::vector<Word>& words) {
  std::vector<unsigned char> out;
  out.reserve(words.size() * 4);
  for (Word w : words) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(w >> (8 * i)));
  }
  return out;
}

std::vector<Word> from_bytes(const std::vector<unsigned char>& bytes) {
  if (bytes.size() % 4 != 0) {
    throw std::invalid_argument("program image is not a whole number of words");
  }
  std::vector<Word> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    Word w = 0;
    for (int b = 0; b < 4; ++b) w |= static_cast<Word>(bytes[4 * i + b]) << (8 * b);
    out[i] = w;
  }
  return out;
}

}  // namespace rcpn
