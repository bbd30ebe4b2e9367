#include "empa/isa.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <sstream>

namespace empa {

namespace {

struct MnemonicEntry {
  std::string_view name;
  Opcode op;
};

constexpr MnemonicEntry kMnemonics[] = {
    {"LI", Opcode::Li},         {"MOV", Opcode::Mov},     {"ADD", Opcode::Add},
    {"SUB", Opcode::Sub},       {"MUL", Opcode::Mul},     {"LD", Opcode::Ld},
    {"ST", Opcode::St},         {"BEQ", Opcode::Beq},     {"BNE", Opcode::Bne},
    {"JMP", Opcode::Jmp},       {"HALT", Opcode::Halt},   {"QCREATE", Opcode::QCreate},
    {"QWAIT", Opcode::QWait},   {"QCLONE", Opcode::QClone}, {"QEND", Opcode::QEnd},
    {"QGUARD", Opcode::QGuard}, {"QCALLG", Opcode::QCallG},
};

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = char(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

// Splits an operand list on top-level commas; commas inside {} or [] group.
std::vector<std::string_view> split_operands(std::string_view s) {
  std::vector<std::string_view> out;
  s = trim(s);
  if (s.empty()) return out;
  int depth = 0;
  size_t start = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '{' || c == '[') ++depth;
    else if (c == '}' || c == ']') --depth;
    else if (c == ',' && depth == 0) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.push_back(trim(s.substr(start)));
  return out;
}

std::optional<Opcode> lookup_mnemonic(std::string_view word) {
  std::string w = upper(word);
  for (const auto& e : kMnemonics)
    if (e.name == w) return e.op;
  return std::nullopt;
}

// Per-fragment data gathered during the first pass.
struct PendingLine {
  int line_no;
  std::string text;
};

struct PendingFragment {
  std::string name;
  int header_line;
  std::vector<PendingLine> lines;
  std::map<std::string, int, std::less<>> labels;  // local label -> offset
};

class Assembler {
 public:
  explicit Assembler(std::string_view source) : source_(source) {}

  AssemblyResult run() {
    first_pass();
    if (fragments_.empty() ||
        (fragments_.size() == 1 && fragments_[0].lines.empty())) {
      diag(DiagCode::EmptyProgram, 0, "no instructions in source");
    }
    Program prog;
    if (diags_.empty()) {
      for (auto& pf : fragments_) {
        Fragment frag;
        frag.name = pf.name;
        for (auto& ln : pf.lines) {
          if (auto ins = parse_instruction(pf, ln)) frag.body.push_back(*ins);
        }
        prog.fragments.push_back(std::move(frag));
      }
    }
    AssemblyResult result;
    result.diagnostics = std::move(diags_);
    if (result.diagnostics.empty()) result.program = std::move(prog);
    return result;
  }

 private:
  void diag(DiagCode code, int line, std::string msg) {
    diags_.push_back({code, line, std::move(msg)});
  }

  PendingFragment& current_fragment(int line_no) {
    if (fragments_.empty()) {
      // Instructions before any header form an implicit "main" fragment.
      fragments_.push_back({"main", line_no, {}, {}});
      fragment_index_["main"] = 0;
    }
    return fragments_.back();
  }

  void open_fragment(std::string name, int line_no) {
    if (fragment_index_.count(name)) {
      diag(DiagCode::DuplicateLabel, line_no,
           "fragment '" + name + "' already defined");
      return;
    }
    fragment_index_[name] = int(fragments_.size());
    fragments_.push_back({std::move(name), line_no, {}, {}});
  }

  void first_pass() {
    int line_no = 0;
    size_t pos = 0;
    while (pos <= source_.size()) {
      size_t nl = source_.find('\n', pos);
      std::string_view raw = source_.substr(
          pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      pos = nl == std::string_view::npos ? source_.size() + 1 : nl + 1;
      ++line_no;

      if (size_t sc = raw.find(';'); sc != std::string_view::npos)
        raw = raw.substr(0, sc);
      std::string_view text = trim(raw);
      if (text.empty()) continue;

      // `ident:` prefix — fragment header or local label.
      size_t ident_end = 0;
      while (ident_end < text.size() && is_ident_char(text[ident_end])) ++ident_end;
      if (ident_end > 0 && ident_end < text.size() && text[ident_end] == ':') {
        std::string name(text.substr(0, ident_end));
        std::string_view rest = trim(text.substr(ident_end + 1));
        if (name[0] == '.') {
          auto& frag = current_fragment(line_no);
          auto [it, inserted] = frag.labels.emplace(name, int(frag.lines.size()));
          if (!inserted)
            diag(DiagCode::DuplicateLabel, line_no,
                 "label '" + name + "' already defined in fragment '" +
                     frag.name + "'");
        } else {
          open_fragment(std::move(name), line_no);
        }
        if (!rest.empty())
          current_fragment(line_no).lines.push_back({line_no, std::string(rest)});
        continue;
      }
      current_fragment(line_no).lines.push_back({line_no, std::string(text)});
    }
    // Labels pointing past the last instruction stay as-is; branches to them
    // are caught by validate() as fall-through, not here.
  }

  std::optional<int> parse_register(std::string_view tok, int line_no) {
    tok = trim(tok);
    if (tok.size() < 2 || (tok[0] != 'r' && tok[0] != 'R')) {
      diag(DiagCode::MalformedOperand, line_no,
           "expected register, got '" + std::string(tok) + "'");
      return std::nullopt;
    }
    int value = 0;
    auto [ptr, ec] =
        std::from_chars(tok.data() + 1, tok.data() + tok.size(), value, 10);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      diag(DiagCode::MalformedOperand, line_no,
           "expected register, got '" + std::string(tok) + "'");
      return std::nullopt;
    }
    if (value < 0 || value >= kRegisterCount) {
      diag(DiagCode::RegisterOutOfRange, line_no,
           "register r" + std::to_string(value) + " out of range (r0..r" +
               std::to_string(kRegisterCount - 1) + ")");
      return std::nullopt;
    }
    return value;
  }

  std::optional<int64_t> parse_immediate(std::string_view tok, int line_no) {
    tok = trim(tok);
    std::string_view body = tok;
    bool negative = false;
    if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
      negative = body[0] == '-';
      body = trim(body.substr(1));
    }
    int base = 10;
    if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) {
      base = 16;
      body = body.substr(2);
    }
    uint64_t magnitude = 0;
    auto [ptr, ec] =
        std::from_chars(body.data(), body.data() + body.size(), magnitude, base);
    if (body.empty() || ec != std::errc() || ptr != body.data() + body.size()) {
      diag(DiagCode::MalformedOperand, line_no,
           "bad immediate '" + std::string(tok) + "'");
      return std::nullopt;
    }
    int64_t value = int64_t(magnitude);
    return negative ? -value : value;
  }

  std::optional<RegMask> parse_mask(std::string_view tok, int line_no) {
    tok = trim(tok);
    if (tok.size() < 2 || tok.front() != '{' || tok.back() != '}') {
      diag(DiagCode::MalformedOperand, line_no,
           "expected register set like {r1,r3}, got '" + std::string(tok) + "'");
      return std::nullopt;
    }
    std::string_view inner = trim(tok.substr(1, tok.size() - 2));
    RegMask mask;
    if (inner.empty()) return mask;
    for (std::string_view part : split_operands(inner)) {
      auto reg = parse_register(part, line_no);
      if (!reg) return std::nullopt;
      mask.set(*reg);
    }
    return mask;
  }

  // `[rs]`, `[rs+4]`, `[rs-4]`, `[rs + 0x10]`
  std::optional<std::pair<int, int64_t>> parse_mem_operand(std::string_view tok,
                                                          int line_no) {
    tok = trim(tok);
    if (tok.size() < 2 || tok.front() != '[' || tok.back() != ']') {
      diag(DiagCode::MalformedOperand, line_no,
           "expected memory operand like [r1+8], got '" + std::string(tok) + "'");
      return std::nullopt;
    }
    std::string_view inner = trim(tok.substr(1, tok.size() - 2));
    size_t split = inner.npos;
    for (size_t i = 1; i < inner.size(); ++i)
      if (inner[i] == '+' || inner[i] == '-') {
        split = i;
        break;
      }
    std::string_view reg_part = split == inner.npos ? inner : inner.substr(0, split);
    auto reg = parse_register(trim(reg_part), line_no);
    if (!reg) return std::nullopt;
    int64_t disp = 0;
    if (split != inner.npos) {
      auto imm = parse_immediate(trim(inner.substr(split)), line_no);
      if (!imm) return std::nullopt;
      disp = *imm;
    }
    return std::make_pair(*reg, disp);
  }

  std::optional<int> resolve_local_label(const PendingFragment& frag,
                                         std::string_view tok, int line_no) {
    tok = trim(tok);
    auto it = frag.labels.find(tok);
    if (it == frag.labels.end()) {
      diag(DiagCode::UndefinedLabel, line_no,
           "label '" + std::string(tok) + "' not defined in fragment '" +
               frag.name + "'");
      return std::nullopt;
    }
    return it->second;
  }

  std::optional<int> resolve_fragment(std::string_view tok, int line_no) {
    tok = trim(tok);
    auto it = fragment_index_.find(tok);
    if (it == fragment_index_.end()) {
      diag(DiagCode::UndefinedLabel, line_no,
           "fragment '" + std::string(tok) + "' is not defined");
      return std::nullopt;
    }
    return it->second;
  }

  bool expect_count(const std::vector<std::string_view>& ops, size_t n,
                    std::string_view mnem, int line_no) {
    if (ops.size() == n) return true;
    diag(DiagCode::MalformedOperand, line_no,
         std::string(mnem) + " expects " + std::to_string(n) + " operand(s), got " +
             std::to_string(ops.size()));
    return false;
  }

  std::optional<Instruction> parse_instruction(const PendingFragment& frag,
                                               const PendingLine& ln) {
    std::string_view text = ln.text;
    size_t word_end = 0;
    while (word_end < text.size() &&
           !std::isspace(static_cast<unsigned char>(text[word_end])))
      ++word_end;
    std::string_view word = text.substr(0, word_end);
    auto op = lookup_mnemonic(word);
    if (!op) {
      diag(DiagCode::UnknownMnemonic, ln.line_no,
           "unknown mnemonic '" + std::string(word) + "'");
      return std::nullopt;
    }
    auto ops = split_operands(text.substr(word_end));
    Instruction ins;
    ins.op = *op;
    ins.line = ln.line_no;
    size_t before = diags_.size();

    auto reg = [&](std::string_view t) { return parse_register(t, ln.line_no); };
    switch (*op) {
      case Opcode::Li: {
        if (!expect_count(ops, 2, word, ln.line_no)) return std::nullopt;
        auto rd = reg(ops[0]);
        auto imm = parse_immediate(ops[1], ln.line_no);
        if (rd && imm) { ins.rd = uint8_t(*rd); ins.imm = *imm; }
        break;
      }
      case Opcode::Mov: {
        if (!expect_count(ops, 2, word, ln.line_no)) return std::nullopt;
        auto rd = reg(ops[0]);
        auto rs = reg(ops[1]);
        if (rd && rs) { ins.rd = uint8_t(*rd); ins.rs = uint8_t(*rs); }
        break;
      }
      case Opcode::Add:
      case Opcode::Sub:
      case Opcode::Mul: {
        if (!expect_count(ops, 3, word, ln.line_no)) return std::nullopt;
        auto rd = reg(ops[0]);
        auto rs = reg(ops[1]);
        auto rt = reg(ops[2]);
        if (rd && rs && rt) {
          ins.rd = uint8_t(*rd); ins.rs = uint8_t(*rs); ins.rt = uint8_t(*rt);
        }
        break;
      }
      case Opcode::Ld: {
        if (!expect_count(ops, 2, word, ln.line_no)) return std::nullopt;
        auto rd = reg(ops[0]);
        auto mem = parse_mem_operand(ops[1], ln.line_no);
        if (rd && mem) {
          ins.rd = uint8_t(*rd); ins.rs = uint8_t(mem->first); ins.imm = mem->second;
        }
        break;
      }
      case Opcode::St: {
        if (!expect_count(ops, 2, word, ln.line_no)) return std::nullopt;
        auto mem = parse_mem_operand(ops[0], ln.line_no);
        auto rt = reg(ops[1]);
        if (mem && rt) {
          ins.rs = uint8_t(mem->first); ins.imm = mem->second; ins.rt = uint8_t(*rt);
        }
        break;
      }
      case Opcode::Beq:
      case Opcode::Bne: {
        if (!expect_count(ops, 3, word, ln.line_no)) return std::nullopt;
        auto rs = reg(ops[0]);
        auto rt = reg(ops[1]);
        auto target = resolve_local_label(frag, ops[2], ln.line_no);
        if (rs && rt && target) {
          ins.rs = uint8_t(*rs); ins.rt = uint8_t(*rt); ins.target = *target;
        }
        break;
      }
      case Opcode::Jmp: {
        if (!expect_count(ops, 1, word, ln.line_no)) return std::nullopt;
        auto target = resolve_local_label(frag, ops[0], ln.line_no);
        if (target) ins.target = *target;
        break;
      }
      case Opcode::Halt:
      case Opcode::QEnd: {
        if (!expect_count(ops, 0, word, ln.line_no)) return std::nullopt;
        break;
      }
      case Opcode::QCreate: {
        if (!expect_count(ops, 4, word, ln.line_no)) return std::nullopt;
        auto rd = reg(ops[0]);
        auto frag_idx = resolve_fragment(ops[1], ln.line_no);
        auto in = parse_mask(ops[2], ln.line_no);
        auto ret = parse_mask(ops[3], ln.line_no);
        if (rd && frag_idx && in && ret) {
          ins.rd = uint8_t(*rd); ins.fragment = *frag_idx;
          ins.in_mask = *in; ins.ret_mask = *ret;
        }
        break;
      }
      case Opcode::QWait: {
        if (!expect_count(ops, 1, word, ln.line_no)) return std::nullopt;
        auto rs = reg(ops[0]);
        if (rs) ins.rs = uint8_t(*rs);
        break;
      }
      case Opcode::QClone: {
        if (!expect_count(ops, 1, word, ln.line_no)) return std::nullopt;
        auto mask = parse_mask(ops[0], ln.line_no);
        if (mask) ins.ret_mask = *mask;
        break;
      }
      case Opcode::QGuard: {
        if (!expect_count(ops, 1, word, ln.line_no)) return std::nullopt;
        auto frag_idx = resolve_fragment(ops[0], ln.line_no);
        if (frag_idx) ins.fragment = *frag_idx;
        break;
      }
      case Opcode::QCallG: {
        if (!expect_count(ops, 3, word, ln.line_no)) return std::nullopt;
        auto frag_idx = resolve_fragment(ops[0], ln.line_no);
        auto in = parse_mask(ops[1], ln.line_no);
        auto ret = parse_mask(ops[2], ln.line_no);
        if (frag_idx && in && ret) {
          ins.fragment = *frag_idx; ins.in_mask = *in; ins.ret_mask = *ret;
        }
        break;
      }
    }
    if (diags_.size() != before) return std::nullopt;
    return ins;
  }

  std::string_view source_;
  std::vector<PendingFragment> fragments_;
  std::map<std::string, int, std::less<>> fragment_index_;
  DiagnosticList diags_;
};

}  // namespace

bool is_meta(Opcode op) {
  switch (op) {
    case Opcode::QCreate:
    case Opcode::QWait:
    case Opcode::QClone:
    case Opcode::QEnd:
    case Opcode::QGuard:
    case Opcode::QCallG:
      return true;
    default:
      return false;
  }
}

std::string_view mnemonic(Opcode op) {
  for (const auto& e : kMnemonics)
    if (e.op == op) return e.name;
  return "?";
}

int RegMask::count() const {
  int n = 0;
  for (int r = 0; r < kRegisterCount; ++r)
    if (test(r)) ++n;
  return n;
}

std::string RegMask::to_string() const {
  std::string out = "{";
  bool first = true;
  for (int r = 0; r < kRegisterCount; ++r) {
    if (!test(r)) continue;
    if (!first) out += ",";
    out += "r" + std::to_string(r);
    first = false;
  }
  out += "}";
  return out;
}

int Program::fragment_index(std::string_view name) const {
  for (size_t i = 0; i < fragments.size(); ++i)
    if (fragments[i].name == name) return int(i);
  return -1;
}

bool structurally_equal(const Program& a, const Program& b) {
  if (a.entry != b.entry || a.fragments.size() != b.fragments.size()) return false;
  for (size_t i = 0; i < a.fragments.size(); ++i) {
    const Fragment& fa = a.fragments[i];
    const Fragment& fb = b.fragments[i];
    if (fa.name != fb.name || fa.body.size() != fb.body.size()) return false;
    for (size_t j = 0; j < fa.body.size(); ++j)
      if (!fa.body[j].same(fb.body[j])) return false;
  }
  return true;
}

std::string_view diag_code_name(DiagCode code) {
  switch (code) {
    case DiagCode::UnknownMnemonic: return "UnknownMnemonic";
    case DiagCode::UndefinedLabel: return "UndefinedLabel";
    case DiagCode::RegisterOutOfRange: return "RegisterOutOfRange";
    case DiagCode::MissingQEnd: return "MissingQEnd";
    case DiagCode::MalformedOperand: return "MalformedOperand";
    case DiagCode::DuplicateLabel: return "DuplicateLabel";
    case DiagCode::IllegalHalt: return "IllegalHalt";
    case DiagCode::EmptyProgram: return "EmptyProgram";
  }
  return "?";
}

std::string Diagnostic::to_string() const {
  std::string out;
  if (line > 0) out += "line " + std::to_string(line) + ": ";
  out += std::string(diag_code_name(code)) + ": " + message;
  return out;
}

AssemblyResult assemble(std::string_view source) {
  return Assembler(source).run();
}

namespace {

std::string immediate_text(int64_t v) { return std::to_string(v); }

std::string mem_text(const Instruction& ins) {
  std::string out = "[r" + std::to_string(ins.rs);
  if (ins.imm > 0) out += "+" + std::to_string(ins.imm);
  else if (ins.imm < 0) out += std::to_string(ins.imm);
  out += "]";
  return out;
}

}  // namespace

std::string disassemble(const Program& program) {
  std::ostringstream out;
  for (size_t fi = 0; fi < program.fragments.size(); ++fi) {
    const Fragment& frag = program.fragments[fi];
    if (fi > 0) out << "\n";
    out << frag.name << ":\n";

    // Regenerate local labels, numbered in target-address order.
    std::map<int, std::string> labels;
    for (const Instruction& ins : frag.body)
      if ((ins.op == Opcode::Beq || ins.op == Opcode::Bne ||
           ins.op == Opcode::Jmp) &&
          ins.target >= 0)
        labels.emplace(ins.target, "");
    int next = 1;
    for (auto& [offset, name] : labels) name = ".L" + std::to_string(next++);

    for (size_t i = 0; i < frag.body.size(); ++i) {
      if (auto it = labels.find(int(i)); it != labels.end())
        out << "  " << it->second << ":\n";
      const Instruction& ins = frag.body[i];
      out << "    " << mnemonic(ins.op);
      std::string r_d = "r" + std::to_string(ins.rd);
      std::string r_s = "r" + std::to_string(ins.rs);
      std::string r_t = "r" + std::to_string(ins.rt);
      switch (ins.op) {
        case Opcode::Li: out << " " << r_d << ", " << immediate_text(ins.imm); break;
        case Opcode::Mov: out << " " << r_d << ", " << r_s; break;
        case Opcode::Add:
        case Opcode::Sub:
        case Opcode::Mul:
          out << " " << r_d << ", " << r_s << ", " << r_t;
          break;
        case Opcode::Ld: out << " " << r_d << ", " << mem_text(ins); break;
        case Opcode::St: out << " " << mem_text(ins) << ", " << r_t; break;
        case Opcode::Beq:
        case Opcode::Bne:
          out << " " << r_s << ", " << r_t << ", " << labels.at(ins.target);
          break;
        case Opcode::Jmp: out << " " << labels.at(ins.target); break;
        case Opcode::Halt:
        case Opcode::QEnd: break;
        case Opcode::QCreate:
          out << " " << r_d << ", " << program.fragments[size_t(ins.fragment)].name
              << ", " << ins.in_mask.to_string() << ", " << ins.ret_mask.to_string();
          break;
        case Opcode::QWait: out << " " << r_s; break;
        case Opcode::QClone: out << " " << ins.ret_mask.to_string(); break;
        case Opcode::QGuard:
          out << " " << program.fragments[size_t(ins.fragment)].name;
          break;
        case Opcode::QCallG:
          out << " " << program.fragments[size_t(ins.fragment)].name << ", "
              << ins.in_mask.to_string() << ", " << ins.ret_mask.to_string();
          break;
      }
      out << "\n";
    }
    // A label may point one past the last instruction (loop exit target).
    if (auto it = labels.find(int(frag.body.size())); it != labels.end())
      out << "  " << it->second << ":\n";
  }
  return out.str();
}

DiagnosticList validate(const Program& program) {
  DiagnosticList diags;
  auto diag = [&](DiagCode code, int line, std::string msg) {
    diags.push_back({code, line, std::move(msg)});
  };
  if (program.fragments.empty()) {
    diag(DiagCode::EmptyProgram, 0, "program has no fragments");
    return diags;
  }
  if (program.entry < 0 || size_t(program.entry) >= program.fragments.size()) {
    diag(DiagCode::EmptyProgram, 0, "entry fragment index out of range");
    return diags;
  }
  int nfrag = int(program.fragments.size());
  for (int fi = 0; fi < nfrag; ++fi) {
    const Fragment& frag = program.fragments[size_t(fi)];
    bool is_entry = fi == program.entry;
    if (frag.body.empty()) {
      diag(DiagCode::MissingQEnd, 0, "fragment '" + frag.name + "' is empty");
      continue;
    }
    int n = int(frag.body.size());
    for (int i = 0; i < n; ++i) {
      const Instruction& ins = frag.body[size_t(i)];
      auto check_reg = [&](int r, std::string_view what) {
        if (r < 0 || r >= kRegisterCount)
          diag(DiagCode::RegisterOutOfRange, ins.line,
               std::string(what) + " register out of range in fragment '" +
                   frag.name + "'");
      };
      check_reg(ins.rd, "destination");
      check_reg(ins.rs, "source");
      check_reg(ins.rt, "source");
      if (ins.in_mask.bits >> kRegisterCount || ins.ret_mask.bits >> kRegisterCount)
        diag(DiagCode::RegisterOutOfRange, ins.line,
             "register set references registers beyond r" +
                 std::to_string(kRegisterCount - 1));
      if (ins.op == Opcode::Beq || ins.op == Opcode::Bne || ins.op == Opcode::Jmp) {
        if (ins.target < 0 || ins.target >= n)
          diag(DiagCode::UndefinedLabel, ins.line,
               "branch target out of range in fragment '" + frag.name + "'");
      }
      if (ins.op == Opcode::QCreate || ins.op == Opcode::QGuard ||
          ins.op == Opcode::QCallG) {
        if (ins.fragment < 0 || ins.fragment >= nfrag)
          diag(DiagCode::UndefinedLabel, ins.line,
               "fragment reference out of range in fragment '" + frag.name + "'");
      }
      if (ins.op == Opcode::Halt && !is_entry)
        diag(DiagCode::IllegalHalt, ins.line,
             "HALT is only allowed in the entry fragment; '" + frag.name +
                 "' must finish with QEND");
    }
    // Fall-through check: the last instruction must not continue past the end.
    const Instruction& last = frag.body.back();
    bool terminates = last.op == Opcode::QEnd || last.op == Opcode::Jmp ||
                      (is_entry && last.op == Opcode::Halt);
    if (!terminates)
      diag(DiagCode::MissingQEnd, last.line,
           "fragment '" + frag.name + "' can run past its final instruction (" +
               std::string(mnemonic(last.op)) + ")");
  }
  return diags;
}

}  // namespace empa
