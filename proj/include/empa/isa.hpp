// Instruction set, register masks, and the two-pass assembler/disassembler.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace empa {

// Register-file size. r0 reads as zero and ignores writes.
inline constexpr int kRegisterCount = 16;

enum class Opcode : uint8_t {
  // Conventional instructions.
  Li,
  Mov,
  Add,
  Sub,
  Mul,
  Ld,
  St,
  Beq,
  Bne,
  Jmp,
  Halt,
  // Meta-instructions, dispatched through the processor's Meta FIFO.
  QCreate,
  QWait,
  QClone,
  QEnd,
  QGuard,
  QCallG,
};

bool is_meta(Opcode op);
std::string_view mnemonic(Opcode op);

// Set of registers, one bit per register index.
struct RegMask {
  uint16_t bits = 0;

  static RegMask of(std::initializer_list<int> regs) {
    RegMask m;
    for (int r : regs) m.set(r);
    return m;
  }
  bool test(int r) const { return (bits >> r) & 1u; }
  void set(int r) { bits |= uint16_t(1u << r); }
  void clear(int r) { bits &= uint16_t(~(1u << r)); }
  bool empty() const { return bits == 0; }
  int count() const;
  bool operator==(const RegMask&) const = default;
  // Renders as "{r1,r3}" in ascending register order; "{}" when empty.
  std::string to_string() const;
};

struct Instruction {
  Opcode op = Opcode::Halt;
  uint8_t rd = 0;  // destination register / QCREATE handle register / QWAIT source
  uint8_t rs = 0;  // first source register / memory base
  uint8_t rt = 0;  // second source register
  int64_t imm = 0;           // LI immediate, LD/ST displacement
  int32_t target = -1;       // branch/jump target: offset within the fragment
  int32_t fragment = -1;     // QCREATE/QGUARD/QCALLG target fragment index
  RegMask in_mask;           // QCREATE/QCALLG input registers
  RegMask ret_mask;          // registers the child sends back / QCLONE mask
  int line = 0;              // source line for diagnostics; not part of identity

  bool same(const Instruction& o) const {
    return op == o.op && rd == o.rd && rs == o.rs && rt == o.rt && imm == o.imm &&
           target == o.target && fragment == o.fragment && in_mask == o.in_mask &&
           ret_mask == o.ret_mask;
  }
};

struct Fragment {
  std::string name;
  std::vector<Instruction> body;
};

struct Program {
  std::vector<Fragment> fragments;
  int entry = 0;  // index of the root fragment (first fragment in the source)

  const Fragment& entry_fragment() const { return fragments[size_t(entry)]; }
  int fragment_index(std::string_view name) const;
};

// Structural equality: fragment names, order, and instruction sequences.
// Local label spellings and source line numbers do not participate.
bool structurally_equal(const Program& a, const Program& b);

enum class DiagCode {
  UnknownMnemonic,
  UndefinedLabel,
  RegisterOutOfRange,
  MissingQEnd,
  MalformedOperand,
  DuplicateLabel,
  IllegalHalt,
  EmptyProgram,
};

std::string_view diag_code_name(DiagCode code);

struct Diagnostic {
  DiagCode code;
  int line = 0;  // 1-based source line, 0 when not tied to a line
  std::string message;

  std::string to_string() const;
};

using DiagnosticList = std::vector<Diagnostic>;

struct AssemblyResult {
  std::optional<Program> program;  // present iff diagnostics is empty
  DiagnosticList diagnostics;

  bool ok() const { return program.has_value(); }
};

// Two-pass assembler for the line-oriented format:
//   `name:` at column 0 opens a fragment; instructions are indented;
//   `.L1:` defines a fragment-local label; `;` comments to end of line;
//   masks are written `{r1,r3}`; immediates are decimal or 0x-hex.
// Instructions before the first fragment header form an implicit "main"
// fragment, so plain conventional assembly assembles as a one-fragment
// program.
AssemblyResult assemble(std::string_view source);

// Canonical text rendering; assemble(disassemble(p)) is structurally
// identical to p. Branch targets are rendered as generated .L<n> labels.
std::string disassemble(const Program& program);

// Checks Program/Fragment invariants: every fragment terminates (QEND, or
// HALT in the root only), no fall-through past the last instruction,
// register and mask ranges, and resolved cross-references.
DiagnosticList validate(const Program& program);

}  // namespace empa
