// Single-processor reference run. The same source executes on one core
// with one register file: spawns and guarded calls become subroutine
// calls, and the registers a call must not clobber (inputs that are not
// results) are spilled to a stack at the top of memory, one access per
// word. Waits, clones, and guard registrations have no sequential
// counterpart and fall away.
#include "empa/engine.hpp"

namespace empa {

namespace {

struct Frame {
  int fragment = 0;
  int ret_ip = 0;
  int call_id = 0;
  std::vector<int> saved;  // ascending; restored in reverse
};

int64_t wrap_add(int64_t a, int64_t b) {
  return int64_t(uint64_t(a) + uint64_t(b));
}
int64_t wrap_sub(int64_t a, int64_t b) {
  return int64_t(uint64_t(a) - uint64_t(b));
}
int64_t wrap_mul(int64_t a, int64_t b) {
  return int64_t(uint64_t(a) * uint64_t(b));
}

}  // namespace

RunResult run_spa_baseline(const Program& program, const SimConfig& cfg) {
  RunResult result;
  for (const Diagnostic& d : validate(program)) {
    result.status = RunStatus::ConfigError;
    result.problems.push_back(d.to_string());
  }
  if (cfg.cycle_per_instr < 1 || cfg.hop_cost < 0 || cfg.memory_latency < 0) {
    result.status = RunStatus::ConfigError;
    result.problems.push_back("timing costs must be non-negative");
  }
  if (cfg.stack_words < 0 || cfg.stack_words > cfg.memory_size) {
    result.status = RunStatus::ConfigError;
    result.problems.push_back("stack region larger than memory");
  }
  for (auto [address, value] : cfg.memory_init) {
    if (address < 0 || address >= cfg.memory_size) {
      result.status = RunStatus::ConfigError;
      result.problems.push_back("memory init address " +
                                std::to_string(address) + " out of range");
    }
  }
  if (result.status == RunStatus::ConfigError) return result;

  std::map<int64_t, int64_t> memory;
  for (auto [address, value] : cfg.memory_init) memory[address] = value;

  std::array<int64_t, kRegisterCount> regs{};
  std::vector<Frame> stack;
  int fragment = program.entry;
  int ip = 0;
  int64_t t = 0;
  int64_t sp = cfg.memory_size;
  const int64_t stack_limit = cfg.memory_size - cfg.stack_words;
  const int64_t access_cost = cfg.hop_cost + cfg.memory_latency;
  int call_id = 1;  // the entry thread; calls take 2, 3, ...
  int current_id = 1;
  size_t max_depth = 0;
  int64_t instructions = 0;

  Metrics& m = result.metrics;
  m.max_live_qts = 1;

  auto read_reg = [&](int r) { return r == 0 ? int64_t(0) : regs[size_t(r)]; };
  auto write_reg = [&](int r, int64_t v) {
    if (r != 0) regs[size_t(r)] = v;
  };
  auto log = [&](LogKind kind, int64_t a, int64_t b, int64_t c,
                 std::string text) {
    result.log.push_back(
        {t, kind, 0, current_id, a, b, c, std::move(text)});
  };

  bool overflow = false;
  auto stack_push = [&](int64_t value) {
    if (sp <= stack_limit) {
      overflow = true;
      return;
    }
    --sp;
    memory[sp] = value;
    t += access_cost;
    ++m.memory_ops;
    ++m.stack_memory_ops;
    log(LogKind::Memory, sp, value, 1, "write");
  };
  auto stack_pop = [&]() -> int64_t {
    int64_t value = memory[sp];
    t += access_cost;
    ++m.memory_ops;
    ++m.stack_memory_ops;
    log(LogKind::Memory, sp, value, 1, "read");
    ++sp;
    return value;
  };

  // Registers the call needs intact afterwards: inputs the callee does not
  // hand back as results.
  auto save_set = [&](const Instruction& ins) {
    std::vector<int> saved;
    for (int r = 1; r < kRegisterCount; ++r)
      if (ins.in_mask.test(r) && !ins.ret_mask.test(r)) saved.push_back(r);
    return saved;
  };

  auto enter_call = [&](const Instruction& ins) {
    t += cfg.cycle_per_instr;
    Frame frame;
    frame.fragment = fragment;
    frame.ret_ip = ip + 1;
    frame.call_id = current_id;
    frame.saved = save_set(ins);
    for (int r : frame.saved) stack_push(read_reg(r));
    stack_push((int64_t(fragment) << 32) | uint32_t(ip + 1));
    if (overflow) return;
    ++m.qt_count;
    current_id = ++call_id;
    write_reg(ins.rd, current_id);
    stack.push_back(std::move(frame));
    max_depth = std::max(max_depth, stack.size());
    m.max_live_qts = int64_t(1 + max_depth);
    m.last_qt_start = t;
    log(LogKind::QtStart, ins.fragment, 0, 0, {});
    fragment = ins.fragment;
    ip = 0;
  };

  auto leave_call = [&]() {
    t += cfg.cycle_per_instr;
    Frame frame = std::move(stack.back());
    stack.pop_back();
    stack_pop();  // return record; control flow uses the shadow frame
    for (auto it = frame.saved.rbegin(); it != frame.saved.rend(); ++it)
      write_reg(*it, stack_pop());
    current_id = frame.call_id;
    fragment = frame.fragment;
    ip = frame.ret_ip;
  };

  bool running = true;
  while (running) {
    if (t > cfg.cycle_cap) {
      result.status = RunStatus::CycleCapExceeded;
      result.problems.push_back("cycle cap of " + std::to_string(cfg.cycle_cap) +
                                " reached");
      break;
    }
    if (overflow) {
      result.status = RunStatus::Deadlock;
      result.problems.push_back("baseline call stack overflowed its " +
                                std::to_string(cfg.stack_words) +
                                "-word region");
      break;
    }
    const std::vector<Instruction>& body =
        program.fragments[size_t(fragment)].body;
    if (ip < 0 || ip >= int(body.size())) {
      result.status = RunStatus::Deadlock;
      result.problems.push_back("control fell off fragment '" +
                                program.fragments[size_t(fragment)].name + "'");
      break;
    }
    const Instruction& ins = body[size_t(ip)];
    ++instructions;

    switch (ins.op) {
      case Opcode::Li:
        write_reg(ins.rd, ins.imm);
        t += cfg.cycle_per_instr;
        ++ip;
        break;
      case Opcode::Mov:
        write_reg(ins.rd, read_reg(ins.rs));
        t += cfg.cycle_per_instr;
        ++ip;
        break;
      case Opcode::Add:
        write_reg(ins.rd, wrap_add(read_reg(ins.rs), read_reg(ins.rt)));
        t += cfg.cycle_per_instr;
        ++ip;
        break;
      case Opcode::Sub:
        write_reg(ins.rd, wrap_sub(read_reg(ins.rs), read_reg(ins.rt)));
        t += cfg.cycle_per_instr;
        ++ip;
        break;
      case Opcode::Mul:
        write_reg(ins.rd, wrap_mul(read_reg(ins.rs), read_reg(ins.rt)));
        t += cfg.cycle_per_instr;
        ++ip;
        break;
      case Opcode::Beq:
        ip = read_reg(ins.rs) == read_reg(ins.rt) ? ins.target : ip + 1;
        t += cfg.cycle_per_instr;
        break;
      case Opcode::Bne:
        ip = read_reg(ins.rs) != read_reg(ins.rt) ? ins.target : ip + 1;
        t += cfg.cycle_per_instr;
        break;
      case Opcode::Jmp:
        ip = ins.target;
        t += cfg.cycle_per_instr;
        break;
      case Opcode::Ld: {
        int64_t address = wrap_add(read_reg(ins.rs), ins.imm);
        int64_t value = 0;
        if (address >= 0 && address < cfg.memory_size) {
          auto it = memory.find(address);
          value = it == memory.end() ? 0 : it->second;
        } else {
          log(LogKind::Diag, 0, 0, 0,
              "memory address " + std::to_string(address) + " out of range");
        }
        write_reg(ins.rd, value);
        t += cfg.cycle_per_instr + access_cost;
        ++m.memory_ops;
        log(LogKind::Memory, address, value, 0, "read");
        ++ip;
        break;
      }
      case Opcode::St: {
        int64_t address = wrap_add(read_reg(ins.rs), ins.imm);
        int64_t value = read_reg(ins.rt);
        if (address >= 0 && address < cfg.memory_size) {
          memory[address] = value;
        } else {
          log(LogKind::Diag, 0, 0, 0,
              "memory address " + std::to_string(address) + " out of range");
        }
        t += cfg.cycle_per_instr + access_cost;
        ++m.memory_ops;
        log(LogKind::Memory, address, value, 0, "write");
        ++ip;
        break;
      }
      case Opcode::Halt:
        t += cfg.cycle_per_instr;
        if (!stack.empty()) {
          log(LogKind::Diag, 0, 0, 0,
              "HALT below the entry frame treated as a return");
          leave_call();
          break;
        }
        running = false;
        break;
      case Opcode::QCreate:
      case Opcode::QCallG:
        enter_call(ins);
        break;
      case Opcode::QWait:
      case Opcode::QClone:
      case Opcode::QGuard:
        ++ip;  // no sequential counterpart; free
        break;
      case Opcode::QEnd:
        if (stack.empty()) {
          t += cfg.cycle_per_instr;
          running = false;
          break;
        }
        leave_call();
        break;
    }
  }

  if (result.status == RunStatus::Completed) {
    // Drop the reserved stack region so final memory is the program's own.
    memory.erase(memory.lower_bound(stack_limit), memory.end());
  }

  m.makespan = t;
  m.energy = t;
  result.final_state.root_regs = regs;
  result.final_state.memory = std::move(memory);
  m.per_core.push_back({0, t, instructions, 1 + m.qt_count});
  return result;
}

}  // namespace empa
