#include "engine_impl.hpp"

namespace empa {

namespace {

// Arithmetic wraps on the 64-bit two's-complement word.
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

void Simulation::Impl::exec_instruction(Core& core, int64_t t) {
  const Fragment& frag = program.fragments[size_t(core.fragment)];
  const Instruction& ins = frag.body[size_t(core.ip)];
  ++core.instructions;
  int64_t next_t = t + cfg.cycle_per_instr;

  if (is_meta(ins.op)) {
    // Result cloning with nothing to clone costs one plain cycle and skips
    // the management path entirely.
    if (ins.op == Opcode::QClone && ins.ret_mask.empty()) {
      ++core.ip;
      schedule_step(core, next_t);
      return;
    }
    submit_meta(core, ins, t);
    return;
  }

  switch (ins.op) {
    case Opcode::Li:
      core.write_reg(ins.rd, ins.imm);
      ++core.ip;
      break;
    case Opcode::Mov:
      core.write_reg(ins.rd, core.read_reg(ins.rs));
      ++core.ip;
      break;
    case Opcode::Add:
      core.write_reg(ins.rd, wrap_add(core.read_reg(ins.rs), core.read_reg(ins.rt)));
      ++core.ip;
      break;
    case Opcode::Sub:
      core.write_reg(ins.rd, wrap_sub(core.read_reg(ins.rs), core.read_reg(ins.rt)));
      ++core.ip;
      break;
    case Opcode::Mul:
      core.write_reg(ins.rd, wrap_mul(core.read_reg(ins.rs), core.read_reg(ins.rt)));
      ++core.ip;
      break;
    case Opcode::Beq:
      core.ip = core.read_reg(ins.rs) == core.read_reg(ins.rt) ? ins.target
                                                               : core.ip + 1;
      break;
    case Opcode::Bne:
      core.ip = core.read_reg(ins.rs) != core.read_reg(ins.rt) ? ins.target
                                                               : core.ip + 1;
      break;
    case Opcode::Jmp:
      core.ip = ins.target;
      break;
    case Opcode::Ld:
    case Opcode::St: {
      Message req;
      req.kind = ins.op == Opcode::Ld ? MessageKind::MemoryRead
                                      : MessageKind::MemoryWrite;
      req.src = core.id;
      req.dst = kMemoryEndpoint;
      req.qt = core.qt;
      req.address = wrap_add(core.read_reg(ins.rs), ins.imm);
      if (ins.op == Opcode::St) req.value = core.read_reg(ins.rt);
      core.memory_dest = ins.op == Opcode::Ld ? ins.rd : 0;
      ++core.ip;
      send(std::move(req), t);
      // Busy for the issue cycle, then parked until the reply lands. An
      // unroutable request (send already reported it) leaves the core
      // parked; the quiescence check will call that out as a deadlock.
      core.set_state(CoreState::WaitingMemory, next_t);
      return;
    }
    case Opcode::Halt:
      if (core.id != root_core || core.qt != 1) {
        diag(t, core.id, core.qt, "HALT outside the entry thread treated as QEND");
        Instruction qend;
        qend.op = Opcode::QEnd;
        qend.line = ins.line;
        submit_meta(core, qend, t);
        return;
      }
      core.halt_requested = true;
      schedule_finalize(core, next_t);
      return;
    default:
      break;
  }
  schedule_step(core, next_t);
}

void Simulation::Impl::submit_meta(Core& core, const Instruction& ins,
                                   int64_t t) {
  MetaEntry entry;
  entry.cls = meta_class_of(ins.op);
  entry.seq = submit_seq++;
  entry.core = core.id;
  entry.qt = core.qt;
  entry.submit_t = t;
  entry.ins = ins;
  entry.snapshot = core.regs;
  log_event(t, LogKind::Submit, core.id, core.qt, int64_t(entry.cls),
            int64_t(entry.seq), 0, std::string(mnemonic(ins.op)));
  fifo.push(std::move(entry));
  core.set_state(CoreState::Morphing, t);
  if (drain_scheduled_for != t) {
    drain_scheduled_for = t;
    Event e;
    e.t = t;
    e.band = 1;
    e.kind = Event::Kind::FifoDrain;
    push_event(std::move(e));
  }
}

void Simulation::Impl::drain_fifo(int64_t t) {
  while (!fifo.empty()) {
    MetaEntry entry = fifo.pop();
    log_event(t, LogKind::Dispatch, entry.core, entry.qt, int64_t(entry.cls),
              int64_t(entry.seq), entry.submit_t,
              std::string(mnemonic(entry.ins.op)));
    dispatch_meta(entry, t);
  }
}

// Advances past the meta-instruction; the core resumes once the dispatch
// cost has elapsed.
void Simulation::Impl::complete_meta(Core& core, int64_t t) {
  ++core.ip;
  core.set_state(CoreState::Running, t + cfg.meta_dispatch_cost);
  schedule_step(core, t + cfg.meta_dispatch_cost);
}

void Simulation::Impl::dispatch_meta(const MetaEntry& entry, int64_t t) {
  Core& core = cores[size_t(entry.core)];
  if (core.qt != entry.qt) return;  // the thread is already gone
  int64_t done_t = t + cfg.meta_dispatch_cost;

  switch (entry.ins.op) {
    case Opcode::QCreate:
      accept_spawn(entry, false, t);
      break;

    case Opcode::QGuard: {
      bool parked = false;
      for (const PendingHire& ph : pending_hires)
        if (ph.guard && ph.ins.fragment == entry.ins.fragment) parked = true;
      if (parked || guards.by_fragment(entry.ins.fragment)) {
        diag(t, core.id, core.qt,
             "fragment '" +
                 program.fragments[size_t(entry.ins.fragment)].name +
                 "' is already guarded");
        complete_meta(core, t);
        break;
      }
      accept_spawn(entry, true, t);
      break;
    }

    case Opcode::QWait: {
      int handle = int(entry.snapshot[size_t(entry.ins.rs)]);
      if (core.arrived_children.count(handle)) {
        complete_meta(core, t);
      } else if (core.children.count(handle)) {
        ++core.ip;  // will resume right after the result lands
        core.wait_handle = handle;
        core.waiting_on_guard = false;
        core.set_state(CoreState::WaitingLatch, done_t);
      } else {
        diag(t, core.id, core.qt,
             "wait on " + std::to_string(handle) +
                 " which is not a child of this thread");
        complete_meta(core, t);
      }
      break;
    }

    case Opcode::QClone:
      core.clone_from_latch(entry.ins.ret_mask);
      complete_meta(core, t);
      break;

    case Opcode::QEnd:
      if (core.is_guard) {
        guard_run_finished(core, t);
        break;
      }
      ++core.ip;
      core.end_requested = true;
      // Children or guarded calls still out keep the core spinning (and
      // burning energy); the last arrival re-runs the finish check.
      core.set_state(CoreState::Running, t);
      if (core.pending_child_results == 0 && guards_drained(core))
        schedule_finalize(core, done_t);
      break;

    case Opcode::QCallG: {
      GuardRecord* guard = guards.by_fragment(entry.ins.fragment);
      if (!guard) {
        diag(t, core.id, core.qt,
             "guarded call to unguarded fragment '" +
                 program.fragments[size_t(entry.ins.fragment)].name + "'");
        complete_meta(core, t);
        break;
      }
      GuardCall call;
      call.requester_core = core.id;
      call.requester_qt = core.qt;
      call.in_mask = entry.ins.in_mask;
      call.ret_mask = entry.ins.ret_mask;
      call.values = entry.snapshot;
      ++core.ip;  // resumes at the next instruction when the result lands
      core.waiting_on_guard = true;
      core.set_state(CoreState::WaitingLatch, done_t);
      if (guard->drained())
        admit_guard_call(*guard, call, t);
      else
        guard->queue.push_back(std::move(call));
      break;
    }

    default:
      diag(t, core.id, core.qt, "unexpected management instruction");
      complete_meta(core, t);
      break;
  }
}

// QCREATE and QGUARD share the hire path; the pool decides whether the
// request is served now or parked.
void Simulation::Impl::accept_spawn(const MetaEntry& entry, bool guard,
                                    int64_t t) {
  Core& parent = cores[size_t(entry.core)];
  int child_qt = next_qt++;
  ++m.qt_count;
  if (!guard) {
    ++parent.pending_child_results;
    parent.children.insert(child_qt);
  }

  if (pool.empty()) {
    ++m.pool_exhaustion;
    log_event(t, LogKind::Pool, parent.id, parent.qt, child_qt, 0, 0,
              "exhausted");
    PendingHire ph;
    ph.guard = guard;
    ph.parent_core = parent.id;
    ph.parent_qt = parent.qt;
    ph.child_qt = child_qt;
    ph.ins = entry.ins;
    ph.snapshot = entry.snapshot;
    pending_hires.push_back(std::move(ph));
    // The handle is already determined; the parent still blocks so the
    // spawn it asked for exists before it can act on it.
    if (!guard) parent.write_reg(entry.ins.rd, child_qt);
    parent.set_state(CoreState::WaitingHire, t + cfg.meta_dispatch_cost);
    return;
  }

  auto chosen = pool.take_nearest(grid.axial_of(parent.id), grid);
  Core& child = cores[size_t(*chosen)];
  ++live;
  m.max_live_qts = std::max(m.max_live_qts, live);
  log_event(t, LogKind::Hire, child.id, child_qt, parent.qt,
            int64_t(pool.size()), guard ? 2 : 0);

  if (guard) {
    auto gid = guards.add(entry.ins.fragment, parent.id, parent.qt, child.id,
                          child_qt);
    child.begin_qt(child_qt, entry.ins.fragment, RegMask{}, {}, parent.id,
                   parent.qt, RegMask{}, t);
    child.is_guard = true;
    child.serving_guard = *gid;
    child.set_state(CoreState::GuardIdle, t);
    parent.owned_guards.push_back(*gid);
    log_event(t, LogKind::Guard, child.id, child_qt, *gid, entry.ins.fragment,
              parent.qt, "register");
    log_event(t, LogKind::QtStart, child.id, child_qt, entry.ins.fragment);
    m.last_qt_start = std::max(m.last_qt_start, t);
    complete_meta(parent, t);
    return;
  }

  child.set_state(CoreState::Hiring, t);
  Message activate;
  activate.kind = MessageKind::QtCreateRequest;
  activate.src = parent.id;
  activate.dst = child.id;
  activate.qt = parent.qt;
  activate.child_qt = child_qt;
  activate.fragment = entry.ins.fragment;
  activate.mask = entry.ins.in_mask;
  activate.ret_mask = entry.ins.ret_mask;
  activate.values = entry.snapshot;
  send(std::move(activate), t);
  parent.write_reg(entry.ins.rd, child_qt);
  complete_meta(parent, t);
}

void Simulation::Impl::activate_child(Core& child, const Message& msg,
                                      int64_t t) {
  if (child.state != CoreState::Hiring) {
    diag(t, child.id, child.qt, "activation for a core that is not hiring");
    return;
  }
  child.begin_qt(msg.child_qt, msg.fragment, msg.mask, msg.values, msg.src,
                 msg.qt, msg.ret_mask, t);
  log_event(t, LogKind::QtStart, child.id, child.qt, msg.fragment);
  m.last_qt_start = std::max(m.last_qt_start, t);
  schedule_step(child, t);
}

void Simulation::Impl::admit_guard_call(GuardRecord& guard,
                                        const GuardCall& call, int64_t t,
                                        int64_t extra_delay) {
  guard.busy = true;
  guard.active = call;
  Message admit;
  admit.kind = MessageKind::RegisterTransfer;
  admit.src = call.requester_core;
  admit.dst = guard.core;
  admit.qt = call.requester_qt;
  admit.fragment = guard.fragment;
  admit.mask = call.in_mask;
  admit.values = call.values;
  send(std::move(admit), t, extra_delay);
}

// A guard core finished one run of its fragment: return the results to the
// requester, then take the next queued call if any. The dispatch cost of
// the finishing QEND rides on the outgoing messages as extra flight time,
// which keeps the log's timestamps monotonic.
void Simulation::Impl::guard_run_finished(Core& guard_core, int64_t t) {
  GuardRecord* guard = guards.by_id(guard_core.serving_guard);
  int64_t done_t = t + cfg.meta_dispatch_cost;
  if (!guard || !guard->busy) {
    diag(t, guard_core.id, guard_core.qt, "guard finished with no active call");
    return;
  }
  Message ret;
  ret.kind = MessageKind::RegisterTransfer;
  ret.src = guard_core.id;
  ret.dst = guard->active.requester_core;
  ret.qt = guard_core.qt;
  ret.fragment = -1;
  ret.mask = guard->active.ret_mask;
  ret.values = guard_core.regs;
  log_event(t, LogKind::Guard, guard_core.id, guard_core.qt, guard->id,
            guard->fragment, guard->active.requester_qt, "exit");
  send(std::move(ret), t, cfg.meta_dispatch_cost);

  guard_core.set_state(CoreState::GuardIdle, done_t);
  if (!guard->queue.empty()) {
    GuardCall next = std::move(guard->queue.front());
    guard->queue.pop_front();
    admit_guard_call(*guard, next, t, cfg.meta_dispatch_cost);
  } else {
    guard->busy = false;
    // The owner may be spinning on this guard to wind down; re-run its
    // finish check once the dispatch window has passed.
    Core& owner = cores[size_t(guard->owner_core)];
    if (owner.qt == guard->owner_qt &&
        (owner.halt_requested || owner.end_requested))
      schedule_finalize(owner, done_t);
  }
}

bool Simulation::Impl::guards_drained(const Core& core) {
  for (int gid : core.owned_guards) {
    GuardRecord* guard = guards.by_id(gid);
    if (guard && !guard->drained()) return false;
  }
  return true;
}

void Simulation::Impl::teardown_guards(Core& core, int64_t t) {
  for (int gid : core.owned_guards) {
    GuardRecord* guard = guards.by_id(gid);
    if (!guard) continue;
    Core& gcore = cores[size_t(guard->core)];
    log_event(t, LogKind::Guard, gcore.id, gcore.qt, guard->id,
              guard->fragment, core.qt, "teardown");
    guards.remove(gid);
    release_core(gcore, t);
  }
  core.owned_guards.clear();
}

void Simulation::Impl::try_finish_qt(Core& core, int64_t t) {
  if (!core.end_requested) return;
  if (core.pending_child_results > 0) return;
  if (!guards_drained(core)) return;
  teardown_guards(core, t);
  core.end_requested = false;

  if (core.parent_core >= 0) {
    Message result;
    result.kind = MessageKind::QtResult;
    result.src = core.id;
    result.dst = core.parent_core;
    result.qt = core.parent_qt;
    result.child_qt = core.qt;
    result.mask = core.ret_mask;
    result.values = core.regs;
    send(std::move(result), t, cfg.result_delay);
    release_core(core, t);
  } else {
    // The entry thread ended with QEND instead of HALT.
    root_final_regs = core.regs;
    root_captured = true;
    --live;
    log_event(t, LogKind::Release, core.id, core.qt, int64_t(pool.size()), 0);
    core.set_state(CoreState::Halted, t);
  }
}

void Simulation::Impl::try_finish_root(Core& core, int64_t t) {
  if (!core.halt_requested) return;
  if (core.pending_child_results > 0) return;
  if (!guards_drained(core)) return;
  teardown_guards(core, t);
  core.halt_requested = false;
  root_final_regs = core.regs;
  root_captured = true;
  --live;
  log_event(t, LogKind::Release, core.id, core.qt, int64_t(pool.size()), 0);
  core.set_state(CoreState::Halted, t);
}

// Returns a finished core to the pool, or hands it straight to the oldest
// parked spawn so the pool never grows while requests starve.
void Simulation::Impl::release_core(Core& core, int64_t t) {
  --live;
  int ended_qt = core.qt;
  core.qt = 0;
  ++core.epoch;
  if (!pending_hires.empty()) {
    log_event(t, LogKind::Release, core.id, ended_qt, int64_t(pool.size()), 0);
    core.set_state(CoreState::InPool, t);
    serve_pending_hire(core, t);
    return;
  }
  pool.insert(core.id);
  log_event(t, LogKind::Release, core.id, ended_qt, int64_t(pool.size()), 1);
  core.set_state(CoreState::InPool, t);
}

void Simulation::Impl::serve_pending_hire(Core& idle, int64_t t) {
  PendingHire ph = std::move(pending_hires.front());
  pending_hires.pop_front();
  Core& parent = cores[size_t(ph.parent_core)];

  ++live;
  m.max_live_qts = std::max(m.max_live_qts, live);
  log_event(t, LogKind::Hire, idle.id, ph.child_qt, ph.parent_qt,
            int64_t(pool.size()), (ph.guard ? 2 : 0) | 1);

  bool parent_alive = parent.qt == ph.parent_qt;
  if (ph.guard) {
    auto gid = guards.add(ph.ins.fragment, ph.parent_core, ph.parent_qt,
                          idle.id, ph.child_qt);
    idle.begin_qt(ph.child_qt, ph.ins.fragment, RegMask{}, {}, ph.parent_core,
                  ph.parent_qt, RegMask{}, t);
    idle.is_guard = true;
    if (gid) {
      idle.serving_guard = *gid;
      if (parent_alive) parent.owned_guards.push_back(*gid);
      log_event(t, LogKind::Guard, idle.id, ph.child_qt, *gid,
                ph.ins.fragment, ph.parent_qt, "register");
    } else {
      diag(t, parent.id, ph.parent_qt, "fragment guarded twice; extra ignored");
    }
    idle.set_state(CoreState::GuardIdle, t);
    log_event(t, LogKind::QtStart, idle.id, ph.child_qt, ph.ins.fragment);
    m.last_qt_start = std::max(m.last_qt_start, t);
  } else {
    idle.set_state(CoreState::Hiring, t);
    Message activate;
    activate.kind = MessageKind::QtCreateRequest;
    activate.src = ph.parent_core;
    activate.dst = idle.id;
    activate.qt = ph.parent_qt;
    activate.child_qt = ph.child_qt;
    activate.fragment = ph.ins.fragment;
    activate.mask = ph.ins.in_mask;
    activate.ret_mask = ph.ins.ret_mask;
    activate.values = ph.snapshot;
    send(std::move(activate), t);
  }

  // Wake the parent that was parked on the empty pool.
  if (parent_alive && parent.state == CoreState::WaitingHire) {
    ++parent.ip;
    resume(parent, t);
  }
}

void Simulation::Impl::handle_qt_result(Core& parent, const Message& msg,
                                        int64_t t) {
  if (parent.qt != msg.qt) {
    diag(t, parent.id, parent.qt, "result for a thread no longer here");
    return;
  }
  for (int r : parent.store_result(msg.child_qt, msg.mask, msg.values))
    diag(t, parent.id, parent.qt,
         "result register r" + std::to_string(r) + " from thread " +
             std::to_string(msg.child_qt) + " overwrote an unconsumed value");
  if (parent.pending_child_results > 0) --parent.pending_child_results;

  if (parent.state == CoreState::WaitingLatch && !parent.waiting_on_guard &&
      parent.wait_handle == msg.child_qt) {
    parent.wait_handle = 0;
    resume(parent, t);
    return;
  }
  if (parent.halt_requested) try_finish_root(parent, t);
  else if (parent.end_requested) try_finish_qt(parent, t);
}

void Simulation::Impl::resume(Core& core, int64_t t) {
  core.set_state(CoreState::Running, t);
  schedule_step(core, t);
}

}  // namespace empa
