#include "empa/engine.hpp"

#include <algorithm>
#include <random>

#include "engine_impl.hpp"

namespace empa {

int exit_code_of(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return 0;
    case RunStatus::ConfigError: return 1;
    case RunStatus::Deadlock: return 2;
    case RunStatus::CycleCapExceeded: return 3;
  }
  return 1;
}

std::string_view run_status_name(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return "completed";
    case RunStatus::ConfigError: return "config_error";
    case RunStatus::Deadlock: return "deadlock";
    case RunStatus::CycleCapExceeded: return "cycle_cap_exceeded";
  }
  return "?";
}

std::string_view log_kind_name(LogKind kind) {
  switch (kind) {
    case LogKind::Hire: return "hire";
    case LogKind::Release: return "release";
    case LogKind::Dispatch: return "dispatch";
    case LogKind::Submit: return "submit";
    case LogKind::Guard: return "guard";
    case LogKind::Message: return "message";
    case LogKind::Memory: return "memory";
    case LogKind::QtStart: return "qt_start";
    case LogKind::Pool: return "pool";
    case LogKind::Nack: return "nack";
    case LogKind::Diag: return "diag";
  }
  return "?";
}

std::vector<CoreId> random_denied_set(const Grid& grid, double fraction,
                                      uint64_t seed, bool exclude_heads) {
  std::vector<CoreId> candidates;
  for (CoreId id = 0; id < grid.size(); ++id)
    if (!exclude_heads || !is_head_cell(grid.axial_of(id)))
      candidates.push_back(id);
  size_t count = size_t(fraction * double(candidates.size()) + 0.5);
  count = std::min(count, candidates.size());
  // Hand-rolled partial Fisher-Yates: identical picks on every platform.
  std::mt19937_64 rng(seed);
  for (size_t i = 0; i < count; ++i) {
    size_t j = i + size_t(rng() % uint64_t(candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(count);
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

// ---------------------------------------------------------------------------
// setup

Simulation::Impl::Impl(Program p, SimConfig c)
    : program(std::move(p)), cfg(std::move(c)) {
  for (const Diagnostic& d : validate(program)) {
    status = RunStatus::ConfigError;
    problems.push_back(d.to_string());
  }
  if (cfg.grid_width < 1 || cfg.grid_height < 1) {
    fail_config("grid must be at least 1x1");
    return;
  }
  if (cfg.cycle_per_instr < 1 || cfg.hop_cost < 0 || cfg.memory_latency < 0 ||
      cfg.meta_dispatch_cost < 0) {
    fail_config("timing costs must be non-negative");
    return;
  }
  grid = Grid{cfg.grid_width, cfg.grid_height};

  std::vector<bool> denied(size_t(grid.size()), false);
  for (CoreId id : cfg.denied) {
    if (id < 0 || id >= grid.size()) {
      fail_config("denied core " + std::to_string(id) + " outside the grid");
      return;
    }
    denied[size_t(id)] = true;
  }
  for (auto [address, value] : cfg.memory_init) {
    if (address < 0 || address >= cfg.memory_size) {
      fail_config("memory init address " + std::to_string(address) +
                  " out of range");
      return;
    }
    memory[address] = value;
  }
  if (status == RunStatus::ConfigError) return;

  clustering = std::make_unique<Clustering>(grid);
  router = std::make_unique<Router>(*clustering, denied);

  cores.resize(size_t(grid.size()));
  for (CoreId id = 0; id < grid.size(); ++id) {
    cores[size_t(id)].id = id;
    if (denied[size_t(id)]) cores[size_t(id)].state = CoreState::Denied;
  }

  // The root runs on the lowest-id usable head.
  for (const Cluster& cl : clustering->clusters())
    if (cl.head && !denied[size_t(*cl.head)] &&
        (root_core == -1 || *cl.head < root_core))
      root_core = *cl.head;
  if (root_core == -1) {
    fail_config("no usable cluster head to start on");
    return;
  }

  for (CoreId id = 0; id < grid.size(); ++id)
    if (!denied[size_t(id)] && id != root_core) pool.insert(id);

  Core& root = cores[size_t(root_core)];
  root.begin_qt(next_qt++, program.entry, RegMask{}, {}, -1, 0, RegMask{}, 0);
  live = 1;
  m.max_live_qts = 1;
  log_event(0, LogKind::Hire, root_core, root.qt, 0, int64_t(pool.size()), 0);
  log_event(0, LogKind::QtStart, root_core, root.qt, program.entry);
  schedule_step(root, 0);
}

void Simulation::Impl::fail_config(std::string why) {
  status = RunStatus::ConfigError;
  problems.push_back(std::move(why));
}

// ---------------------------------------------------------------------------
// event loop

bool Simulation::Impl::step() {
  if (done || status == RunStatus::ConfigError) {
    done = true;
    return false;
  }
  if (events.empty()) {
    finish_quiescent();
    return false;
  }
  Event e = events.top();
  if (e.t > cfg.cycle_cap) {
    status = RunStatus::CycleCapExceeded;
    problems.push_back("cycle cap of " + std::to_string(cfg.cycle_cap) +
                       " reached at t=" + std::to_string(time_now));
    done = true;
    finalize_metrics();
    return false;
  }
  events.pop();
  time_now = e.t;
  switch (e.kind) {
    case Event::Kind::InstrStep: {
      Core& core = cores[size_t(e.core)];
      if (core.epoch != e.epoch) break;  // a stale step for a past tenant
      exec_instruction(core, e.t);
      break;
    }
    case Event::Kind::Deliver:
      deliver(e.msg, e.hops, e.t);
      break;
    case Event::Kind::FifoDrain:
      if (drain_scheduled_for == e.t) drain_scheduled_for = -1;
      drain_fifo(e.t);
      break;
    case Event::Kind::Finalize: {
      Core& core = cores[size_t(e.core)];
      if (core.epoch != e.epoch) break;
      if (core.halt_requested) try_finish_root(core, e.t);
      else try_finish_qt(core, e.t);
      break;
    }
  }
  return !done;
}

void Simulation::Impl::finish_quiescent() {
  done = true;
  if (live > 0) {
    status = RunStatus::Deadlock;
    problems.push_back("no events pending but " + std::to_string(live) +
                       " quasi-thread(s) remain");
    for (const Core& core : cores) {
      switch (core.state) {
        case CoreState::InPool:
        case CoreState::Denied:
        case CoreState::Halted:
          break;
        default:
          problems.push_back(
              "core " + std::to_string(core.id) + " qt " +
              std::to_string(core.qt) + " stuck in " +
              std::string(core_state_name(core.state)) + " at ip " +
              std::to_string(core.ip));
      }
    }
  } else {
    status = RunStatus::Completed;
  }
  finalize_metrics();
}

void Simulation::Impl::finalize_metrics() {
  if (metrics_final) return;
  metrics_final = true;
  if (!root_captured && root_core >= 0) {
    root_final_regs = cores[size_t(root_core)].regs;
    root_captured = true;
  }
  m.makespan = time_now;
  m.energy = 0;
  for (Core& core : cores) {
    if (core_state_active(core.state)) {
      core.energy += time_now - core.busy_since;
      core.busy_since = time_now;
    }
    m.energy += core.energy;
    if (core.qts_hosted > 0 || core.energy > 0)
      m.per_core.push_back(
          {core.id, core.energy, core.instructions, core.qts_hosted});
  }
}

void Simulation::Impl::deliver(const Message& msg, int hops, int64_t t) {
  if (msg.dst == kMemoryEndpoint) {
    serve_memory(msg, hops, t);
    return;
  }
  Core& c = cores[size_t(msg.dst)];
  if (c.state == CoreState::Denied) {
    log_event(t, LogKind::Nack, msg.src, msg.qt, msg.dst);
    return;
  }
  switch (msg.kind) {
    case MessageKind::QtCreateRequest:
      activate_child(c, msg, t);
      break;
    case MessageKind::QtResult:
      handle_qt_result(c, msg, t);
      break;
    case MessageKind::RegisterTransfer:
      if (msg.fragment >= 0) {
        // Guarded-call admission: load the call's registers and run.
        GuardRecord* guard = c.serving_guard >= 0 ? guards.by_id(c.serving_guard)
                                                  : nullptr;
        if (!c.is_guard || !guard) {
          diag(t, msg.dst, c.qt, "stray admission message discarded");
          break;
        }
        c.regs.fill(0);
        for (int r = 1; r < kRegisterCount; ++r)
          if (msg.mask.test(r)) c.regs[size_t(r)] = msg.values[size_t(r)];
        c.fragment = msg.fragment;
        c.ip = 0;
        c.set_state(CoreState::Running, t);
        log_event(t, LogKind::Guard, c.id, c.qt, guard->id, guard->fragment,
                  msg.qt, "enter");
        schedule_step(c, t);
      } else {
        // A guarded call returning to its requester.
        if (c.state != CoreState::WaitingLatch || !c.waiting_on_guard) {
          diag(t, msg.dst, c.qt, "unexpected guarded-call return discarded");
          break;
        }
        for (int r = 1; r < kRegisterCount; ++r)
          if (msg.mask.test(r)) c.regs[size_t(r)] = msg.values[size_t(r)];
        c.waiting_on_guard = false;
        resume(c, t);
      }
      break;
    case MessageKind::MemoryReadReply:
      if (c.state != CoreState::WaitingMemory) {
        diag(t, msg.dst, c.qt, "memory reply with no read outstanding");
        break;
      }
      c.write_reg(c.memory_dest, msg.value);
      resume(c, t);
      break;
    case MessageKind::MemoryWriteAck:
      if (c.state != CoreState::WaitingMemory) {
        diag(t, msg.dst, c.qt, "memory ack with no write outstanding");
        break;
      }
      resume(c, t);
      break;
    case MessageKind::MemoryRead:
    case MessageKind::MemoryWrite:
      diag(t, msg.dst, c.qt, "memory request addressed to a core");
      break;
  }
}

void Simulation::Impl::serve_memory(const Message& msg, int hops, int64_t t) {
  ++m.memory_ops;
  bool in_range = msg.address >= 0 && msg.address < cfg.memory_size;
  if (!in_range)
    diag(t, msg.src, msg.qt,
         "memory address " + std::to_string(msg.address) + " out of range");

  Message reply;
  reply.src = kMemoryEndpoint;
  reply.dst = msg.src;
  reply.qt = msg.qt;
  reply.address = msg.address;
  if (msg.kind == MessageKind::MemoryRead) {
    reply.kind = MessageKind::MemoryReadReply;
    if (in_range) {
      auto it = memory.find(msg.address);
      reply.value = it == memory.end() ? 0 : it->second;
    }
    log_event(t, LogKind::Memory, msg.src, msg.qt, msg.address, reply.value, 0,
              "read");
  } else {
    reply.kind = MessageKind::MemoryWriteAck;
    if (in_range) memory[msg.address] = msg.value;
    log_event(t, LogKind::Memory, msg.src, msg.qt, msg.address, msg.value, 0,
              "write");
  }
  // The head-to-controller hop hides inside the access latency; the rest
  // of the return path is paid per hop.
  int64_t arrival = t + cfg.memory_latency + int64_t(hops - 1) * cfg.hop_cost;
  ++m.messages;
  m.hops += hops;
  log_event(t, LogKind::Message, kMemoryEndpoint, msg.qt, msg.dst, hops, 0,
            std::string(message_kind_name(reply.kind)));
  Event e;
  e.t = arrival;
  e.kind = Event::Kind::Deliver;
  e.hops = hops;
  e.msg = reply;
  push_event(std::move(e));
}

// ---------------------------------------------------------------------------
// helpers

void Simulation::Impl::push_event(Event e) {
  e.seq = event_seq++;
  events.push(std::move(e));
}

void Simulation::Impl::schedule_step(const Core& core, int64_t t) {
  Event e;
  e.t = t;
  e.kind = Event::Kind::InstrStep;
  e.core = core.id;
  e.epoch = core.epoch;
  push_event(std::move(e));
}

void Simulation::Impl::schedule_finalize(const Core& core, int64_t t) {
  Event e;
  e.t = t;
  e.kind = Event::Kind::Finalize;
  e.core = core.id;
  e.epoch = core.epoch;
  push_event(std::move(e));
}

bool Simulation::Impl::send(Message msg, int64_t t, int64_t extra_delay) {
  std::optional<Route> route;
  if (msg.dst == kMemoryEndpoint) {
    route = router->memory_route(msg.src);
  } else {
    route = router->route(msg.src, msg.dst);
  }
  if (!route) {
    diag(t, msg.src, msg.qt,
         "no route from core " + std::to_string(msg.src) + " to " +
             (msg.dst == kMemoryEndpoint ? std::string("memory")
                                         : std::to_string(msg.dst)));
    return false;
  }
  int hops = route->hops();
  ++m.messages;
  m.hops += hops;
  log_event(t, LogKind::Message, msg.src, msg.qt, msg.dst, hops, 0,
            std::string(message_kind_name(msg.kind)));
  Event e;
  e.t = t + int64_t(hops) * cfg.hop_cost + extra_delay;
  e.kind = Event::Kind::Deliver;
  e.hops = hops;
  e.msg = std::move(msg);
  push_event(std::move(e));
  return true;
}

void Simulation::Impl::log_event(int64_t t, LogKind kind, int core, int qt,
                                 int64_t a, int64_t b, int64_t c,
                                 std::string text) {
  LogEvent e;
  e.t = t;
  e.kind = kind;
  e.core = core;
  e.qt = qt;
  e.a = a;
  e.b = b;
  e.c = c;
  e.text = std::move(text);
  log.push_back(std::move(e));
}

void Simulation::Impl::diag(int64_t t, int core, int qt, std::string text) {
  log_event(t, LogKind::Diag, core, qt, 0, 0, 0, std::move(text));
}

// ---------------------------------------------------------------------------
// public surface

Simulation::Simulation(Program program, SimConfig config)
    : impl_(std::make_unique<Impl>(std::move(program), std::move(config))) {}
Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

bool Simulation::step() { return impl_->step(); }
bool Simulation::finished() const { return impl_->done; }
RunStatus Simulation::status() const { return impl_->status; }
int64_t Simulation::now() const { return impl_->time_now; }

std::optional<int64_t> Simulation::next_time() const {
  if (impl_->events.empty()) return std::nullopt;
  return impl_->events.top().t;
}

const Core& Simulation::core_at(CoreId id) const {
  return impl_->cores[size_t(id)];
}

const std::vector<Core>& Simulation::cores() const { return impl_->cores; }
int64_t Simulation::live_qts() const { return impl_->live; }

void Simulation::inject_message(Message message) {
  Impl& im = *impl_;
  if (message.dst != kMemoryEndpoint &&
      (message.dst < 0 || message.dst >= im.grid.size() ||
       im.cores[size_t(message.dst)].state == CoreState::Denied)) {
    im.log_event(im.time_now, LogKind::Nack, message.src, message.qt,
                 message.dst);
    return;
  }
  if (!im.send(std::move(message), im.time_now))
    im.log_event(im.time_now, LogKind::Nack, message.src, message.qt,
                 message.dst);
}

RunResult Simulation::take_result() {
  Impl& im = *impl_;
  im.finalize_metrics();
  RunResult result;
  result.status = im.status;
  result.metrics = std::move(im.m);
  result.final_state.root_regs = im.root_final_regs;
  result.final_state.memory = std::move(im.memory);
  result.log = std::move(im.log);
  result.problems = std::move(im.problems);
  return result;
}

RunResult run(const Program& program, const SimConfig& config) {
  Simulation sim(program, config);
  while (sim.step()) {
  }
  return sim.take_result();
}

}  // namespace empa
