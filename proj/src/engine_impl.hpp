// Internal state of Simulation, shared by the event loop (engine.cpp) and
// the instruction/meta execution paths (engine_exec.cpp).
#pragma once

#include <deque>
#include <queue>

#include "empa/engine.hpp"

namespace empa {

struct Event {
  enum class Kind : uint8_t { InstrStep, Deliver, FifoDrain, Finalize };

  int64_t t = 0;
  int band = 0;  // band 1 = FIFO drain, after every plain event at t
  uint64_t seq = 0;
  Kind kind = Kind::InstrStep;
  int core = 0;
  uint64_t epoch = 0;
  int hops = 0;  // Deliver: length of the route the message took
  Message msg;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    if (a.band != b.band) return a.band > b.band;
    return a.seq > b.seq;
  }
};

struct Simulation::Impl {
  Program program;
  SimConfig cfg;
  Grid grid;
  std::unique_ptr<Clustering> clustering;
  std::unique_ptr<Router> router;

  std::vector<Core> cores;
  CorePool pool;
  MetaFifo fifo;
  std::deque<PendingHire> pending_hires;
  GuardTable guards;
  std::map<int64_t, int64_t> memory;

  std::priority_queue<Event, std::vector<Event>, EventAfter> events;
  uint64_t event_seq = 0;
  uint64_t submit_seq = 0;
  int64_t time_now = 0;
  int64_t drain_scheduled_for = -1;

  RunStatus status = RunStatus::Completed;
  bool done = false;
  bool metrics_final = false;

  int root_core = -1;
  int next_qt = 1;
  int64_t live = 0;
  // Captured when the root finishes; its core may be re-hired afterwards.
  std::array<int64_t, kRegisterCount> root_final_regs{};
  bool root_captured = false;

  Metrics m;
  std::vector<LogEvent> log;
  std::vector<std::string> problems;

  // --- setup (engine.cpp) ---
  Impl(Program p, SimConfig c);
  void fail_config(std::string why);

  // --- event loop (engine.cpp) ---
  bool step();
  void finish_quiescent();
  void finalize_metrics();
  void deliver(const Message& msg, int hops, int64_t t);
  void serve_memory(const Message& msg, int hops, int64_t t);

  // --- helpers (engine.cpp) ---
  void push_event(Event e);
  void schedule_step(const Core& core, int64_t t);
  void schedule_finalize(const Core& core, int64_t t);
  // Routes and schedules; logs the send. Returns false when unroutable.
  bool send(Message msg, int64_t t, int64_t extra_delay = 0);
  void log_event(int64_t t, LogKind kind, int core, int qt, int64_t a = 0,
                 int64_t b = 0, int64_t c = 0, std::string text = {});
  void diag(int64_t t, int core, int qt, std::string text);

  // --- execution (engine_exec.cpp) ---
  void exec_instruction(Core& core, int64_t t);
  void submit_meta(Core& core, const Instruction& ins, int64_t t);
  void drain_fifo(int64_t t);
  void dispatch_meta(const MetaEntry& entry, int64_t t);
  void complete_meta(Core& core, int64_t t);  // advance ip, resume at t+cost
  void accept_spawn(const MetaEntry& entry, bool guard, int64_t t);
  void activate_child(Core& child, const Message& msg, int64_t t);
  void admit_guard_call(GuardRecord& guard, const GuardCall& call, int64_t t,
                        int64_t extra_delay = 0);
  void guard_run_finished(Core& guard_core, int64_t t);
  void try_finish_qt(Core& core, int64_t t);
  void try_finish_root(Core& core, int64_t t);
  bool guards_drained(const Core& core);
  void teardown_guards(Core& core, int64_t t);
  void release_core(Core& core, int64_t t);
  void serve_pending_hire(Core& idle, int64_t t);
  void handle_qt_result(Core& parent, const Message& msg, int64_t t);
  void resume(Core& core, int64_t t);
};

}  // namespace empa
