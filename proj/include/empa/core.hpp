// Per-core state: the register file, the result latch, hire bookkeeping,
// and cycle-accurate busy-time (energy) accounting.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "empa/isa.hpp"
#include "empa/topology.hpp"

namespace empa {

enum class CoreState : uint8_t {
  InPool,         // free, hireable
  Hiring,         // reserved; activation message still in flight
  Running,        // executing conventional instructions
  Morphing,       // a meta-instruction is being processed
  WaitingHire,    // blocked: spawn accepted but the pool is empty
  WaitingLatch,   // blocked: waiting for a result to land
  WaitingMemory,  // blocked: memory request in flight
  GuardIdle,      // hired as a guard, no call in progress
  Halted,         // entry quasi-thread finished
  Denied,         // faulty/forbidden, never participates
};

std::string_view core_state_name(CoreState s);

// Busy states are the ones that burn energy.
inline bool core_state_active(CoreState s) {
  return s == CoreState::Running || s == CoreState::Morphing;
}

// One returned result parked in the latch, tagged by the child that sent it.
struct LatchSlot {
  int64_t value = 0;
  int writer = -1;  // child quasi-thread id, -1 = never written
};

struct Core {
  CoreId id = 0;
  CoreState state = CoreState::InPool;

  // --- quasi-thread context (valid while hired) ---
  int qt = 0;  // 0 = none
  int fragment = -1;
  int ip = 0;
  std::array<int64_t, kRegisterCount> regs{};

  std::array<LatchSlot, kRegisterCount> latch{};
  std::set<int> children;           // every quasi-thread this one spawned
  std::set<int> arrived_children;   // children whose results have landed
  int pending_child_results = 0;    // children hired but not yet reported
  std::vector<int> owned_guards;    // guards this quasi-thread registered

  int parent_core = -1;  // destination of the final result; -1 = root
  int parent_qt = 0;
  RegMask ret_mask;      // registers sent back when this thread ends

  bool is_guard = false;
  int serving_guard = -1;          // guard record id when is_guard

  // --- blocking details ---
  int wait_handle = 0;             // WaitingLatch: child id being awaited
  bool waiting_on_guard = false;   // WaitingLatch: a guarded call instead
  uint8_t memory_dest = 0;         // WaitingMemory: register for the reply
  bool end_requested = false;      // QEND seen; children/guards still open
  bool halt_requested = false;     // HALT seen; children/guards still open

  uint64_t epoch = 0;  // bumps on every hire; stale events check it

  // --- accounting ---
  int64_t energy = 0;
  int64_t busy_since = 0;
  int64_t instructions = 0;
  int64_t qts_hosted = 0;

  int64_t read_reg(int r) const { return r == 0 ? 0 : regs[size_t(r)]; }
  void write_reg(int r, int64_t v) {
    if (r != 0) regs[size_t(r)] = v;
  }

  // Closes/opens the busy interval as the state changes.
  void set_state(CoreState next, int64_t t);

  // Fresh context for a newly hired quasi-thread. Masked registers take the
  // sender's values; everything else starts at zero.
  void begin_qt(int qt_id, int frag, RegMask in_mask,
                const std::array<int64_t, kRegisterCount>& values,
                int from_core, int from_qt, RegMask result_mask, int64_t t);

  // Records an arriving child result. Returns the registers that already
  // held a different child's value (last writer wins); callers surface
  // those as overlap warnings.
  std::vector<int> store_result(int child_qt, RegMask mask,
                                const std::array<int64_t, kRegisterCount>& values);

  // QCLONE: copy the masked latch slots into the registers.
  void clone_from_latch(RegMask mask);

  bool can_finish() const {
    return pending_child_results == 0 && owned_guards.empty();
  }
};

}  // namespace empa
