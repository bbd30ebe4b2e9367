#include "empa/core.hpp"

namespace empa {

std::string_view core_state_name(CoreState s) {
  switch (s) {
    case CoreState::InPool: return "in_pool";
    case CoreState::Hiring: return "hiring";
    case CoreState::Running: return "running";
    case CoreState::Morphing: return "morphing";
    case CoreState::WaitingHire: return "waiting_hire";
    case CoreState::WaitingLatch: return "waiting_latch";
    case CoreState::WaitingMemory: return "waiting_memory";
    case CoreState::GuardIdle: return "guard_idle";
    case CoreState::Halted: return "halted";
    case CoreState::Denied: return "denied";
  }
  return "?";
}

void Core::set_state(CoreState next, int64_t t) {
  if (core_state_active(state) && !core_state_active(next))
    energy += t - busy_since;
  else if (!core_state_active(state) && core_state_active(next))
    busy_since = t;
  state = next;
}

void Core::begin_qt(int qt_id, int frag, RegMask in_mask,
                    const std::array<int64_t, kRegisterCount>& values,
                    int from_core, int from_qt, RegMask result_mask, int64_t t) {
  qt = qt_id;
  fragment = frag;
  ip = 0;
  regs.fill(0);
  for (int r = 1; r < kRegisterCount; ++r)
    if (in_mask.test(r)) regs[size_t(r)] = values[size_t(r)];
  latch.fill(LatchSlot{});
  children.clear();
  arrived_children.clear();
  pending_child_results = 0;
  owned_guards.clear();
  parent_core = from_core;
  parent_qt = from_qt;
  ret_mask = result_mask;
  is_guard = false;
  serving_guard = -1;
  wait_handle = 0;
  waiting_on_guard = false;
  memory_dest = 0;
  end_requested = false;
  halt_requested = false;
  ++epoch;
  ++qts_hosted;
  set_state(CoreState::Running, t);
}

std::vector<int> Core::store_result(
    int child_qt, RegMask mask,
    const std::array<int64_t, kRegisterCount>& values) {
  std::vector<int> overlaps;
  for (int r = 1; r < kRegisterCount; ++r) {
    if (!mask.test(r)) continue;
    LatchSlot& slot = latch[size_t(r)];
    if (slot.writer != -1 && slot.writer != child_qt) overlaps.push_back(r);
    slot.value = values[size_t(r)];
    slot.writer = child_qt;
  }
  arrived_children.insert(child_qt);
  return overlaps;
}

void Core::clone_from_latch(RegMask mask) {
  for (int r = 1; r < kRegisterCount; ++r) {
    if (!mask.test(r)) continue;
    regs[size_t(r)] = latch[size_t(r)].value;
    // The slot is consumed: a later result overwriting it is not a hazard.
    latch[size_t(r)].writer = -1;
  }
}

}  // namespace empa
