// Processor-level management shared by every cluster: the prioritized
// meta-instruction FIFO, the pool of hireable cores, and the guard table
// for serialized fragments.
#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "empa/isa.hpp"
#include "empa/topology.hpp"

namespace empa {

// Dispatch classes, strongest first: finishing threads free resources, so
// their requests overtake creations, which overtake everything else.
enum class MetaClass : uint8_t { Terminate = 0, Create = 1, Other = 2 };

std::string_view meta_class_name(MetaClass c);
MetaClass meta_class_of(Opcode op);

struct MetaEntry {
  MetaClass cls = MetaClass::Other;
  uint64_t seq = 0;  // global submission order
  int core = 0;
  int qt = 0;
  int64_t submit_t = 0;
  Instruction ins;
  std::array<int64_t, kRegisterCount> snapshot{};  // registers at submission
};

// Priority queue over (class, submission order): all Terminate entries
// drain before any Create, which drain before the rest; within one class
// the order is first-in first-out.
class MetaFifo {
 public:
  void push(MetaEntry entry);
  bool empty() const;
  size_t size() const;
  MetaEntry pop();

 private:
  std::deque<MetaEntry> lanes_[3];
};

// Free cores, hired by proximity: nearest to the requester first, ties to
// the lowest core id. Scan order is deterministic.
class CorePool {
 public:
  void insert(CoreId id) { free_.insert(id); }
  void erase(CoreId id) { free_.erase(id); }
  bool empty() const { return free_.empty(); }
  size_t size() const { return free_.size(); }
  bool contains(CoreId id) const { return free_.count(id) > 0; }

  std::optional<CoreId> take_nearest(Axial near, const Grid& grid);

 private:
  std::set<CoreId> free_;
};

// A spawn accepted while the pool was empty; served when a core frees up.
struct PendingHire {
  bool guard = false;  // guard registration instead of a plain spawn
  int parent_core = 0;
  int parent_qt = 0;
  int child_qt = 0;  // already assigned; the handle the parent holds
  Instruction ins;
  std::array<int64_t, kRegisterCount> snapshot{};
};

struct GuardCall {
  int requester_core = 0;
  int requester_qt = 0;
  RegMask in_mask;
  RegMask ret_mask;
  std::array<int64_t, kRegisterCount> values{};
};

struct GuardRecord {
  int id = 0;
  int fragment = -1;
  int owner_core = 0;
  int owner_qt = 0;
  int core = 0;      // hired guard core
  int guard_qt = 0;  // quasi-thread id of the guard service thread
  bool busy = false;
  GuardCall active;  // valid while busy
  std::deque<GuardCall> queue;

  bool drained() const { return !busy && queue.empty(); }
};

class GuardTable {
 public:
  // Returns the new guard id, or nullopt if the fragment is already guarded.
  std::optional<int> add(int fragment, int owner_core, int owner_qt,
                         int guard_core, int guard_qt);
  GuardRecord* by_fragment(int fragment);
  GuardRecord* by_id(int id);
  void remove(int id);

 private:
  std::vector<std::optional<GuardRecord>> records_;
  std::map<int, int> by_fragment_;
};

}  // namespace empa
