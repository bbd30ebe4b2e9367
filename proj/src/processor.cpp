#include "empa/processor.hpp"

namespace empa {

std::string_view meta_class_name(MetaClass c) {
  switch (c) {
    case MetaClass::Terminate: return "terminate";
    case MetaClass::Create: return "create";
    case MetaClass::Other: return "other";
  }
  return "?";
}

MetaClass meta_class_of(Opcode op) {
  switch (op) {
    case Opcode::QEnd: return MetaClass::Terminate;
    case Opcode::QCreate:
    case Opcode::QGuard: return MetaClass::Create;
    default: return MetaClass::Other;
  }
}

void MetaFifo::push(MetaEntry entry) {
  lanes_[size_t(entry.cls)].push_back(std::move(entry));
}

bool MetaFifo::empty() const {
  return lanes_[0].empty() && lanes_[1].empty() && lanes_[2].empty();
}

size_t MetaFifo::size() const {
  return lanes_[0].size() + lanes_[1].size() + lanes_[2].size();
}

MetaEntry MetaFifo::pop() {
  for (auto& lane : lanes_) {
    if (lane.empty()) continue;
    MetaEntry entry = std::move(lane.front());
    lane.pop_front();
    return entry;
  }
  return {};
}

std::optional<CoreId> CorePool::take_nearest(Axial near, const Grid& grid) {
  std::optional<CoreId> best;
  int best_dist = 0;
  for (CoreId id : free_) {  // ascending ids: ties keep the first seen
    int d = hex_distance(grid.axial_of(id), near);
    if (!best || d < best_dist) {
      best = id;
      best_dist = d;
    }
  }
  if (best) free_.erase(*best);
  return best;
}

std::optional<int> GuardTable::add(int fragment, int owner_core, int owner_qt,
                                   int guard_core, int guard_qt) {
  if (by_fragment_.count(fragment)) return std::nullopt;
  GuardRecord rec;
  rec.id = int(records_.size());
  rec.fragment = fragment;
  rec.owner_core = owner_core;
  rec.owner_qt = owner_qt;
  rec.core = guard_core;
  rec.guard_qt = guard_qt;
  by_fragment_[fragment] = rec.id;
  records_.push_back(std::move(rec));
  return records_.back()->id;
}

GuardRecord* GuardTable::by_fragment(int fragment) {
  auto it = by_fragment_.find(fragment);
  if (it == by_fragment_.end()) return nullptr;
  return by_id(it->second);
}

GuardRecord* GuardTable::by_id(int id) {
  if (id < 0 || size_t(id) >= records_.size() || !records_[size_t(id)])
    return nullptr;
  return &*records_[size_t(id)];
}

void GuardTable::remove(int id) {
  GuardRecord* rec = by_id(id);
  if (!rec) return;
  by_fragment_.erase(rec->fragment);
  records_[size_t(id)].reset();
}

}  // namespace empa
