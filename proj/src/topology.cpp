#include "empa/topology.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>

namespace empa {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int mod7(int v) { return ((v % 7) + 7) % 7; }

}  // namespace

std::string Axial::to_string() const {
  return "(" + std::to_string(q) + "," + std::to_string(r) + ")";
}

int hex_distance(Axial a, Axial b) {
  int dq = a.q - b.q;
  int dr = a.r - b.r;
  return (std::abs(dq) + std::abs(dr) + std::abs(dq + dr)) / 2;
}

bool is_head_cell(Axial c) { return mod7(c.q + 3 * c.r) == 0; }

Axial head_cell_of(Axial c) {
  // Offset whose residue delta cancels this cell's residue. Residue deltas:
  // step (dq, dr) shifts (q + 3r) by dq + 3 dr.
  static constexpr Axial kByDelta[7] = {
      {0, 0},    // delta 0
      {1, 0},    // delta 1
      {-1, 1},   // delta 2
      {0, 1},    // delta 3
      {0, -1},   // delta 4 (-3)
      {1, -1},   // delta 5 (-2)
      {-1, 0},   // delta 6 (-1)
  };
  int needed = mod7(-(c.q + 3 * c.r));
  return c + kByDelta[needed];
}

Axial Grid::axial_of(CoreId id) const {
  auto [x, y] = xy_of(id);
  return {x, y - floor_div(x, 2)};
}

std::optional<CoreId> Grid::core_at(Axial c) const {
  int x = c.q;
  int y = c.r + floor_div(c.q, 2);
  if (!in_bounds(x, y)) return std::nullopt;
  return id_at(x, y);
}

std::vector<CoreId> Grid::hex_neighbors(CoreId id) const {
  Axial c = axial_of(id);
  std::vector<CoreId> out;
  for (const Axial& d : kHexDirections)
    if (auto n = core_at(c + d)) out.push_back(*n);
  std::sort(out.begin(), out.end());
  return out;
}

std::string_view member_class_name(MemberClass mc) {
  switch (mc) {
    case MemberClass::Head: return "head";
    case MemberClass::Ordinary: return "ordinary";
    case MemberClass::Corresponding: return "corresponding";
    case MemberClass::External: return "external";
    case MemberClass::Phantom: return "phantom";
  }
  return "?";
}

Clustering::Clustering(const Grid& grid) : grid_(grid) {
  cluster_of_.assign(size_t(grid.size()), -1);
  // Group cores by head cell; (r, q) order keys the dense cluster ids.
  std::map<std::pair<int, int>, std::vector<CoreId>> groups;
  for (CoreId id = 0; id < grid.size(); ++id) {
    Axial head = head_cell_of(grid.axial_of(id));
    groups[{head.r, head.q}].push_back(id);
  }
  clusters_.reserve(groups.size());
  for (auto& [key, members] : groups) {
    Cluster c;
    c.id = int(clusters_.size());
    c.head_cell = {key.second, key.first};
    c.head = grid.core_at(c.head_cell);
    std::sort(members.begin(), members.end());
    c.members = std::move(members);
    for (CoreId m : c.members) cluster_of_[size_t(m)] = c.id;
    clusters_.push_back(std::move(c));
  }
  // Cluster adjacency from hex-adjacent core pairs.
  adjacency_.assign(clusters_.size(), {});
  for (CoreId id = 0; id < grid.size(); ++id) {
    int ca = cluster_of_[size_t(id)];
    for (CoreId n : grid.hex_neighbors(id)) {
      int cb = cluster_of_[size_t(n)];
      if (cb != ca) adjacency_[size_t(ca)].push_back(cb);
    }
  }
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
}

int Clustering::slot_of(CoreId core) const {
  const Cluster& c = cluster_containing(core);
  Axial offset = grid_.axial_of(core) - c.head_cell;
  if (offset == Axial{0, 0}) return 0;
  for (int i = 0; i < 6; ++i)
    if (kHexDirections[size_t(i)] == offset) return i + 1;
  return -1;  // unreachable: members are always within distance 1
}

std::optional<CoreId> Clustering::core_at_slot(int cluster_id, int slot) const {
  if (cluster_id < 0 || size_t(cluster_id) >= clusters_.size()) return std::nullopt;
  if (slot < 0 || slot > 6) return std::nullopt;
  const Cluster& c = clusters_[size_t(cluster_id)];
  Axial cell = slot == 0 ? c.head_cell : c.head_cell + kHexDirections[size_t(slot - 1)];
  auto core = grid_.core_at(cell);
  // A position can be on-grid yet belong to no cluster only if the grid and
  // tiling disagree, which cannot happen; still, guard the cluster match.
  if (core && cluster_of(*core) != cluster_id) return std::nullopt;
  return core;
}

uint32_t Clustering::encode_address(CoreId core) const {
  return uint32_t(cluster_of(core)) * 8u + uint32_t(slot_of(core));
}

std::optional<CoreId> Clustering::decode_address(uint32_t address) const {
  return core_at_slot(int(address / 8u), int(address % 8u));
}

std::optional<MemberClass> Clustering::classify_cell(Axial cell,
                                                     int cluster_id) const {
  const Cluster& c = clusters_[size_t(cluster_id)];
  int dist = hex_distance(cell, c.head_cell);
  if (dist > 2) return std::nullopt;
  if (!grid_.core_at(cell)) return MemberClass::Phantom;
  if (dist == 0) return MemberClass::Head;
  if (dist == 1) return MemberClass::Ordinary;
  // Distance 2: owned by a neighboring cluster. Whether that cluster's own
  // head position physically exists decides corresponding vs external.
  bool own_head_exists = grid_.core_at(head_cell_of(cell)).has_value();
  return own_head_exists ? MemberClass::Corresponding : MemberClass::External;
}

std::optional<MemberClass> Clustering::classify(CoreId core,
                                                int cluster_id) const {
  return classify_cell(grid_.axial_of(core), cluster_id);
}

std::vector<CoreId> Clustering::extended_members(int cluster_id) const {
  const Cluster& c = clusters_[size_t(cluster_id)];
  std::vector<CoreId> out;
  for (int dq = -2; dq <= 2; ++dq)
    for (int dr = -2; dr <= 2; ++dr) {
      Axial offset{dq, dr};
      if (hex_distance(offset, {0, 0}) > 2) continue;
      if (auto core = grid_.core_at(c.head_cell + offset)) out.push_back(*core);
    }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<CoreId> Clustering::proxy_for(CoreId core) const {
  std::optional<CoreId> head = cluster_containing(core).head;
  if (!head)
    head = nearest_usable_head(core,
                               std::vector<bool>(size_t(grid_.size()), false));
  if (!head) return std::nullopt;
  if (*head == core) return core;

  // Breadth-first distances from the head over on-grid adjacency; the
  // lattice can be truncated at the border, so plain hex distance is not
  // enough.
  std::vector<int> dist(size_t(grid_.size()), -1);
  std::deque<CoreId> queue{*head};
  dist[size_t(*head)] = 0;
  while (!queue.empty()) {
    CoreId node = queue.front();
    queue.pop_front();
    for (CoreId next : grid_.hex_neighbors(node))
      if (dist[size_t(next)] == -1) {
        dist[size_t(next)] = dist[size_t(node)] + 1;
        queue.push_back(next);
      }
  }
  if (dist[size_t(core)] < 0) return std::nullopt;
  // Neighbors come back ascending by id, so the first match is the tie-break.
  for (CoreId nb : grid_.hex_neighbors(core))
    if (dist[size_t(nb)] == dist[size_t(core)] - 1) return nb;
  return std::nullopt;
}

std::optional<CoreId> Clustering::nearest_usable_head(
    CoreId core, const std::vector<bool>& denied) const {
  Axial from = grid_.axial_of(core);
  std::optional<CoreId> best;
  int best_dist = 0;
  for (const Cluster& c : clusters_) {
    if (!c.head || denied[size_t(*c.head)]) continue;
    int d = hex_distance(from, c.head_cell);
    if (!best || d < best_dist || (d == best_dist && *c.head < *best)) {
      best = c.head;
      best_dist = d;
    }
  }
  return best;
}

}  // namespace empa
