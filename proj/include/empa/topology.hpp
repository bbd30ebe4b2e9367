// Rectangular core grid viewed as a hexagonal lattice, tiled by 7-cell
// clusters (a head and up to six surrounding members).
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace empa {

using CoreId = int;

// Axial hex coordinates. Grid position (x, y) maps to q = x,
// r = y - floor(x/2), which turns the square grid into a hex lattice
// where odd columns sit half a step lower.
struct Axial {
  int q = 0;
  int r = 0;
  friend bool operator==(const Axial&, const Axial&) = default;
  friend auto operator<=>(const Axial&, const Axial&) = default;
  Axial operator+(const Axial& o) const { return {q + o.q, r + o.r}; }
  Axial operator-(const Axial& o) const { return {q - o.q, r - o.r}; }
  std::string to_string() const;
};

// The six hex directions, in slot order: E, NE, NW, W, SW, SE.
inline constexpr std::array<Axial, 6> kHexDirections = {
    Axial{1, 0}, Axial{1, -1}, Axial{0, -1},
    Axial{-1, 0}, Axial{-1, 1}, Axial{0, 1}};

int hex_distance(Axial a, Axial b);

// Head cells satisfy (q + 3r) == 0 (mod 7). The residue deltas of a cell's
// closed neighborhood cover all seven residues exactly once, so every cell
// sees exactly one head cell at distance <= 1: a perfect 7-cell tiling.
bool is_head_cell(Axial c);
Axial head_cell_of(Axial c);

struct Grid {
  int width = 0;
  int height = 0;

  int size() const { return width * height; }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  CoreId id_at(int x, int y) const { return y * width + x; }
  std::pair<int, int> xy_of(CoreId id) const {
    return {id % width, id / width};
  }
  Axial axial_of(CoreId id) const;
  std::optional<CoreId> core_at(Axial c) const;
  // On-grid hex neighbors, ascending by core id.
  std::vector<CoreId> hex_neighbors(CoreId id) const;
};

// Role of a lattice cell relative to one cluster's head.
enum class MemberClass {
  Head,           // the head cell itself
  Ordinary,       // distance 1: a member of this cluster
  Corresponding,  // distance 2, belongs to an adjacent cluster with a real head
  External,       // distance 2, its own head position is off the grid
  Phantom,        // the cell position is off the grid
};

std::string_view member_class_name(MemberClass mc);

struct Cluster {
  int id = 0;
  Axial head_cell;
  std::optional<CoreId> head;   // absent when the head position is off-grid
  std::vector<CoreId> members;  // on-grid cores owned by this cluster, by id
};

// Cluster decomposition of a grid. Cluster ids are dense and assigned in
// (r, q) order of the head cells, so they are stable for a given grid size.
class Clustering {
 public:
  explicit Clustering(const Grid& grid);

  const Grid& grid() const { return grid_; }
  const std::vector<Cluster>& clusters() const { return clusters_; }
  const Cluster& cluster(int id) const { return clusters_[size_t(id)]; }
  int cluster_of(CoreId core) const { return cluster_of_[size_t(core)]; }
  const Cluster& cluster_containing(CoreId core) const {
    return clusters_[size_t(cluster_of(core))];
  }

  // Slot 0 is the head; slots 1..6 follow the hex direction order.
  int slot_of(CoreId core) const;
  std::optional<CoreId> core_at_slot(int cluster_id, int slot) const;

  // Hierarchic address: cluster id in the upper bits, slot in the lower 3.
  uint32_t encode_address(CoreId core) const;
  std::optional<CoreId> decode_address(uint32_t address) const;

  // How the given cell looks from cluster_id's head; nullopt beyond the
  // extended cluster (distance > 2).
  std::optional<MemberClass> classify_cell(Axial cell, int cluster_id) const;
  std::optional<MemberClass> classify(CoreId core, int cluster_id) const;

  // On-grid cores within distance 2 of the head cell (at most 19).
  std::vector<CoreId> extended_members(int cluster_id) const;

  // Clusters sharing at least one pair of hex-adjacent cores with this one.
  const std::vector<int>& adjacent_clusters(int cluster_id) const {
    return adjacency_[size_t(cluster_id)];
  }

  // Physical, non-denied head nearest to the core (ties to the lowest core
  // id); used when a core's own head is missing or denied. Nullopt when no
  // head qualifies.
  std::optional<CoreId> nearest_usable_head(
      CoreId core, const std::vector<bool>& denied) const;

  // First hop from a core toward the head that serves it: the neighbor one
  // step closer on a shortest lattice path (the head itself when next
  // door), lowest id on ties. Cores whose own head position is off the
  // grid aim at the nearest on-grid head. A head is its own proxy.
  std::optional<CoreId> proxy_for(CoreId core) const;

 private:
  Grid grid_;
  std::vector<Cluster> clusters_;
  std::vector<int> cluster_of_;
  std::vector<std::vector<int>> adjacency_;
};

}  // namespace empa
