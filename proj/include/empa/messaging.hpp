// Messages between cores and the hop-level router. Routes follow hex
// edges inside a cluster; between clusters the heads form an express bus,
// and the memory controller hangs off every head.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "empa/isa.hpp"
#include "empa/topology.hpp"

namespace empa {

// Pseudo core id of the memory controller endpoint.
inline constexpr int kMemoryEndpoint = -1;

enum class MessageKind : uint8_t {
  RegisterTransfer,  // masked register values, e.g. guarded-call admission
  QtCreateRequest,   // activates a hired core: fragment + input registers
  QtResult,          // child's latch values back to its parent at QEND
  MemoryRead,
  MemoryReadReply,
  MemoryWrite,
  MemoryWriteAck,
};

std::string_view message_kind_name(MessageKind kind);

struct Message {
  MessageKind kind = MessageKind::RegisterTransfer;
  int src = 0;
  int dst = 0;  // kMemoryEndpoint for memory requests
  int qt = 0;        // quasi-thread the message acts for
  int child_qt = 0;  // QtCreateRequest / QtResult: the child's id
  int fragment = -1;
  RegMask mask;      // registers carried in `values`
  RegMask ret_mask;  // QtCreateRequest: the child's result contract
  std::array<int64_t, kRegisterCount> values{};
  int64_t address = 0;
  int64_t value = 0;
};

struct Route {
  std::vector<int> nodes;  // endpoints included; kMemoryEndpoint possible
  int hops() const { return int(nodes.size()) - 1; }
};

// Shortest-hop routing with denied cores removed from the graph entirely:
// they neither originate, receive, nor relay traffic.
class Router {
 public:
  Router(const Clustering& clustering, std::vector<bool> denied);

  bool is_denied(CoreId core) const { return denied_[size_t(core)]; }
  const std::vector<bool>& denied() const { return denied_; }

  // Core-to-core route. Both endpoints inside one cluster stay inside it.
  std::optional<Route> route(CoreId src, CoreId dst) const;

  // Head a core's memory traffic goes through: its own cluster's head, or
  // the nearest usable head when that one is missing or denied.
  std::optional<CoreId> effective_head(CoreId core) const;

  // core -> effective head -> memory. The reply retraces the same route.
  std::optional<Route> memory_route(CoreId core) const;

 private:
  std::optional<Route> bfs(CoreId src, CoreId dst,
                           const std::vector<int>* restrict_to) const;

  const Clustering& clustering_;
  std::vector<bool> denied_;
  std::vector<std::vector<int>> edges_;  // per-core, sorted neighbor ids
};

}  // namespace empa
