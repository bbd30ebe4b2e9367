#include "empa/messaging.hpp"

#include <algorithm>
#include <deque>

namespace empa {

std::string_view message_kind_name(MessageKind kind) {
  switch (kind) {
    case MessageKind::RegisterTransfer: return "reg_transfer";
    case MessageKind::QtCreateRequest: return "qt_create";
    case MessageKind::QtResult: return "qt_result";
    case MessageKind::MemoryRead: return "mem_read";
    case MessageKind::MemoryReadReply: return "mem_read_reply";
    case MessageKind::MemoryWrite: return "mem_write";
    case MessageKind::MemoryWriteAck: return "mem_write_ack";
  }
  return "?";
}

Router::Router(const Clustering& clustering, std::vector<bool> denied)
    : clustering_(clustering), denied_(std::move(denied)) {
  const Grid& grid = clustering.grid();
  denied_.resize(size_t(grid.size()), false);
  edges_.assign(size_t(grid.size()), {});
  for (CoreId id = 0; id < grid.size(); ++id) {
    if (denied_[size_t(id)]) continue;
    for (CoreId n : grid.hex_neighbors(id))
      if (!denied_[size_t(n)]) edges_[size_t(id)].push_back(n);
  }
  // Express bus between the heads of adjacent clusters.
  for (const Cluster& c : clustering.clusters()) {
    if (!c.head || denied_[size_t(*c.head)]) continue;
    for (int other : clustering.adjacent_clusters(c.id)) {
      const Cluster& o = clustering.cluster(other);
      if (!o.head || denied_[size_t(*o.head)]) continue;
      edges_[size_t(*c.head)].push_back(*o.head);
    }
  }
  for (auto& adj : edges_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
}

std::optional<Route> Router::bfs(CoreId src, CoreId dst,
                                 const std::vector<int>* restrict_to) const {
  if (denied_[size_t(src)] || denied_[size_t(dst)]) return std::nullopt;
  auto allowed = [&](int node) {
    return !restrict_to ||
           std::binary_search(restrict_to->begin(), restrict_to->end(), node);
  };
  if (!allowed(src) || !allowed(dst)) return std::nullopt;
  std::vector<int> parent(size_t(clustering_.grid().size()), -2);
  parent[size_t(src)] = src;
  std::deque<int> frontier{src};
  while (!frontier.empty()) {
    int node = frontier.front();
    frontier.pop_front();
    if (node == dst) break;
    for (int n : edges_[size_t(node)]) {
      if (parent[size_t(n)] != -2 || !allowed(n)) continue;
      parent[size_t(n)] = node;
      frontier.push_back(n);
    }
  }
  if (parent[size_t(dst)] == -2) return std::nullopt;
  Route route;
  for (int node = dst; node != src; node = parent[size_t(node)])
    route.nodes.push_back(node);
  route.nodes.push_back(src);
  std::reverse(route.nodes.begin(), route.nodes.end());
  return route;
}

std::optional<Route> Router::route(CoreId src, CoreId dst) const {
  if (src == dst) {
    if (denied_[size_t(src)]) return std::nullopt;
    return Route{{src}};
  }
  // Within one cluster the head's star keeps every pair within two hops,
  // so restricting the search to the cluster costs nothing and keeps
  // local traffic local.
  int ca = clustering_.cluster_of(src);
  if (ca == clustering_.cluster_of(dst))
    if (auto local = bfs(src, dst, &clustering_.cluster(ca).members))
      return local;
  return bfs(src, dst, nullptr);
}

std::optional<CoreId> Router::effective_head(CoreId core) const {
  const Cluster& own = clustering_.cluster_containing(core);
  if (own.head && !denied_[size_t(*own.head)]) return own.head;
  return clustering_.nearest_usable_head(core, denied_);
}

std::optional<Route> Router::memory_route(CoreId core) const {
  auto head = effective_head(core);
  if (!head) return std::nullopt;
  std::optional<Route> to_head =
      core == *head ? Route{{core}} : route(core, *head);
  if (!to_head) return std::nullopt;
  to_head->nodes.push_back(kMemoryEndpoint);
  return to_head;
}

}  // namespace empa
