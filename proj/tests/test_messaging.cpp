#include <doctest.h>

#include <algorithm>
#include <deque>
#include <random>
#include <set>

#include "empa/messaging.hpp"

using namespace empa;

TEST_SUITE_BEGIN("messaging");

namespace {

// Reference routing graph built from first principles: cells are wired
// when their hex distance is 1, heads of touching clusters are wired,
// and every head reaches the memory endpoint. Node n == memory.
struct OracleGraph {
  int n;  // core count; node n is the memory endpoint
  std::vector<std::set<int>> adj;

  OracleGraph(const Grid& g, const Clustering& cl, const std::vector<bool>& denied)
      : n(g.size()), adj(size_t(g.size()) + 1) {
    auto ok = [&](CoreId c) { return !denied[size_t(c)]; };
    for (CoreId a = 0; a < n; ++a)
      for (CoreId b = a + 1; b < n; ++b)
        if (ok(a) && ok(b) && hex_distance(g.axial_of(a), g.axial_of(b)) == 1) {
          adj[size_t(a)].insert(b);
          adj[size_t(b)].insert(a);
        }
    // Two clusters touch when any of their cores sit one hop apart.
    for (const Cluster& ca : cl.clusters())
      for (const Cluster& cb : cl.clusters()) {
        if (ca.id >= cb.id || !ca.head || !cb.head) continue;
        if (!ok(*ca.head) || !ok(*cb.head)) continue;
        bool touching = false;
        for (CoreId a : ca.members)
          for (CoreId b : cb.members)
            if (hex_distance(g.axial_of(a), g.axial_of(b)) == 1) touching = true;
        if (touching) {
          adj[size_t(*ca.head)].insert(*cb.head);
          adj[size_t(*cb.head)].insert(*ca.head);
        }
      }
    for (const Cluster& c : cl.clusters())
      if (c.head && ok(*c.head)) {
        adj[size_t(*c.head)].insert(n);
        adj[size_t(n)].insert(*c.head);
      }
  }

  // -1 when unreachable. The memory endpoint is a leaf, not a router:
  // core-to-core paths may not pass through it.
  int distance(int src, int dst) const {
    std::vector<int> dist(adj.size(), -1);
    dist[size_t(src)] = 0;
    std::deque<int> q{src};
    while (!q.empty()) {
      int node = q.front();
      q.pop_front();
      if (node == n && dst != n) continue;
      for (int next : adj[size_t(node)])
        if (dist[size_t(next)] == -1) {
          dist[size_t(next)] = dist[size_t(node)] + 1;
          q.push_back(next);
        }
    }
    return dist[size_t(dst)];
  }

  bool has_edge(int a, int b) const { return adj[size_t(a)].count(b) > 0; }
};

int as_node(int endpoint, int n) { return endpoint == kMemoryEndpoint ? n : endpoint; }

}  // namespace

TEST_CASE("routes match shortest paths in the reference graph") {
  Grid g{10, 10};
  Clustering cl(g);
  std::vector<bool> denied(size_t(g.size()), false);
  Router router(cl, denied);
  OracleGraph oracle(g, cl, denied);

  for (CoreId src = 0; src < g.size(); ++src)
    for (CoreId dst = 0; dst < g.size(); ++dst) {
      auto r = router.route(src, dst);
      REQUIRE(r.has_value());
      CAPTURE(src);
      CAPTURE(dst);
      CHECK(r->hops() == oracle.distance(src, dst));
      // Every step uses a real link.
      for (size_t i = 0; i + 1 < r->nodes.size(); ++i)
        CHECK(oracle.has_edge(as_node(r->nodes[i], oracle.n),
                              as_node(r->nodes[i + 1], oracle.n)));
    }
}

TEST_CASE("traffic between cluster mates never leaves the cluster") {
  Grid g{10, 10};
  Clustering cl(g);
  Router router(cl, std::vector<bool>(size_t(g.size()), false));
  OracleGraph oracle(g, cl, std::vector<bool>(size_t(g.size()), false));

  for (const Cluster& c : cl.clusters())
    for (CoreId src : c.members)
      for (CoreId dst : c.members) {
        auto r = router.route(src, dst);
        REQUIRE(r.has_value());
        for (int node : r->nodes) {
          CAPTURE(src);
          CAPTURE(dst);
          CHECK(cl.cluster_of(node) == c.id);
        }
        // Staying local costs nothing: still a shortest path.
        CHECK(r->hops() == oracle.distance(src, dst));
      }
}

TEST_CASE("memory traffic goes through the sender's head") {
  Grid g{10, 10};
  Clustering cl(g);
  std::vector<bool> denied(size_t(g.size()), false);
  Router router(cl, denied);
  OracleGraph oracle(g, cl, denied);

  for (CoreId core = 0; core < g.size(); ++core) {
    auto mr = router.memory_route(core);
    REQUIRE(mr.has_value());
    REQUIRE(mr->nodes.size() >= 2);
    CHECK(mr->nodes.front() == core);
    CHECK(mr->nodes.back() == kMemoryEndpoint);
    auto head = router.effective_head(core);
    REQUIRE(head.has_value());
    CHECK(mr->nodes[mr->nodes.size() - 2] == *head);
    // Going through the own head is still a shortest path to memory.
    CHECK(mr->hops() == oracle.distance(core, oracle.n));
    // A head reaches memory in one hop; a petal in two.
    if (core == *head) CHECK(mr->hops() == 1);
    if (cl.cluster_containing(core).head == core) CHECK(mr->hops() == 1);
  }
}

TEST_CASE("the head bus shortcuts long-range routes") {
  Grid g{16, 16};
  Clustering cl(g);
  Router router(cl, std::vector<bool>(size_t(g.size()), false));
  // Opposite corners are far apart on the lattice; the bus does better.
  CoreId a = 0, b = g.size() - 1;
  int lattice = hex_distance(g.axial_of(a), g.axial_of(b));
  auto r = router.route(a, b);
  REQUIRE(r.has_value());
  CHECK(r->hops() < lattice);
}

TEST_CASE("denied cores are avoided and may sever routes") {
  Grid g{10, 10};
  Clustering cl(g);
  std::vector<bool> denied(size_t(g.size()), false);
  // A ragged vertical wall with one gap.
  for (int y = 0; y < g.height; ++y)
    if (y != 7) denied[size_t(g.id_at(5, y))] = true;
  Router router(cl, denied);
  OracleGraph oracle(g, cl, denied);

  for (CoreId src : {0, 41, 90})
    for (CoreId dst = 0; dst < g.size(); ++dst) {
      if (denied[size_t(dst)]) {
        CHECK_FALSE(router.route(src, dst).has_value());
        continue;
      }
      auto r = router.route(src, dst);
      int want = oracle.distance(src, dst);
      if (want == -1) {
        CHECK_FALSE(r.has_value());
        continue;
      }
      REQUIRE(r.has_value());
      CHECK(r->hops() == want);
      for (int node : r->nodes)
        if (node != kMemoryEndpoint) CHECK_FALSE(denied[size_t(node)]);
    }
}

TEST_CASE("a denied head is substituted for memory access") {
  Grid g{10, 10};
  Clustering cl(g);
  // Deny one interior head; its members must find another way to memory.
  const Cluster* victim = nullptr;
  for (const Cluster& c : cl.clusters())
    if (c.head && c.members.size() == 7) {
      victim = &c;
      break;
    }
  REQUIRE(victim != nullptr);
  std::vector<bool> denied(size_t(g.size()), false);
  denied[size_t(*victim->head)] = true;
  Router router(cl, denied);

  for (CoreId m : victim->members) {
    if (m == *victim->head) continue;
    auto head = router.effective_head(m);
    REQUIRE(head.has_value());
    CHECK(*head != *victim->head);
    CHECK_FALSE(denied[size_t(*head)]);
    auto mr = router.memory_route(m);
    REQUIRE(mr.has_value());
    CHECK(mr->nodes[mr->nodes.size() - 2] == *head);
    for (int node : mr->nodes)
      if (node != kMemoryEndpoint) CHECK_FALSE(denied[size_t(node)]);
  }
}

TEST_CASE("sampled routes match the oracle on every grid up to 16x16") {
  // The 10x10 case above is exhaustive; here every other grid shape gets
  // a deterministic sample of pairs against its own oracle graph.
  std::mt19937_64 rng(11);
  for (int w = 1; w <= 16; ++w)
    for (int h = 1; h <= 16; ++h) {
      Grid g{w, h};
      Clustering cl(g);
      std::vector<bool> denied(size_t(g.size()), false);
      Router router(cl, denied);
      OracleGraph oracle(g, cl, denied);
      int pairs = std::min(40, g.size() * g.size());
      for (int k = 0; k < pairs; ++k) {
        CoreId src = CoreId(rng() % uint64_t(g.size()));
        CoreId dst = CoreId(rng() % uint64_t(g.size()));
        auto r = router.route(src, dst);
        CAPTURE(w);
        CAPTURE(h);
        CAPTURE(src);
        CAPTURE(dst);
        REQUIRE(r.has_value());
        CHECK(r->hops() == oracle.distance(src, dst));
      }
      CoreId probe = CoreId(rng() % uint64_t(g.size()));
      auto mr = router.memory_route(probe);
      REQUIRE(mr.has_value());
      CHECK(mr->hops() == oracle.distance(probe, oracle.n));
    }
}

TEST_CASE("an isolated core cannot be routed to") {
  Grid g{3, 1};
  Clustering cl(g);
  std::vector<bool> denied{false, true, false};
  Router router(cl, denied);
  CHECK_FALSE(router.route(0, 2).has_value());
  CHECK(router.route(0, 0).has_value());
  CHECK(router.route(0, 0)->hops() == 0);
  // Core 2's only head is core 0 and the path to it is severed.
  CHECK_FALSE(router.memory_route(2).has_value());
  CHECK(router.memory_route(0).has_value());
}

TEST_SUITE_END();
