#include <doctest.h>

#include <json.hpp>

#include "empa/engine.hpp"
#include "helpers.hpp"

using namespace empa;
using empa::test::assemble_or_throw;
using empa::test::load_workload;

TEST_SUITE_BEGIN("engine");

namespace {

SimConfig grid_config(int w, int h) {
  SimConfig cfg;
  cfg.grid_width = w;
  cfg.grid_height = h;
  return cfg;
}

int64_t count_diags_containing(const RunResult& r, std::string_view needle) {
  int64_t n = 0;
  for (const LogEvent& e : r.log)
    if (e.kind == LogKind::Diag && e.text.find(needle) != std::string::npos) ++n;
  return n;
}

std::string serialize_log(const RunResult& r) {
  std::string out;
  for (const LogEvent& e : r.log) {
    out += log_event_to_json(e);
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("four register instructions finish at cycle four with no traffic") {
  Program p = assemble_or_throw("LI r1, 2\nLI r2, 3\nADD r3, r1, r2\nHALT\n");
  RunResult r = run(p, grid_config(8, 8));
  CHECK(r.status == RunStatus::Completed);
  CHECK(r.metrics.makespan == 4);
  CHECK(r.metrics.messages == 0);
  CHECK(r.metrics.hops == 0);
  CHECK(r.metrics.memory_ops == 0);
  CHECK(r.metrics.qt_count == 0);
  CHECK(r.metrics.max_live_qts == 1);
  CHECK(r.final_state.root_regs[3] == 5);
}

TEST_CASE("result cloning with an empty mask costs one plain cycle") {
  Program with = assemble_or_throw("LI r1, 2\nQCLONE {}\nLI r2, 3\nHALT\n");
  Program without = assemble_or_throw("LI r1, 2\nLI r2, 3\nHALT\n");
  RunResult a = run(with, grid_config(8, 8));
  RunResult b = run(without, grid_config(8, 8));
  CHECK(a.metrics.makespan == b.metrics.makespan + 1);
  CHECK(a.metrics.messages == 0);
  // It never reaches the management queue.
  for (const LogEvent& e : a.log) CHECK(e.kind != LogKind::Submit);
}

TEST_CASE("a memory read from a cluster head answers after hop plus latency") {
  Program p = assemble_or_throw("LD r1, [r0+8]\nHALT\n");
  SimConfig cfg = grid_config(8, 8);
  cfg.memory_init = {{8, 42}};
  RunResult r = run(p, cfg);
  CHECK(r.status == RunStatus::Completed);
  CHECK(r.final_state.root_regs[1] == 42);
  // Issue at 0, reply at hop + latency = 103, HALT the cycle after.
  CHECK(r.metrics.makespan == cfg.hop_cost + cfg.memory_latency + 1);
  CHECK(r.metrics.memory_ops == 1);
  CHECK(r.metrics.messages == 2);  // request and reply both counted
}

TEST_CASE("a register transfer over one hop arrives three cycles later") {
  Program p = assemble_or_throw("HALT\n");
  Simulation sim(p, grid_config(8, 8));
  Message m;
  m.kind = MessageKind::RegisterTransfer;
  m.src = 1;
  m.dst = 2;  // hex neighbors on the top row
  m.qt = 0;
  sim.inject_message(m);
  while (sim.step()) {
  }
  RunResult r = sim.take_result();
  // The stray transfer is reported on delivery; the report's timestamp is
  // the arrival time.
  bool found = false;
  for (const LogEvent& e : r.log) {
    if (e.kind == LogKind::Message && e.core == 1) {
      CHECK(e.b == 1);  // one hop
    }
    if (e.kind == LogKind::Diag && e.core == 2) {
      CHECK(e.t == 3);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("conventional workload matches the baseline exactly") {
  Program p = assemble_or_throw(load_workload("conventional.asm"));
  SimConfig cfg = grid_config(8, 8);
  RunResult empa = run(p, cfg);
  RunResult spa = run_spa_baseline(p, cfg);
  CHECK(empa.status == RunStatus::Completed);
  CHECK(spa.status == RunStatus::Completed);
  CHECK(empa.final_state == spa.final_state);
  CHECK(empa.final_state.memory.at(60) == 55);
  CHECK(empa.metrics.qt_count == 0);
}

TEST_CASE("fibonacci workload: 177 spawns, both machines agree on memory") {
  Program p = assemble_or_throw(load_workload("fib.asm"));
  SimConfig cfg = grid_config(16, 16);
  RunResult empa = run(p, cfg);
  RunResult spa = run_spa_baseline(p, cfg);
  CHECK(empa.status == RunStatus::Completed);
  CHECK(empa.final_state.memory.at(40) == 55);
  CHECK(empa.metrics.qt_count == 177);
  CHECK(spa.metrics.qt_count == 177);
  CHECK(empa.final_state.memory == spa.final_state.memory);
  CHECK(count_diags_containing(empa, "") == 0);  // a clean run
}

TEST_CASE("spawn tree workload produces a full binary tree of workers") {
  Program p = assemble_or_throw(load_workload("spawn_tree.asm"));
  for (int depth : {2, 4}) {
    SimConfig cfg = grid_config(16, 16);
    cfg.memory_init = {{0, depth}};
    RunResult r = run(p, cfg);
    CHECK(r.status == RunStatus::Completed);
    CHECK(r.metrics.qt_count == (int64_t(1) << depth));
    RunResult s = run_spa_baseline(p, cfg);
    CHECK(s.metrics.qt_count == (int64_t(1) << depth));
  }
}

TEST_CASE("mutual exclusion workload: eight writers, exact final counter") {
  Program p = assemble_or_throw(load_workload("mutex_counter.asm"));
  SimConfig cfg = grid_config(8, 8);
  RunResult empa = run(p, cfg);
  RunResult spa = run_spa_baseline(p, cfg);
  CHECK(empa.status == RunStatus::Completed);
  CHECK(empa.final_state.memory.at(100) == 800);
  CHECK(spa.final_state.memory.at(100) == 800);
  CHECK(empa.metrics.qt_count == 9);  // eight workers and one guard
  CHECK(empa.metrics.max_live_qts == 10);
}

TEST_CASE("subroutine workload never spills registers to memory") {
  Program p = assemble_or_throw(load_workload("subroutine.asm"));
  SimConfig cfg = grid_config(8, 8);
  RunResult empa = run(p, cfg);
  RunResult spa = run_spa_baseline(p, cfg);
  CHECK(empa.final_state.memory.at(50) == 8);
  CHECK(spa.final_state.memory.at(50) == 8);
  CHECK(empa.metrics.stack_memory_ops == 0);
  // Four saved registers and a return record, spilled and reloaded per call.
  CHECK(spa.metrics.stack_memory_ops == 8 * 2 * (4 + 1));
}

TEST_CASE("two identical runs produce bit-identical logs and metrics") {
  Program p = assemble_or_throw(load_workload("fib.asm"));
  SimConfig cfg = grid_config(8, 8);
  RunResult a = run(p, cfg);
  RunResult b = run(p, cfg);
  CHECK(serialize_log(a) == serialize_log(b));
  CHECK(metrics_to_json(a.metrics) == metrics_to_json(b.metrics));
  CHECK(a.final_state == b.final_state);
}

TEST_CASE("delaying result returns shifts time but not results") {
  Program p = assemble_or_throw(load_workload("fib.asm"));
  SimConfig cfg = grid_config(8, 8);
  SimConfig delayed = cfg;
  delayed.result_delay = 17;
  RunResult a = run(p, cfg);
  RunResult b = run(p, delayed);
  CHECK(a.final_state == b.final_state);
  CHECK(b.metrics.makespan > a.metrics.makespan);
  CHECK(a.metrics.qt_count == b.metrics.qt_count);
}

TEST_CASE("a guard calling its own fragment deadlocks and says why") {
  Program p = assemble_or_throw(
      "main:\n"
      "  QGUARD g\n"
      "  QCALLG g, {}, {}\n"
      "  HALT\n"
      "g:\n"
      "  QCALLG g, {}, {}\n"
      "  QEND\n");
  RunResult r = run(p, grid_config(8, 8));
  CHECK(r.status == RunStatus::Deadlock);
  CHECK(r.exit_code() == 2);
  REQUIRE_FALSE(r.problems.empty());
  bool stuck_reported = false;
  for (const std::string& s : r.problems)
    if (s.find("waiting_latch") != std::string::npos) stuck_reported = true;
  CHECK(stuck_reported);
}

TEST_CASE("an endless loop trips the cycle cap") {
  Program p = assemble_or_throw(".loop:\n  JMP .loop\n");
  SimConfig cfg = grid_config(4, 4);
  cfg.cycle_cap = 5000;
  RunResult r = run(p, cfg);
  CHECK(r.status == RunStatus::CycleCapExceeded);
  CHECK(r.exit_code() == 3);
  CHECK(r.metrics.makespan <= 5000);
}

TEST_CASE("configuration problems surface before any cycle runs") {
  Program p = assemble_or_throw("HALT\n");

  SUBCASE("degenerate grid") {
    SimConfig cfg = grid_config(0, 5);
    RunResult r = run(p, cfg);
    CHECK(r.status == RunStatus::ConfigError);
    CHECK(r.exit_code() == 1);
  }
  SUBCASE("denied core outside the grid") {
    SimConfig cfg = grid_config(4, 4);
    cfg.denied = {99};
    RunResult r = run(p, cfg);
    CHECK(r.status == RunStatus::ConfigError);
  }
  SUBCASE("memory preset out of range") {
    SimConfig cfg = grid_config(4, 4);
    cfg.memory_size = 64;
    cfg.memory_init = {{64, 1}};
    RunResult r = run(p, cfg);
    CHECK(r.status == RunStatus::ConfigError);
  }
  SUBCASE("every usable head denied") {
    SimConfig cfg = grid_config(2, 2);
    // Only one head exists on 2x2; denying it leaves nowhere to start.
    Grid grid{2, 2};
    for (CoreId id = 0; id < grid.size(); ++id)
      if (is_head_cell(grid.axial_of(id))) cfg.denied.push_back(id);
    RunResult r = run(p, cfg);
    CHECK(r.status == RunStatus::ConfigError);
  }
  SUBCASE("a program that fails validation") {
    auto res = assemble("main:\n  LI r1, 1\n");  // falls off the end
    REQUIRE(res.program.has_value());
    REQUIRE_FALSE(validate(*res.program).empty());
    RunResult r = run(*res.program, grid_config(4, 4));
    CHECK(r.status == RunStatus::ConfigError);
    CHECK_FALSE(r.problems.empty());
  }
}

TEST_CASE("denied cores are never hired and never traversed") {
  Program p = assemble_or_throw(load_workload("fib.asm"));
  Grid grid{10, 10};
  SimConfig cfg = grid_config(10, 10);
  cfg.denied = random_denied_set(grid, 0.2, 4242, /*exclude_heads=*/true);
  REQUIRE_FALSE(cfg.denied.empty());
  RunResult r = run(p, cfg);
  CHECK(r.status == RunStatus::Completed);
  CHECK(r.final_state.memory.at(40) == 55);
  std::set<CoreId> denied(cfg.denied.begin(), cfg.denied.end());
  for (const LogEvent& e : r.log)
    if (e.kind == LogKind::Hire) CHECK(denied.count(e.core) == 0);
}

TEST_CASE("a denied head reroutes its members through a neighbor head") {
  Grid grid{8, 8};
  Clustering clustering(grid);
  // Pick an interior cluster and deny its head.
  const Cluster* chosen = nullptr;
  for (const Cluster& cl : clustering.clusters())
    if (cl.head && cl.members.size() == 7 &&
        clustering.extended_members(cl.id).size() == 19)
      chosen = &cl;
  REQUIRE(chosen != nullptr);
  std::vector<bool> denied(size_t(grid.size()), false);
  denied[size_t(*chosen->head)] = true;
  Router router(clustering, denied);
  for (CoreId member : chosen->members) {
    if (member == *chosen->head) continue;
    auto head = router.effective_head(member);
    REQUIRE(head.has_value());
    CHECK(*head != *chosen->head);
    CHECK(is_head_cell(grid.axial_of(*head)));
    auto route = router.memory_route(member);
    REQUIRE(route.has_value());
    for (int node : route->nodes) CHECK(node != *chosen->head);
    CHECK(route->nodes[route->nodes.size() - 2] == *head);
  }
}

TEST_CASE("messages to a denied destination bounce as a refusal") {
  Program p = assemble_or_throw("HALT\n");
  SimConfig cfg = grid_config(4, 4);
  cfg.denied = {7};
  Simulation sim(p, cfg);
  Message m;
  m.kind = MessageKind::RegisterTransfer;
  m.src = 1;
  m.dst = 7;
  sim.inject_message(m);
  while (sim.step()) {
  }
  RunResult r = sim.take_result();
  bool nacked = false;
  for (const LogEvent& e : r.log)
    if (e.kind == LogKind::Nack && e.a == 7) nacked = true;
  CHECK(nacked);
}

TEST_CASE("spawns queue up when every core is busy, then recover") {
  // Ten long-running workers on a nine-core grid: the last spawns must
  // wait for releases, and the run still completes.
  std::string src = "main:\n";
  for (int i = 0; i < 10; ++i) src += "  QCREATE r2, worker, {}, {}\n";
  src +=
      "  HALT\n"
      "worker:\n"
      "  LI r3, 50\n"
      "  LI r4, 1\n"
      ".spin:\n"
      "  SUB r3, r3, r4\n"
      "  BNE r3, r0, .spin\n"
      "  QEND\n";
  Program p = assemble_or_throw(src);
  RunResult r = run(p, grid_config(3, 3));
  CHECK(r.status == RunStatus::Completed);
  CHECK(r.metrics.qt_count == 10);
  CHECK(r.metrics.pool_exhaustion > 0);
  CHECK(r.metrics.max_live_qts == 9);  // root plus the eight cores available
  int64_t queued_hires = 0;
  for (const LogEvent& e : r.log)
    if (e.kind == LogKind::Hire && (e.c & 1)) ++queued_hires;
  CHECK(queued_hires == r.metrics.pool_exhaustion);
}

TEST_CASE("saturated spawning with no possible releases is a deadlock") {
  Program p = assemble_or_throw(load_workload("spawn_tree.asm"));
  SimConfig cfg = grid_config(4, 4);
  cfg.memory_init = {{0, 6}};  // 64 workers cannot fit on 16 cores
  RunResult r = run(p, cfg);
  CHECK(r.status == RunStatus::Deadlock);
  CHECK(r.metrics.pool_exhaustion > 0);
  bool hire_stall = false;
  for (const std::string& s : r.problems)
    if (s.find("waiting_hire") != std::string::npos) hire_stall = true;
  CHECK(hire_stall);
}

TEST_CASE("an unconsumed latch slot overwritten by a sibling is reported") {
  Program p = assemble_or_throw(
      "main:\n"
      "  LI r1, 7\n"
      "  QCREATE r2, w, {r1}, {r1}\n"
      "  LI r1, 9\n"
      "  QCREATE r3, w, {r1}, {r1}\n"
      "  QWAIT r2\n"
      "  QWAIT r3\n"
      "  QCLONE {r1}\n"
      "  HALT\n"
      "w:\n"
      "  QEND\n");
  RunResult r = run(p, grid_config(8, 8));
  CHECK(r.status == RunStatus::Completed);
  CHECK(count_diags_containing(r, "overwrote an unconsumed value") == 1);
}

TEST_CASE("a halt executed outside the entry thread ends that thread only") {
  Program p = assemble_or_throw(
      "main:\n"
      "  BNE r2, r0, .child\n"
      "  LI r2, 1\n"
      "  QCREATE r3, main, {r2}, {}\n"
      "  QWAIT r3\n"
      "  QCLONE {}\n"
      "  HALT\n"
      ".child:\n"
      "  LI r4, 9\n"
      "  HALT\n");
  RunResult r = run(p, grid_config(8, 8));
  CHECK(r.status == RunStatus::Completed);
  CHECK(count_diags_containing(r, "HALT outside the entry thread") == 1);
}

TEST_CASE("a released core is hired again with a clean slate") {
  Program p = assemble_or_throw(
      "main:\n"
      "  QCREATE r2, w, {}, {r1}\n"
      "  QWAIT r2\n"
      "  QCLONE {r1}\n"
      "  QCREATE r3, w, {}, {r1}\n"
      "  QWAIT r3\n"
      "  QCLONE {r1}\n"
      "  HALT\n"
      "w:\n"
      "  ADD r1, r1, r5\n"  // r5 is zero unless state leaked
      "  LI r5, 1000\n"
      "  ADD r1, r1, r4\n"
      "  LI r4, 77\n"
      "  LI r6, 5\n"
      "  ADD r1, r1, r6\n"
      "  QEND\n");
  SimConfig cfg = grid_config(1, 2);  // one head, one hireable core
  Simulation sim(p, cfg);
  while (sim.step()) {
  }
  CHECK(sim.core_at(1).qts_hosted == 2);
  RunResult r = sim.take_result();
  CHECK(r.status == RunStatus::Completed);
  CHECK(r.final_state.root_regs[1] == 5);  // stale r4/r5 would add 1077
}

TEST_CASE("per-core accounting adds up and idle cores stay at zero") {
  Program p = assemble_or_throw(load_workload("fib.asm"));
  RunResult r = run(p, grid_config(16, 16));
  int64_t energy_sum = 0;
  for (const PerCoreMetrics& pc : r.metrics.per_core) {
    energy_sum += pc.energy;
    CHECK(pc.qts_hosted > 0);  // untouched cores do not appear at all
  }
  CHECK(energy_sum == r.metrics.energy);
  CHECK(int(r.metrics.per_core.size()) < 16 * 16);
}

TEST_CASE("config serialization round-trips and rejects junk") {
  SimConfig cfg;
  cfg.grid_width = 5;
  cfg.grid_height = 9;
  cfg.hop_cost = 2;
  cfg.denied = {3, 8};
  cfg.memory_init = {{4, -2}, {100, 7}};
  SimConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.grid_width == 5);
  CHECK(back.grid_height == 9);
  CHECK(back.hop_cost == 2);
  CHECK(back.denied == cfg.denied);
  CHECK(back.memory_init == cfg.memory_init);

  CHECK_THROWS_AS((void)config_from_json("not json"), std::runtime_error);
  CHECK_THROWS_AS((void)config_from_json("[1,2]"), std::runtime_error);
  CHECK_THROWS_AS((void)config_from_json(R"({"grid_widht": 4})"),
                  std::runtime_error);
  CHECK_THROWS_AS((void)config_from_json(R"({"grid_width": "four"})"),
                  std::runtime_error);
  CHECK_THROWS_AS((void)config_from_json(R"({"memory_init": [[1]]})"),
                  std::runtime_error);
  // Partial configs keep defaults for the rest.
  SimConfig partial = config_from_json(R"({"hop_cost": 11})");
  CHECK(partial.hop_cost == 11);
  CHECK(partial.grid_width == 8);
}

TEST_CASE("event log lines are valid single-line json with a detail object") {
  Program p = assemble_or_throw(load_workload("mutex_counter.asm"));
  RunResult r = run(p, grid_config(8, 8));
  REQUIRE_FALSE(r.log.empty());
  size_t checked = 0;
  for (const LogEvent& e : r.log) {
    std::string line = log_event_to_json(e);
    CHECK(line.find('\n') == std::string::npos);
    nlohmann::json j = nlohmann::json::parse(line);
    CHECK(j.contains("t"));
    CHECK(j.contains("kind"));
    CHECK(j.contains("core"));
    CHECK(j.contains("qt"));
    CHECK(j.contains("detail"));
    if (e.kind == LogKind::Hire) {
      CHECK(j["detail"].contains("parent_qt"));
      CHECK(j["detail"].contains("pool_size"));
    }
    if (e.kind == LogKind::Guard) CHECK(j["detail"].contains("action"));
    if (++checked == 500) break;
  }

  nlohmann::json metrics = nlohmann::json::parse(metrics_to_json(r.metrics));
  for (const char* key :
       {"makespan", "energy", "messages", "hops", "memory_ops", "qt_count",
        "max_live_qts", "per_core"})
    CHECK(metrics.contains(key));
}

TEST_CASE("log timestamps never go backwards") {
  for (const auto& path : empa::test::workload_files()) {
    Program p = assemble_or_throw(empa::test::read_file(path));
    RunResult r = run(p, grid_config(8, 8));
    int64_t last = 0;
    bool monotonic = true;
    for (const LogEvent& e : r.log) {
      if (e.t < last) monotonic = false;
      last = std::max(last, e.t);
    }
    INFO("workload ", path.filename().string());
    CHECK(monotonic);
  }
}

TEST_CASE("comparison report carries ratios and agreement flags") {
  SUBCASE("an all-register program matches exactly, ratios stay finite") {
    Program p = assemble_or_throw("LI r1, 2\nLI r2, 3\nADD r3, r1, r2\nHALT\n");
    ComparisonReport rep = compare(p, grid_config(8, 8));
    CHECK(rep.final_state_equal);
    CHECK(rep.memory_equal);
    REQUIRE(rep.makespan_ratio.has_value());
    CHECK(*rep.makespan_ratio == doctest::Approx(1.0));
    // Both sides moved zero stack words: treated as equal.
    REQUIRE(rep.stack_ops_ratio.has_value());
    CHECK(*rep.stack_ops_ratio == doctest::Approx(1.0));
    CHECK(rep.guard_wait_cycles == 0);
  }
  SUBCASE("the recursive workload shows the spill gap") {
    Program p = assemble_or_throw(load_workload("subroutine.asm"));
    ComparisonReport rep = compare(p, grid_config(8, 8));
    CHECK(rep.memory_equal);
    CHECK_FALSE(rep.stack_ops_ratio.has_value());  // baseline spills, this run not
    CHECK(rep.makespan_delta > 0);
    nlohmann::json j = nlohmann::json::parse(comparison_to_json(rep));
    CHECK(j["ratios"]["stack_memory_ops"].is_null());
    CHECK(j["empa"]["status"] == "completed");
    CHECK(j["deltas"]["makespan"] == rep.makespan_delta);
  }
  SUBCASE("guarded traffic reports its queueing time") {
    Program p = assemble_or_throw(load_workload("mutex_counter.asm"));
    ComparisonReport rep = compare(p, grid_config(8, 8));
    CHECK(rep.memory_equal);
    CHECK(rep.guard_wait_cycles > 0);
  }
}

TEST_CASE("single cell grid runs register programs on its lone head") {
  Program p = assemble_or_throw("LI r1, 3\nMUL r2, r1, r1\nHALT\n");
  RunResult r = run(p, grid_config(1, 1));
  CHECK(r.status == RunStatus::Completed);
  CHECK(r.final_state.root_regs[2] == 9);
}

TEST_CASE("interleaved reads through one head pair each reply to its reader") {
  // Two children read different addresses at overlapping times; the head
  // relays both request/reply pairs without mixing them up.
  Program p = assemble_or_throw(
      "main:\n"
      "    LI r1, 200\n"
      "    QCREATE r2, first, {r1}, {r4}\n"
      "    LI r1, 300\n"
      "    QCREATE r3, second, {r1}, {r6}\n"
      "    QWAIT r2\n"
      "    QCLONE {r4}\n"
      "    QWAIT r3\n"
      "    QCLONE {r6}\n"
      "    HALT\n"
      "first:\n"
      "    LD r4, [r1]\n"
      "    QEND\n"
      "second:\n"
      "    LD r6, [r1]\n"
      "    QEND\n");
  SimConfig cfg = grid_config(8, 8);
  cfg.memory_init = {{200, 111}, {300, 222}};
  RunResult r = run(p, cfg);
  CHECK(r.status == RunStatus::Completed);
  CHECK(r.final_state.root_regs[4] == 111);
  CHECK(r.final_state.root_regs[6] == 222);
  CHECK(r.metrics.memory_ops == 2);
  CHECK(count_diags_containing(r, "") == 0);
}

TEST_CASE("message counts balance: one activation and one result per spawn") {
  // Conservation, replayed from the log of a completed run: every child
  // was activated by exactly one create message and reported back with
  // exactly one result; finishing at all proves each was delivered, since
  // an undelivered one leaves the parent blocked forever.
  Program p = assemble_or_throw(load_workload("fib.asm"));
  RunResult r = run(p, grid_config(8, 8));
  REQUIRE(r.status == RunStatus::Completed);
  int64_t creates = 0, results = 0, starts = 0, sends = 0, nacks = 0;
  for (const LogEvent& e : r.log) {
    if (e.kind == LogKind::Message) {
      ++sends;
      if (e.text == "qt_create") ++creates;
      if (e.text == "qt_result") ++results;
    }
    if (e.kind == LogKind::QtStart) ++starts;
    if (e.kind == LogKind::Nack) ++nacks;
  }
  CHECK(creates == r.metrics.qt_count);
  CHECK(results == r.metrics.qt_count);
  CHECK(starts == r.metrics.qt_count + 1);  // the entry thread needs no message
  CHECK(sends == r.metrics.messages);
  CHECK(nacks == 0);
}

TEST_CASE("a core never has two management instructions in flight") {
  Program p = assemble_or_throw(load_workload("mutex_counter.asm"));
  RunResult r = run(p, grid_config(8, 8));
  REQUIRE(r.status == RunStatus::Completed);
  std::map<int, int64_t> outstanding;  // core -> submits not yet dispatched
  int64_t submits = 0;
  for (const LogEvent& e : r.log) {
    if (e.kind == LogKind::Submit) {
      CHECK(outstanding[e.core] == 0);
      ++outstanding[e.core];
      ++submits;
    } else if (e.kind == LogKind::Dispatch) {
      CHECK(outstanding[e.core] == 1);
      --outstanding[e.core];
    }
  }
  for (const auto& [core, n] : outstanding) CHECK(n == 0);
  CHECK(submits > 1000);
}

TEST_SUITE_END();
