// Event-driven simulator core: configuration, metrics, the event log, and
// the Simulation class that advances a program over the clustered grid.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "empa/core.hpp"
#include "empa/isa.hpp"
#include "empa/messaging.hpp"
#include "empa/processor.hpp"
#include "empa/topology.hpp"

namespace empa {

struct SimConfig {
  int grid_width = 8;
  int grid_height = 8;
  int64_t cycle_per_instr = 1;
  int64_t hop_cost = 3;
  int64_t memory_latency = 100;
  int64_t meta_dispatch_cost = 5;
  int64_t memory_size = 1 << 20;
  int64_t stack_words = 4096;  // baseline interpreter's stack region
  int64_t cycle_cap = 10'000'000;
  int64_t result_delay = 0;  // extra delay on returned results (testing)
  std::vector<CoreId> denied;
  std::vector<std::pair<int64_t, int64_t>> memory_init;  // address, value
};

// JSON round-trip for configs; parse errors throw std::runtime_error with
// a line-free message and unknown keys are rejected.
SimConfig config_from_json(const std::string& text);
std::string config_to_json(const SimConfig& config);

enum class RunStatus { Completed, ConfigError, Deadlock, CycleCapExceeded };

int exit_code_of(RunStatus status);
std::string_view run_status_name(RunStatus status);

struct PerCoreMetrics {
  CoreId core = 0;
  int64_t energy = 0;
  int64_t instructions = 0;
  int64_t qts_hosted = 0;
};

struct Metrics {
  int64_t makespan = 0;
  int64_t energy = 0;  // total busy cycles across cores
  int64_t messages = 0;
  int64_t hops = 0;
  int64_t memory_ops = 0;
  int64_t stack_memory_ops = 0;  // subset of memory_ops used for call spill
  int64_t qt_count = 0;          // hired quasi-threads (root not counted)
  int64_t max_live_qts = 0;      // peak concurrently live, root included
  int64_t last_qt_start = 0;     // when the final quasi-thread began
  int64_t pool_exhaustion = 0;   // spawns that had to wait for a free core
  std::vector<PerCoreMetrics> per_core;
};

std::string metrics_to_json(const Metrics& metrics);

enum class LogKind : uint8_t {
  Hire,
  Release,
  Dispatch,
  Submit,
  Guard,
  Message,
  Memory,
  QtStart,
  Pool,
  Nack,
  Diag,
};

std::string_view log_kind_name(LogKind kind);

// One event-log record. The numeric slots mean different things per kind;
// serialization names them in the detail object.
struct LogEvent {
  int64_t t = 0;
  LogKind kind = LogKind::Diag;
  int core = 0;
  int qt = 0;
  int64_t a = 0;
  int64_t b = 0;
  int64_t c = 0;
  std::string text;
};

std::string log_event_to_json(const LogEvent& event);

struct FinalState {
  std::array<int64_t, kRegisterCount> root_regs{};
  std::map<int64_t, int64_t> memory;

  bool operator==(const FinalState&) const = default;
};

struct RunResult {
  RunStatus status = RunStatus::Completed;
  Metrics metrics;
  FinalState final_state;
  std::vector<LogEvent> log;
  std::vector<std::string> problems;  // config/deadlock explanations

  int exit_code() const { return exit_code_of(status); }
};

// Deterministic sample of denied cores; heads can be kept out of the draw.
std::vector<CoreId> random_denied_set(const Grid& grid, double fraction,
                                      uint64_t seed, bool exclude_heads);

class Simulation {
 public:
  Simulation(Program program, SimConfig config);
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;

  // Processes the next event. False once the run has ended (normally or
  // otherwise); status() then says how.
  bool step();

  bool finished() const;
  RunStatus status() const;
  int64_t now() const;                       // time of the last event
  std::optional<int64_t> next_time() const;  // time of the next event
  const Core& core_at(CoreId id) const;
  const std::vector<Core>& cores() const;
  int64_t live_qts() const;

  // Drops a message into the network as if src had sent it; a denied or
  // unreachable destination bounces it back as a NACK log event.
  void inject_message(Message message);

  RunResult take_result();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

RunResult run(const Program& program, const SimConfig& config);

// Single-processor reference: same source, spawns become stack calls.
RunResult run_spa_baseline(const Program& program, const SimConfig& config);

// Both machines side by side. Ratios are baseline over clustered (so >1
// means the clustered run was quicker); a ratio whose both sides are zero
// reads as 1, and one with only a zero denominator is absent. The report
// computes, it does not judge.
struct ComparisonReport {
  RunResult empa;
  RunResult spa;
  bool final_state_equal = false;
  bool memory_equal = false;
  std::optional<double> makespan_ratio;
  std::optional<double> energy_ratio;
  std::optional<double> memory_ops_ratio;
  std::optional<double> stack_ops_ratio;
  int64_t makespan_delta = 0;    // baseline minus clustered
  int64_t energy_delta = 0;
  int64_t memory_ops_delta = 0;
  int64_t messages_delta = 0;
  int64_t guard_wait_cycles = 0;  // queueing time of guarded calls (clustered)
};

ComparisonReport compare(const Program& program, const SimConfig& config);
std::string comparison_to_json(const ComparisonReport& report);

}  // namespace empa
