#include <deque>
#include <map>

#include "empa/engine.hpp"
#include "json.hpp"

namespace empa {

namespace {

using ordered_json = nlohmann::ordered_json;

std::optional<double> ratio_of(int64_t baseline, int64_t clustered) {
  if (baseline == 0 && clustered == 0) return 1.0;
  if (clustered == 0) return std::nullopt;
  return double(baseline) / double(clustered);
}

// Cycles guarded calls spent between submission and admission, summed from
// the clustered run's log: the k-th admission for a requester pairs with
// its k-th guarded-call submission.
int64_t guard_wait_from_log(const std::vector<LogEvent>& log) {
  std::map<int, std::deque<int64_t>> submits;
  int64_t wait = 0;
  for (const LogEvent& e : log) {
    if (e.kind == LogKind::Submit && e.text == "QCALLG")
      submits[e.qt].push_back(e.t);
    if (e.kind == LogKind::Guard && e.text == "enter") {
      auto it = submits.find(int(e.c));
      if (it == submits.end() || it->second.empty()) continue;
      wait += e.t - it->second.front();
      it->second.pop_front();
    }
  }
  return wait;
}

}  // namespace

ComparisonReport compare(const Program& program, const SimConfig& config) {
  ComparisonReport report;
  report.empa = run(program, config);
  report.spa = run_spa_baseline(program, config);
  report.final_state_equal =
      report.empa.final_state == report.spa.final_state;
  report.memory_equal =
      report.empa.final_state.memory == report.spa.final_state.memory;
  const Metrics& e = report.empa.metrics;
  const Metrics& s = report.spa.metrics;
  report.makespan_ratio = ratio_of(s.makespan, e.makespan);
  report.energy_ratio = ratio_of(s.energy, e.energy);
  report.memory_ops_ratio = ratio_of(s.memory_ops, e.memory_ops);
  report.stack_ops_ratio = ratio_of(s.stack_memory_ops, e.stack_memory_ops);
  report.makespan_delta = s.makespan - e.makespan;
  report.energy_delta = s.energy - e.energy;
  report.memory_ops_delta = s.memory_ops - e.memory_ops;
  report.messages_delta = s.messages - e.messages;
  report.guard_wait_cycles = guard_wait_from_log(report.empa.log);
  return report;
}

std::string comparison_to_json(const ComparisonReport& r) {
  ordered_json j;
  j["empa"] = ordered_json::parse(metrics_to_json(r.empa.metrics));
  j["empa"]["status"] = run_status_name(r.empa.status);
  j["spa"] = ordered_json::parse(metrics_to_json(r.spa.metrics));
  j["spa"]["status"] = run_status_name(r.spa.status);
  j["final_state_equal"] = r.final_state_equal;
  j["memory_equal"] = r.memory_equal;
  ordered_json ratios;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) ratios[key] = *v;
    else ratios[key] = nullptr;
  };
  put("makespan", r.makespan_ratio);
  put("energy", r.energy_ratio);
  put("memory_ops", r.memory_ops_ratio);
  put("stack_memory_ops", r.stack_ops_ratio);
  j["ratios"] = std::move(ratios);
  ordered_json deltas;
  deltas["makespan"] = r.makespan_delta;
  deltas["energy"] = r.energy_delta;
  deltas["memory_ops"] = r.memory_ops_delta;
  deltas["messages"] = r.messages_delta;
  j["deltas"] = std::move(deltas);
  j["guard_wait_cycles"] = r.guard_wait_cycles;
  return j.dump(2);
}

}  // namespace empa
