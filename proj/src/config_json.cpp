#include <stdexcept>

#include "empa/engine.hpp"
#include "json.hpp"

namespace empa {

using ordered_json = nlohmann::ordered_json;

SimConfig config_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw std::runtime_error(std::string("config is not valid JSON: ") +
                             e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config must be a JSON object");

  SimConfig cfg;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const ordered_json& v = it.value();
    try {
      if (key == "grid_width") cfg.grid_width = v.get<int>();
      else if (key == "grid_height") cfg.grid_height = v.get<int>();
      else if (key == "cycle_per_instr") cfg.cycle_per_instr = v.get<int64_t>();
      else if (key == "hop_cost") cfg.hop_cost = v.get<int64_t>();
      else if (key == "memory_latency") cfg.memory_latency = v.get<int64_t>();
      else if (key == "meta_dispatch_cost")
        cfg.meta_dispatch_cost = v.get<int64_t>();
      else if (key == "memory_size") cfg.memory_size = v.get<int64_t>();
      else if (key == "stack_words") cfg.stack_words = v.get<int64_t>();
      else if (key == "cycle_cap") cfg.cycle_cap = v.get<int64_t>();
      else if (key == "result_delay") cfg.result_delay = v.get<int64_t>();
      else if (key == "denied") cfg.denied = v.get<std::vector<CoreId>>();
      else if (key == "memory_init") {
        if (!v.is_array())
          throw std::runtime_error("memory_init must be an array");
        cfg.memory_init.clear();
        for (const ordered_json& pair : v) {
          if (!pair.is_array() || pair.size() != 2)
            throw std::runtime_error(
                "memory_init entries must be [address, value]");
          cfg.memory_init.emplace_back(pair[0].get<int64_t>(),
                                       pair[1].get<int64_t>());
        }
      } else {
        throw std::runtime_error("unknown config key '" + key + "'");
      }
    } catch (const ordered_json::exception&) {
      throw std::runtime_error("config key '" + key + "' has the wrong type");
    }
  }
  return cfg;
}

std::string config_to_json(const SimConfig& cfg) {
  ordered_json j;
  j["grid_width"] = cfg.grid_width;
  j["grid_height"] = cfg.grid_height;
  j["cycle_per_instr"] = cfg.cycle_per_instr;
  j["hop_cost"] = cfg.hop_cost;
  j["memory_latency"] = cfg.memory_latency;
  j["meta_dispatch_cost"] = cfg.meta_dispatch_cost;
  j["memory_size"] = cfg.memory_size;
  j["stack_words"] = cfg.stack_words;
  j["cycle_cap"] = cfg.cycle_cap;
  j["result_delay"] = cfg.result_delay;
  j["denied"] = cfg.denied;
  ordered_json init = ordered_json::array();
  for (auto [address, value] : cfg.memory_init)
    init.push_back(ordered_json::array({address, value}));
  j["memory_init"] = std::move(init);
  return j.dump(2);
}

std::string metrics_to_json(const Metrics& m) {
  ordered_json j;
  j["makespan"] = m.makespan;
  j["energy"] = m.energy;
  j["messages"] = m.messages;
  j["hops"] = m.hops;
  j["memory_ops"] = m.memory_ops;
  j["stack_memory_ops"] = m.stack_memory_ops;
  j["qt_count"] = m.qt_count;
  j["max_live_qts"] = m.max_live_qts;
  j["last_qt_start"] = m.last_qt_start;
  j["pool_exhaustion"] = m.pool_exhaustion;
  ordered_json per_core = ordered_json::array();
  for (const PerCoreMetrics& pc : m.per_core) {
    ordered_json row;
    row["core"] = pc.core;
    row["energy"] = pc.energy;
    row["instructions"] = pc.instructions;
    row["qts_hosted"] = pc.qts_hosted;
    per_core.push_back(std::move(row));
  }
  j["per_core"] = std::move(per_core);
  return j.dump(2);
}

std::string log_event_to_json(const LogEvent& e) {
  ordered_json j;
  j["t"] = e.t;
  j["kind"] = log_kind_name(e.kind);
  j["core"] = e.core;
  j["qt"] = e.qt;
  ordered_json d;
  switch (e.kind) {
    case LogKind::Hire:
      d["parent_qt"] = e.a;
      d["pool_size"] = e.b;
      d["from_queue"] = (e.c & 1) != 0;
      d["guard"] = (e.c & 2) != 0;
      break;
    case LogKind::Release:
      d["pool_size"] = e.a;
      d["to_pool"] = e.b != 0;
      break;
    case LogKind::Dispatch:
      d["op"] = e.text;
      d["class"] = meta_class_name(MetaClass(e.a));
      d["seq"] = e.b;
      d["submit_t"] = e.c;
      break;
    case LogKind::Submit:
      d["op"] = e.text;
      d["class"] = meta_class_name(MetaClass(e.a));
      d["seq"] = e.b;
      break;
    case LogKind::Guard:
      d["action"] = e.text;
      d["guard"] = e.a;
      d["fragment"] = e.b;
      d["requester_qt"] = e.c;
      break;
    case LogKind::Message:
      d["kind"] = e.text;
      d["dst"] = e.a;
      d["hops"] = e.b;
      break;
    case LogKind::Memory:
      d["op"] = e.text;
      d["address"] = e.a;
      d["value"] = e.b;
      d["cause"] = e.c != 0 ? "stack" : "program";
      break;
    case LogKind::QtStart:
      d["fragment"] = e.a;
      break;
    case LogKind::Pool:
      d["action"] = e.text;
      d["child_qt"] = e.a;
      break;
    case LogKind::Nack:
      d["dst"] = e.a;
      break;
    case LogKind::Diag:
      d["text"] = e.text;
      break;
  }
  j["detail"] = std::move(d);
  return j.dump();
}

}  // namespace empa
