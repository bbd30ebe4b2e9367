#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "empa/engine.hpp"

using namespace empa;
using ordered_json = nlohmann::ordered_json;

namespace {

struct ConfigFlags {
  std::string config_path;
  std::string grid;
  std::string denied;
  std::vector<std::string> pokes;
  int64_t hop_cost = -1;
  int64_t memory_latency = -1;
  int64_t meta_dispatch_cost = -1;
  int64_t cycle_per_instr = -1;
  int64_t cycle_cap = -1;
  int64_t memory_size = -1;
  int64_t stack_words = -1;
  int64_t result_delay = -1;
  uint64_t seed = 1;
};

void add_config_flags(CLI::App& cmd, ConfigFlags& f) {
  cmd.add_option("-c,--config", f.config_path,
                 "JSON config file (default: $EMPA_CONFIG if set)");
  cmd.add_option("--grid", f.grid, "grid size as WxH, e.g. 8x8");
  cmd.add_option("--hop-cost", f.hop_cost, "cycles per network hop");
  cmd.add_option("--memory-latency", f.memory_latency,
                 "cycles per memory access");
  cmd.add_option("--meta-cost", f.meta_dispatch_cost,
                 "dispatch cycles per management instruction");
  cmd.add_option("--cycle-per-instr", f.cycle_per_instr,
                 "cycles per plain instruction");
  cmd.add_option("--cap", f.cycle_cap, "simulated-cycle budget");
  cmd.add_option("--memory-size", f.memory_size, "words of main memory");
  cmd.add_option("--stack-words", f.stack_words,
                 "baseline stack region, words");
  cmd.add_option("--result-delay", f.result_delay,
                 "extra cycles on every returned result");
  cmd.add_option("--denied", f.denied,
                 "denied cores: id list '3,5,9', 'random:FRAC', "
                 "'random-nonhead:FRAC', or 'all-heads'");
  cmd.add_option("--seed", f.seed, "seed for the random denied draw");
  cmd.add_option("--poke", f.pokes,
                 "preset a memory word before the run, ADDR=VALUE")
      ->take_all();
}

// File first (or $EMPA_CONFIG), then explicit flags on top.
SimConfig resolve_config(const ConfigFlags& f) {
  SimConfig cfg;
  std::string path = f.config_path;
  if (path.empty())
    if (const char* env = std::getenv("EMPA_CONFIG")) path = env;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = config_from_json(ss.str());
  }
  if (!f.grid.empty()) {
    int w = 0, h = 0;
    char x = 0;
    std::istringstream gs(f.grid);
    if (!(gs >> w >> x >> h) || (x != 'x' && x != 'X') || !gs.eof())
      throw std::runtime_error("--grid expects WxH, got '" + f.grid + "'");
    cfg.grid_width = w;
    cfg.grid_height = h;
  }
  if (f.hop_cost >= 0) cfg.hop_cost = f.hop_cost;
  if (f.memory_latency >= 0) cfg.memory_latency = f.memory_latency;
  if (f.meta_dispatch_cost >= 0) cfg.meta_dispatch_cost = f.meta_dispatch_cost;
  if (f.cycle_per_instr >= 0) cfg.cycle_per_instr = f.cycle_per_instr;
  if (f.cycle_cap >= 0) cfg.cycle_cap = f.cycle_cap;
  if (f.memory_size >= 0) cfg.memory_size = f.memory_size;
  if (f.stack_words >= 0) cfg.stack_words = f.stack_words;
  if (f.result_delay >= 0) cfg.result_delay = f.result_delay;

  for (const std::string& poke : f.pokes) {
    auto eq = poke.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--poke expects ADDR=VALUE, got '" + poke + "'");
    cfg.memory_init.emplace_back(std::stoll(poke.substr(0, eq)),
                                 std::stoll(poke.substr(eq + 1)));
  }

  if (!f.denied.empty()) {
    Grid grid{cfg.grid_width, cfg.grid_height};
    if (f.denied == "all-heads") {
      for (CoreId id = 0; id < grid.size(); ++id)
        if (is_head_cell(grid.axial_of(id))) cfg.denied.push_back(id);
    } else if (f.denied.rfind("random:", 0) == 0) {
      cfg.denied = random_denied_set(grid, std::stod(f.denied.substr(7)),
                                     f.seed, false);
    } else if (f.denied.rfind("random-nonhead:", 0) == 0) {
      cfg.denied = random_denied_set(grid, std::stod(f.denied.substr(15)),
                                     f.seed, true);
    } else {
      std::istringstream ds(f.denied);
      std::string tok;
      while (std::getline(ds, tok, ','))
        if (!tok.empty()) cfg.denied.push_back(std::stoi(tok));
    }
  }
  return cfg;
}

Program load_program(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  AssemblyResult res = assemble(ss.str());
  if (!res.program) {
    for (const Diagnostic& d : res.diagnostics)
      std::cerr << path << ": " << d.to_string() << "\n";
    throw std::runtime_error("assembly failed");
  }
  DiagnosticList faults = validate(*res.program);
  for (const Diagnostic& d : faults)
    std::cerr << path << ": " << d.to_string() << "\n";
  if (!faults.empty()) throw std::runtime_error("validation failed");
  return *res.program;
}

void write_trace(const std::string& path, const std::vector<LogEvent>& log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file " + path);
  for (const LogEvent& e : log) out << log_event_to_json(e) << "\n";
}

void summarize(const char* label, const RunResult& r) {
  const Metrics& m = r.metrics;
  std::cerr << label << ": " << run_status_name(r.status)
            << "  makespan=" << m.makespan << "  energy=" << m.energy
            << "  messages=" << m.messages << "  memory_ops=" << m.memory_ops
            << "  qt_count=" << m.qt_count
            << "  max_live=" << m.max_live_qts << "\n";
  for (const std::string& p : r.problems) std::cerr << "  " << p << "\n";
}

int cmd_asm(const std::string& input, bool json) {
  std::ifstream in(input);
  if (!in) {
    std::cerr << "cannot open " << input << "\n";
    return 1;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  AssemblyResult res = assemble(ss.str());
  DiagnosticList faults = res.diagnostics;
  if (res.program) {
    DiagnosticList v = validate(*res.program);
    faults.insert(faults.end(), v.begin(), v.end());
  }
  if (!faults.empty() || !res.program) {
    for (const Diagnostic& d : faults) std::cerr << d.to_string() << "\n";
    return 1;
  }
  const Program& p = *res.program;
  if (json) {
    ordered_json j;
    j["entry"] = p.fragments[size_t(p.entry)].name;
    ordered_json frags = ordered_json::array();
    for (size_t i = 0; i < p.fragments.size(); ++i) {
      ordered_json fj;
      fj["index"] = i;
      fj["name"] = p.fragments[i].name;
      fj["instructions"] = p.fragments[i].body.size();
      frags.push_back(std::move(fj));
    }
    j["fragments"] = std::move(frags);
    j["listing"] = disassemble(p);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cerr << "fragment  index  instructions\n";
    for (size_t i = 0; i < p.fragments.size(); ++i)
      std::cerr << p.fragments[i].name << "  " << i << "  "
                << p.fragments[i].body.size() << "\n";
    std::cout << disassemble(p);
  }
  return 0;
}

int cmd_run(const std::string& input, const ConfigFlags& flags,
            const std::string& trace, bool baseline) {
  Program program = load_program(input);
  SimConfig cfg = resolve_config(flags);
  RunResult r =
      baseline ? run_spa_baseline(program, cfg) : run(program, cfg);
  std::cout << metrics_to_json(r.metrics) << "\n";
  summarize(baseline ? "baseline" : "run", r);
  if (!trace.empty()) write_trace(trace, r.log);
  return r.exit_code();
}

int cmd_compare(const std::string& input, const ConfigFlags& flags,
                const std::string& trace) {
  Program program = load_program(input);
  SimConfig cfg = resolve_config(flags);
  ComparisonReport rep = compare(program, cfg);
  std::cout << comparison_to_json(rep) << "\n";
  summarize("clustered", rep.empa);
  summarize("baseline", rep.spa);
  if (!trace.empty()) write_trace(trace, rep.empa.log);
  int code = rep.empa.exit_code();
  return code != 0 ? code : rep.spa.exit_code();
}

int cmd_sweep(const std::string& input, const ConfigFlags& flags,
              int64_t address, const std::vector<int64_t>& values,
              int workers) {
  Program program = load_program(input);
  SimConfig base = resolve_config(flags);
  struct Row {
    int64_t value = 0;
    RunResult empa;
    RunResult spa;
  };
  std::vector<Row> rows(values.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < values.size();
         i = next.fetch_add(1)) {
      SimConfig cfg = base;
      cfg.memory_init.emplace_back(address, values[i]);
      rows[i].value = values[i];
      rows[i].empa = run(program, cfg);
      rows[i].spa = run_spa_baseline(program, cfg);
    }
  };
  int n = std::max(1, workers);
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  std::cout << "value,qt_count,makespan,energy,last_qt_start,messages,"
               "baseline_makespan,baseline_energy,baseline_last_qt_start,"
               "baseline_stack_memory_ops,status,baseline_status\n";
  int code = 0;
  for (const Row& row : rows) {
    const Metrics& e = row.empa.metrics;
    const Metrics& s = row.spa.metrics;
    std::cout << row.value << "," << e.qt_count << "," << e.makespan << ","
              << e.energy << "," << e.last_qt_start << "," << e.messages << ","
              << s.makespan << "," << s.energy << "," << s.last_qt_start << ","
              << s.stack_memory_ops << "," << run_status_name(row.empa.status)
              << "," << run_status_name(row.spa.status) << "\n";
    if (code == 0) code = row.empa.exit_code();
    if (code == 0) code = row.spa.exit_code();
  }
  return code;
}

int cmd_topology(const std::string& grid_arg, bool json) {
  int w = 8, h = 8;
  if (!grid_arg.empty()) {
    char x = 0;
    std::istringstream gs(grid_arg);
    if (!(gs >> w >> x >> h) || (x != 'x' && x != 'X') || !gs.eof())
      throw std::runtime_error("--grid expects WxH, got '" + grid_arg + "'");
  }
  if (w < 1 || h < 1) throw std::runtime_error("grid must be at least 1x1");
  Grid grid{w, h};
  Clustering clustering(grid);
  ordered_json out = ordered_json::array();
  if (!json) std::cout << "id\tx\ty\tq\tr\tcluster\tslot\taddress\tclass\n";
  for (CoreId id = 0; id < grid.size(); ++id) {
    auto [x, y] = grid.xy_of(id);
    Axial ax = grid.axial_of(id);
    int cluster = clustering.cluster_of(id);
    int slot = clustering.slot_of(id);
    uint32_t address = clustering.encode_address(id);
    const char* cls = slot == 0 ? "head" : "ordinary";
    if (json) {
      ordered_json row;
      row["id"] = id;
      row["x"] = x;
      row["y"] = y;
      row["q"] = ax.q;
      row["r"] = ax.r;
      row["cluster"] = cluster;
      row["slot"] = slot;
      row["address"] = address;
      row["class"] = cls;
      out.push_back(std::move(row));
    } else {
      std::cout << id << "\t" << x << "\t" << y << "\t" << ax.q << "\t" << ax.r
                << "\t" << cluster << "\t" << slot << "\t" << address << "\t"
                << cls << "\n";
    }
  }
  if (json) std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clustered many-core simulator"};
  app.require_subcommand(1);

  std::string input, trace, grid_arg;
  bool json = false, baseline = false;
  ConfigFlags flags;
  int64_t poke_address = 0;
  std::vector<int64_t> sweep_values;
  int workers = 1;

  CLI::App* asm_cmd = app.add_subcommand("asm", "assemble and list a program");
  asm_cmd->add_option("input", input, "assembly source")->required();
  asm_cmd->add_flag("--json", json, "machine-readable symbol table");

  CLI::App* run_cmd = app.add_subcommand("run", "simulate a program");
  run_cmd->add_option("input", input, "assembly source")->required();
  run_cmd->add_option("--trace", trace, "write the event log here, JSONL");
  run_cmd->add_flag("--baseline", baseline,
                    "run the single-core reference instead");
  add_config_flags(*run_cmd, flags);

  CLI::App* cmp_cmd =
      app.add_subcommand("compare", "run both machines and report the gap");
  cmp_cmd->add_option("input", input, "assembly source")->required();
  cmp_cmd->add_option("--trace", trace, "write the clustered event log here");
  add_config_flags(*cmp_cmd, flags);

  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "rerun with a memory word swept over a value list, CSV out");
  sweep_cmd->add_option("input", input, "assembly source")->required();
  sweep_cmd->add_option("--poke-address", poke_address,
                        "memory word the sweep writes");
  sweep_cmd->add_option("--values", sweep_values, "sweep values")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--workers", workers, "parallel simulations");
  add_config_flags(*sweep_cmd, flags);

  CLI::App* topo_cmd =
      app.add_subcommand("topology", "per-core cluster table");
  topo_cmd->add_option("--grid", grid_arg, "grid size as WxH");
  topo_cmd->add_flag("--json", json, "JSON rows instead of the tab table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (asm_cmd->parsed()) return cmd_asm(input, json);
    if (run_cmd->parsed()) return cmd_run(input, flags, trace, baseline);
    if (cmp_cmd->parsed()) return cmd_compare(input, flags, trace);
    if (sweep_cmd->parsed())
      return cmd_sweep(input, flags, poke_address, sweep_values, workers);
    if (topo_cmd->parsed()) return cmd_topology(grid_arg, json);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 1;
}
