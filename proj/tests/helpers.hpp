#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "empa/isa.hpp"

namespace empa::test {

inline std::filesystem::path workloads_dir() {
  return std::filesystem::path(EMPA_WORKLOADS_DIR);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string load_workload(const std::string& name) {
  return read_file(workloads_dir() / name);
}

// Assembles or throws with the collected diagnostics in the message, so a
// broken workload fails loudly instead of as a null-deref later.
inline Program assemble_or_throw(const std::string& source) {
  AssemblyResult result = assemble(source);
  if (!result.ok()) {
    std::string msg = "assembly failed:";
    for (const auto& d : result.diagnostics) msg += "\n  " + d.to_string();
    throw std::runtime_error(msg);
  }
  return *result.program;
}

inline std::vector<std::filesystem::path> workload_files() {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(workloads_dir()))
    if (entry.path().extension() == ".asm") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace empa::test
