#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kga/reasoner.hpp"
#include "kga/selector.hpp"

namespace kga::report {

struct InputDigest {
  std::string role;  // "source", "target", "alignment", ...
  std::string path;
  std::string digest;  // "fnv1a64:<hex>"
};

/// Structured run record; rendered as the key-value + tabular text format
/// described in docs/formats.md. Deterministic except for the timing line.
struct RunReport {
  std::string tool_version;
  std::string command;
  std::vector<InputDigest> inputs;
  std::vector<std::pair<std::string, std::string>> config;  // ordered
  std::vector<selector::ScoredMapping> mappings;
  std::vector<reasoner::UnsatReport> unsat;
  std::vector<MappingKey> mapping_keys;  // index space of the unsat reports
  double objective = 0.0;
  bool truncated = false;
  bool hit_iteration_cap = false;
  std::int64_t timing_ms = 0;
};

std::string render(const RunReport& r);

std::uint64_t fnv1a64(std::string_view data);
std::string file_digest(const std::filesystem::path& file);

}  // namespace kga::report
