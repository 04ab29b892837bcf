#include "kga/report.hpp"

#include <fstream>
#include <sstream>

#include "kga/ingest.hpp"

namespace kga::report {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string file_digest(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return "fnv1a64:unreadable";
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string content = buffer.str();
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(content)));
  return std::string("fnv1a64:") + hex;
}

namespace {

std::string justification_text(const std::vector<MappingKey>& keys) {
  std::string out = "{";
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i > 0) out += "; ";
    out += keys[i].to_string();
  }
  out += "}";
  return out;
}

}  // namespace

std::string render(const RunReport& r) {
  std::ostringstream out;
  out << "# kga run report\n";
  out << "version\t" << r.tool_version << "\n";
  out << "command\t" << r.command << "\n";
  for (const InputDigest& input : r.inputs) {
    out << "input\t" << input.role << "\t" << input.path << "\t"
        << input.digest << "\n";
  }
  for (const auto& [key, value] : r.config) {
    out << "config\t" << key << "\t" << value << "\n";
  }
  out << "objective\t" << ingest::format_confidence(r.objective) << "\n";
  out << "truncated\t" << (r.truncated ? "true" : "false") << "\n";
  out << "iteration-cap-hit\t" << (r.hit_iteration_cap ? "true" : "false")
      << "\n";
  out << "timing-ms\t" << r.timing_ms << "\n";

  out << "[mappings]\n";
  out << "source\ttarget\trel\tconfidence\tscore\tstatus\tconflicts\n";
  for (const selector::ScoredMapping& sm : r.mappings) {
    out << sm.mapping.source.str() << "\t" << sm.mapping.target.str() << "\t"
        << relation_symbol(sm.mapping.relation) << "\t"
        << ingest::format_confidence(sm.mapping.confidence) << "\t"
        << ingest::format_confidence(sm.objective_score) << "\t"
        << to_string(sm.status) << "\t";
    for (std::size_t i = 0; i < sm.conflicts.size(); ++i) {
      if (i > 0) out << " ";
      out << justification_text(sm.conflicts[i]);
    }
    out << "\n";
  }

  out << "[unsat]\n";
  out << "concept\tjustifications\n";
  for (const reasoner::UnsatReport& report : r.unsat) {
    out << report.concept_iri.str() << "\t";
    for (std::size_t j = 0; j < report.justifications.size(); ++j) {
      if (j > 0) out << " ";
      std::vector<MappingKey> keys;
      keys.reserve(report.justifications[j].size());
      for (std::uint32_t idx : report.justifications[j]) {
        keys.push_back(r.mapping_keys[idx]);
      }
      out << justification_text(keys);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace kga::report
