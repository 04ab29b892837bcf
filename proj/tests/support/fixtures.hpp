#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "kga/model.hpp"

namespace kga_test {

inline kga::Iri fma(const std::string& local) {
  return kga::Iri{"http://kga.example/fma#" + local};
}

inline kga::Iri nci(const std::string& local) {
  return kga::Iri{"http://kga.example/nci#" + local};
}

/// Source side of the lymphokine fixture: Lymphokine ⊑ Protein.
inline kga::KnowledgeGraph fma_graph() {
  using namespace kga;
  std::vector<Entity> entities = {
      make_entity(fma("Protein"), EntityKind::Class, {{"Protein", {}}}),
      make_entity(fma("Lymphokine"), EntityKind::Class, {{"Lymphokine", {}}}),
  };
  std::vector<Axiom> axioms = {
      Axiom::sub_class_of(fma("Lymphokine"), fma("Protein")),
  };
  return KnowledgeGraph::build("fma", std::move(entities), std::move(axioms));
}

/// Target side: Therapeutic_Lymphokine ⊑ Pharmacologic_Substance, which is
/// disjoint from Protein.
inline kga::KnowledgeGraph nci_graph() {
  using namespace kga;
  std::vector<Entity> entities = {
      make_entity(nci("Protein"), EntityKind::Class, {{"Protein", {}}}),
      make_entity(nci("Pharmacologic_Substance"), EntityKind::Class,
                  {{"Pharmacologic_Substance", {}}}),
      make_entity(nci("Therapeutic_Lymphokine"), EntityKind::Class,
                  {{"Therapeutic_Lymphokine", {}}}),
  };
  std::vector<Axiom> axioms = {
      Axiom::sub_class_of(nci("Therapeutic_Lymphokine"),
                          nci("Pharmacologic_Substance")),
      Axiom::disjoint_with(nci("Protein"), nci("Pharmacologic_Substance")),
  };
  return KnowledgeGraph::build("nci", std::move(entities), std::move(axioms));
}

inline kga::Mapping mapping_m1() {
  return {fma("Protein"), nci("Protein"), kga::Relation::Equivalent, 1.0};
}

inline kga::Mapping mapping_m2() {
  return {fma("Lymphokine"), nci("Therapeutic_Lymphokine"),
          kga::Relation::Equivalent, 0.5};
}

inline kga::Alignment lymphokine_alignment() {
  kga::Alignment a;
  a.add(mapping_m1());
  a.add(mapping_m2());
  return a;
}

inline std::filesystem::path fixtures_dir() {
  const char* env = std::getenv("KGA_FIXTURES");
  if (env != nullptr) return env;
  return std::filesystem::path(__FILE__).parent_path().parent_path() /
         "fixtures";
}

inline std::string cli_path() {
  const char* env = std::getenv("KGA_CLI");
  return env == nullptr ? std::string{} : std::string(env);
}

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    std::random_device rd;
    auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0; attempt < 64; ++attempt) {
      auto candidate = base / ("kga_test_" + std::to_string(rd()));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path = candidate;
        return;
      }
    }
    throw std::runtime_error("cannot create temp dir");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path file(const std::string& name) const {
    return path / name;
  }
};

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr merged
};

inline CommandResult run_cli(const std::string& args) {
  CommandResult result;
  std::string cmd = cli_path() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return result;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) {
    result.output.append(buf, n);
  }
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

}  // namespace kga_test
