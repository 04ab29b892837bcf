#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "kga/model.hpp"

namespace kga::bench {

struct BenchConfig {
  std::uint64_t seed = 0;
  int n_classes = 0;
  int branching = 4;             // max children per class
  double label_noise = 0.1;      // per-label perturbation probability
  double edge_delete_rate = 0.05;  // per-edge deletion probability (target side)
  int n_conflicts = 0;

  void validate() const;
};

struct BenchResult {
  KnowledgeGraph source;
  KnowledgeGraph target;
  Alignment ground_truth;               // 1:1 counterpart pairs, ≡, c = 1
  std::vector<MappingKey> conflict_keys;  // two per planted conflict, sorted
};

/// Deterministic synthetic benchmark: a random tree taxonomy, a perturbed
/// copy, and planted disjointness conflicts in which both counterpart
/// mappings are correct yet jointly unsatisfiable.
BenchResult generate(const BenchConfig& cfg);

/// Writes source.ttl, target.ttl, reference.tsv and manifest.tsv.
void write_bench(const BenchResult& result, const std::filesystem::path& dir);

/// Parses a manifest.tsv (source<TAB>target<TAB>rel per line).
std::vector<MappingKey> read_manifest(const std::filesystem::path& file);

}  // namespace kga::bench
