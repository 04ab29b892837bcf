#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "kga/model.hpp"
#include "kga/reasoner.hpp"

namespace kga::selector {

enum class Mode { Hard, Threshold, Soft, None };

std::string_view to_string(Mode m);
std::optional<Mode> mode_from_string(std::string_view name);

struct SelectorConfig {
  Mode mode = Mode::Hard;
  double theta = 0.7;          // Threshold mode: consistency-check exemption
  int cardinality_t = 1;       // per-entity cap on accepted mappings
  double gamma = 0.0;          // Soft mode: acceptance floor on scores
  int max_soft_iterations = 10;
  std::size_t j_cap = 16;

  void validate() const;
};

enum class MappingStatus {
  Accepted,
  RejectedCardinality,
  RejectedInconsistent,
  RejectedFloor
};

std::string_view to_string(MappingStatus s);

struct ScoredMapping {
  Mapping mapping;
  double objective_score = 0.0;
  MappingStatus status = MappingStatus::Accepted;
  /// For RejectedInconsistent: the minimal mapping sets whose joint
  /// acceptance would make a concept unsatisfiable (report payload).
  std::vector<std::vector<MappingKey>> conflicts;
};

struct SelectionResult {
  Alignment accepted;
  std::vector<ScoredMapping> records;    // sorted by mapping key
  reasoner::ClosureResult final_closure;  // over the accepted alignment
  bool hit_iteration_cap = false;  // Soft mode stopped with scores below gamma
  bool truncated = false;          // some closure run hit j_cap
};

/// Greedy selection in (confidence desc, source, target, relation) order
/// under the configured objective. See docs/formats.md for the report
/// rendering of the per-mapping records.
SelectionResult select(const KnowledgeGraph& kg1, const KnowledgeGraph& kg2,
                       const Alignment& candidates, const SelectorConfig& cfg);

/// Exhaustive optimum of the hard objective (consistent, cardinality-feasible
/// subset of maximal summed confidence). Only for small inputs; throws when
/// candidates.size() > 20.
SelectionResult select_exact_hard(const KnowledgeGraph& kg1,
                                  const KnowledgeGraph& kg2,
                                  const Alignment& candidates,
                                  const SelectorConfig& cfg);

/// Sum of objective_score over accepted records.
double objective_value(const std::vector<ScoredMapping>& records);

}  // namespace kga::selector
