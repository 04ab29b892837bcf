#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "kga/model.hpp"

namespace kga::reasoner {

/// Sorted mapping indices into ClosureResult::mapping_keys. The empty set
/// stands for an axiom-only derivation.
using SupportSet = std::vector<std::uint32_t>;

/// A derived fact sub ⊑* sup together with every minimal set of mappings
/// that suffices to derive it (an antichain; the empty set, when present,
/// is the sole element).
struct DerivedSubsumption {
  Iri sub;
  Iri sup;
  std::vector<SupportSet> supports;
};

/// An unsatisfiable named concept with its minimal mapping justifications.
struct UnsatReport {
  Iri concept_iri;
  std::vector<SupportSet> justifications;
  SupportSet involved;  // union of the justifications
};

struct ClosureOptions {
  /// Cap on stored support sets per derived pair (and per justification
  /// antichain). Hitting it sets ClosureResult::truncated.
  std::size_t j_cap = 16;
};

struct ClosureResult {
  std::vector<MappingKey> mapping_keys;  // index space for SupportSet entries
  std::vector<DerivedSubsumption> subsumptions;  // sorted by (sub, sup)
  std::vector<UnsatReport> unsat;                // sorted by concept
  bool truncated = false;

  const DerivedSubsumption* find(const Iri& sub, const Iri& sup) const;
  bool derives(const Iri& sub, const Iri& sup) const {
    return find(sub, sup) != nullptr;
  }
  const UnsatReport* find_unsat(const Iri& concept_iri) const;
  std::optional<std::uint32_t> index_of(const MappingKey& key) const;

  /// Union of all reports' involved sets.
  SupportSet all_involved() const;
};

/// Prepared closure state for one graph pair; run() may be called many times
/// with different alignments (the selector leans on this).
class ClosureEngine {
 public:
  ClosureEngine(const KnowledgeGraph& kg1, const KnowledgeGraph& kg2);

  ClosureResult run(const Alignment& m, ClosureOptions opts = {}) const;

 private:
  const KnowledgeGraph* kg1_;
  const KnowledgeGraph* kg2_;
  std::vector<Iri> nodes_;  // sorted
  std::map<Iri, std::uint32_t> index_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> base_edges_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> disjoint_pairs_;
};

/// Reflexive-transitive subsumption closure over the aligned graph with
/// mapping provenance, plus unsatisfiability reports.
ClosureResult closure(const KnowledgeGraph& kg1, const KnowledgeGraph& kg2,
                      const Alignment& m, ClosureOptions opts = {});

/// True iff the mapping appears in at least one justification of at least
/// one unsat report. Throws KgaError for keys outside the closure's index.
bool involved(const MappingKey& key, const ClosureResult& cr);

/// 0 iff some mapping of `m` whose source or target is `e` is involved in an
/// unsatisfiability; 1 otherwise.
int consist(const Iri& e, const Alignment& m, const ClosureResult& cr);

/// Number of unsat reports whose involved mappings intersect the mappings
/// touching `e`.
std::size_t unsat_count(const Iri& e, const Alignment& m,
                        const ClosureResult& cr);

/// Graded consistency penalty 2 / (1 + e^bot): 1 at bot = 0, strictly
/// decreasing, limit 0.
double softconsist(std::uint64_t bot);

/// An atomic statement of a deductive difference: sub ⊑ sup, or sub ⊑ ⊥ when
/// sup is absent.
struct DiffStatement {
  Iri sub;
  std::optional<Iri> sup;

  auto operator<=>(const DiffStatement&) const = default;
  std::string to_string() const;
};

/// Atomic statements over sigma entailed by `b` but not by `a`:
/// non-reflexive subsumptions plus unsatisfiability markers.
std::vector<DiffStatement> deductive_diff(const std::vector<Axiom>& a,
                                          const std::vector<Axiom>& b,
                                          const std::vector<Iri>& sigma);

}  // namespace kga::reasoner
