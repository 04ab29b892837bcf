#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kga/model.hpp"

namespace kga::lexical {

enum class Metric { Levenshtein, JaroWinkler, Jaccard, Combined };
enum class Blocking { None, SharedToken };

std::string_view to_string(Metric m);
std::optional<Metric> metric_from_string(std::string_view name);
std::string_view to_string(Blocking b);
std::optional<Blocking> blocking_from_string(std::string_view name);

struct MatcherConfig {
  Metric metric = Metric::Combined;
  double candidate_threshold = 0.6;
  Blocking blocking = Blocking::SharedToken;
};

/// Result of the normalization pipeline: camelCase split, separator
/// replacement, punctuation removal, case folding, whitespace tokenization.
struct NormalizedName {
  std::string original;
  std::vector<std::string> tokens;
  std::string joined;  // tokens joined by single spaces

  bool operator==(const NormalizedName&) const = default;
};

NormalizedName normalize(std::string_view name);

/// 1 - editdistance(a,b) / max(|a|,|b|), over code points; 1 when both empty.
double levenshtein_sim(std::string_view a, std::string_view b);

/// Jaro similarity with match window floor(max/2)-1 plus the Winkler prefix
/// boost (p = 0.1, prefix capped at 4), clamped to [0,1].
double jaro_winkler_sim(std::string_view a, std::string_view b);

/// Token-set overlap |A ∩ B| / |A ∪ B|; 1 when both empty.
double jaccard_sim(const NormalizedName& a, const NormalizedName& b);

/// Max over all label pairs of the configured metric on normalized names
/// (Combined takes the max of all three metrics per pair). 0 when either
/// entity has no labels. Throws KgaError on kind mismatch.
double entity_similarity(const Entity& e1, const Entity& e2,
                         const MatcherConfig& cfg);

/// Emits Mapping(e1, e2, ≡, sim) for every same-kind pair with
/// sim ≥ cfg.candidate_threshold, optionally restricted to pairs sharing a
/// normalized token.
Alignment generate_candidates(const KnowledgeGraph& kg1,
                              const KnowledgeGraph& kg2,
                              const MatcherConfig& cfg);

}  // namespace kga::lexical
