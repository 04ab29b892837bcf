#include "kga/selector.hpp"

#include <algorithm>
#include <map>

#include "kga/log.hpp"

namespace kga::selector {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Hard: return "hard";
    case Mode::Threshold: return "threshold";
    case Mode::Soft: return "soft";
    case Mode::None: return "none";
  }
  return "?";
}

std::optional<Mode> mode_from_string(std::string_view name) {
  if (name == "hard") return Mode::Hard;
  if (name == "threshold") return Mode::Threshold;
  if (name == "soft") return Mode::Soft;
  if (name == "none") return Mode::None;
  return std::nullopt;
}

void SelectorConfig::validate() const {
  if (theta < 0.0 || theta > 1.0) throw KgaError("theta out of range [0,1]");
  if (gamma < 0.0 || gamma > 1.0) throw KgaError("gamma out of range [0,1]");
  if (cardinality_t < 1) throw KgaError("cardinality threshold must be >= 1");
  if (max_soft_iterations < 1) {
    throw KgaError("max soft iterations must be >= 1");
  }
  if (j_cap == 0) throw KgaError("j_cap must be positive");
}

std::string_view to_string(MappingStatus s) {
  switch (s) {
    case MappingStatus::Accepted: return "accepted";
    case MappingStatus::RejectedCardinality: return "rejected-cardinality";
    case MappingStatus::RejectedInconsistent: return "rejected-inconsistent";
    case MappingStatus::RejectedFloor: return "rejected-floor";
  }
  return "?";
}

double objective_value(const std::vector<ScoredMapping>& records) {
  double total = 0.0;
  for (const ScoredMapping& r : records) {
    if (r.status == MappingStatus::Accepted) total += r.objective_score;
  }
  return total;
}

namespace {

/// Candidates in greedy order: confidence descending, then key ascending.
std::vector<Mapping> greedy_order(const Alignment& candidates) {
  std::vector<Mapping> out = candidates.mappings();
  std::stable_sort(out.begin(), out.end(),
                   [](const Mapping& a, const Mapping& b) {
                     if (a.confidence != b.confidence) {
                       return a.confidence > b.confidence;
                     }
                     return a.key() < b.key();
                   });
  return out;
}

struct DegreeTracker {
  std::map<Iri, int> source_degree;
  std::map<Iri, int> target_degree;
  int cap;

  explicit DegreeTracker(int cap) : cap(cap) {}

  bool fits(const Mapping& m) const {
    auto s = source_degree.find(m.source);
    if (s != source_degree.end() && s->second >= cap) return false;
    auto t = target_degree.find(m.target);
    if (t != target_degree.end() && t->second >= cap) return false;
    return true;
  }

  void accept(const Mapping& m) {
    ++source_degree[m.source];
    ++target_degree[m.target];
  }
};

/// Justifications of the trial closure that mention `key` — the conflict
/// evidence attached to a rejected candidate.
std::vector<std::vector<MappingKey>> conflicts_for(
    const reasoner::ClosureResult& cr, const MappingKey& key) {
  std::vector<std::vector<MappingKey>> out;
  auto idx = cr.index_of(key);
  if (!idx) return out;
  for (const auto& report : cr.unsat) {
    for (const auto& just : report.justifications) {
      if (!std::binary_search(just.begin(), just.end(), *idx)) continue;
      std::vector<MappingKey> keys;
      keys.reserve(just.size());
      for (std::uint32_t i : just) keys.push_back(cr.mapping_keys[i]);
      if (std::find(out.begin(), out.end(), keys) == out.end()) {
        out.push_back(std::move(keys));
      }
    }
  }
  return out;
}

SelectionResult finalize(const reasoner::ClosureEngine& engine,
                         const Alignment& accepted,
                         std::map<MappingKey, ScoredMapping> records,
                         const SelectorConfig& cfg, bool truncated_anywhere,
                         bool hit_iteration_cap) {
  SelectionResult result;
  result.accepted = accepted;
  result.final_closure = engine.run(accepted, {cfg.j_cap});
  result.truncated = truncated_anywhere || result.final_closure.truncated;
  result.hit_iteration_cap = hit_iteration_cap;
  result.records.reserve(records.size());
  for (auto& [key, record] : records) result.records.push_back(std::move(record));
  return result;
}

SelectionResult select_greedy_consistent(const KnowledgeGraph& kg1,
                                         const KnowledgeGraph& kg2,
                                         const Alignment& candidates,
                                         const SelectorConfig& cfg) {
  reasoner::ClosureEngine engine(kg1, kg2);
  DegreeTracker degrees(cfg.cardinality_t);
  Alignment accepted;
  std::map<MappingKey, ScoredMapping> records;
  bool truncated = false;
  const bool is_threshold = cfg.mode == Mode::Threshold;

  for (const Mapping& m : greedy_order(candidates)) {
    ScoredMapping record{m, 0.0, MappingStatus::Accepted, {}};
    if (!is_threshold && m.confidence <= 0.0) {
      // A zero-confidence mapping can never contribute to the objective.
      record.status = MappingStatus::RejectedFloor;
      records.emplace(m.key(), std::move(record));
      continue;
    }
    if (!degrees.fits(m)) {
      record.status = MappingStatus::RejectedCardinality;
      records.emplace(m.key(), std::move(record));
      continue;
    }
    bool exempt = is_threshold && m.confidence >= cfg.theta;
    if (!exempt) {
      Alignment trial = accepted;
      trial.add(m);
      reasoner::ClosureResult cr = engine.run(trial, {cfg.j_cap});
      truncated |= cr.truncated;
      if (reasoner::involved(m.key(), cr)) {
        record.status = MappingStatus::RejectedInconsistent;
        record.conflicts = conflicts_for(cr, m.key());
        records.emplace(m.key(), std::move(record));
        continue;
      }
    }
    degrees.accept(m);
    accepted.add(m);
    records.emplace(m.key(), std::move(record));
  }

  SelectionResult result =
      finalize(engine, accepted, std::move(records), cfg, truncated, false);

  // Objective summands under the final closure.
  for (ScoredMapping& r : result.records) {
    if (r.status != MappingStatus::Accepted) continue;
    if (is_threshold && r.mapping.confidence >= cfg.theta) {
      r.objective_score = r.mapping.confidence;
    } else {
      int c1 = reasoner::consist(r.mapping.source, result.accepted,
                                 result.final_closure);
      int c2 = reasoner::consist(r.mapping.target, result.accepted,
                                 result.final_closure);
      r.objective_score = c1 * c2 * r.mapping.confidence;
    }
  }
  return result;
}

SelectionResult select_cardinality_only(const KnowledgeGraph& kg1,
                                        const KnowledgeGraph& kg2,
                                        const Alignment& candidates,
                                        const SelectorConfig& cfg,
                                        bool floor_zero_confidence) {
  reasoner::ClosureEngine engine(kg1, kg2);
  DegreeTracker degrees(cfg.cardinality_t);
  Alignment accepted;
  std::map<MappingKey, ScoredMapping> records;

  for (const Mapping& m : greedy_order(candidates)) {
    ScoredMapping record{m, 0.0, MappingStatus::Accepted, {}};
    if (floor_zero_confidence && m.confidence <= 0.0) {
      record.status = MappingStatus::RejectedFloor;
    } else if (!degrees.fits(m)) {
      record.status = MappingStatus::RejectedCardinality;
    } else {
      degrees.accept(m);
      accepted.add(m);
      record.objective_score = m.confidence;
    }
    records.emplace(m.key(), std::move(record));
  }
  return finalize(engine, accepted, std::move(records), cfg, false, false);
}

SelectionResult select_soft(const KnowledgeGraph& kg1,
                            const KnowledgeGraph& kg2,
                            const Alignment& candidates,
                            const SelectorConfig& cfg) {
  reasoner::ClosureEngine engine(kg1, kg2);

  // Phase 1: cardinality-only greedy acceptance.
  SelectionResult phase1 =
      select_cardinality_only(kg1, kg2, candidates, cfg, true);
  Alignment accepted = phase1.accepted;
  std::map<MappingKey, ScoredMapping> records;
  for (ScoredMapping& r : phase1.records) {
    records.emplace(r.mapping.key(), std::move(r));
  }

  // Phase 2: score under softconsist and evict below-floor mappings one at a
  // time, recomputing the closure after each removal.
  bool truncated = false;
  bool hit_cap = false;
  int iterations = 0;
  reasoner::ClosureResult cr;
  while (true) {
    cr = engine.run(accepted, {cfg.j_cap});
    truncated |= cr.truncated;
    std::map<Iri, double> soft_by_entity;
    for (const auto& [key, m] : accepted.entries()) {
      for (const Iri* e : {&m.source, &m.target}) {
        if (!soft_by_entity.contains(*e)) {
          soft_by_entity[*e] = reasoner::softconsist(
              reasoner::unsat_count(*e, accepted, cr));
        }
      }
    }
    const MappingKey* worst = nullptr;
    double worst_score = 0.0;
    for (const auto& [key, m] : accepted.entries()) {
      double score =
          soft_by_entity[m.source] * soft_by_entity[m.target] * m.confidence;
      records.at(key).objective_score = score;
      if (score < cfg.gamma && (worst == nullptr || score < worst_score)) {
        worst = &key;
        worst_score = score;
      }
    }
    if (worst == nullptr) break;
    if (iterations >= cfg.max_soft_iterations) {
      hit_cap = true;
      break;
    }
    ++iterations;
    records.at(*worst).status = MappingStatus::RejectedFloor;
    MappingKey victim = *worst;
    Alignment next;
    for (const auto& [key, m] : accepted.entries()) {
      if (key != victim) next.add(m);
    }
    accepted = std::move(next);
    if (log::enabled(log::Level::Debug)) {
      log::debug("soft repair removed " + victim.to_string());
    }
  }

  SelectionResult result;
  result.accepted = std::move(accepted);
  result.final_closure = std::move(cr);
  result.truncated = truncated;
  result.hit_iteration_cap = hit_cap;
  result.records.reserve(records.size());
  for (auto& [key, record] : records) result.records.push_back(std::move(record));
  return result;
}

}  // namespace

SelectionResult select(const KnowledgeGraph& kg1, const KnowledgeGraph& kg2,
                       const Alignment& candidates,
                       const SelectorConfig& cfg) {
  cfg.validate();
  validate_alignment(kg1, kg2, candidates);
  switch (cfg.mode) {
    case Mode::Hard:
    case Mode::Threshold:
      return select_greedy_consistent(kg1, kg2, candidates, cfg);
    case Mode::Soft:
      return select_soft(kg1, kg2, candidates, cfg);
    case Mode::None:
      return select_cardinality_only(kg1, kg2, candidates, cfg, false);
  }
  throw KgaError("unknown selection mode");
}

SelectionResult select_exact_hard(const KnowledgeGraph& kg1,
                                  const KnowledgeGraph& kg2,
                                  const Alignment& candidates,
                                  const SelectorConfig& cfg) {
  cfg.validate();
  validate_alignment(kg1, kg2, candidates);
  const std::size_t n = candidates.size();
  if (n > 20) {
    throw KgaError("exact selection supports at most 20 candidates, got " +
                   std::to_string(n));
  }

  reasoner::ClosureEngine engine(kg1, kg2);
  std::vector<Mapping> all = candidates.mappings();  // key order
  reasoner::ClosureResult full = engine.run(candidates, {cfg.j_cap});

  // Nonempty justifications as bitmasks over the key order.
  std::vector<std::uint32_t> conflict_masks;
  for (const auto& report : full.unsat) {
    for (const auto& just : report.justifications) {
      if (just.empty()) continue;
      std::uint32_t mask = 0;
      for (std::uint32_t i : just) mask |= 1u << i;
      conflict_masks.push_back(mask);
    }
  }
  std::sort(conflict_masks.begin(), conflict_masks.end());
  conflict_masks.erase(
      std::unique(conflict_masks.begin(), conflict_masks.end()),
      conflict_masks.end());

  auto feasible = [&](std::uint32_t mask) {
    std::map<Iri, int> src, tgt;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask & (1u << i)) == 0) continue;
      if (++src[all[i].source] > cfg.cardinality_t) return false;
      if (++tgt[all[i].target] > cfg.cardinality_t) return false;
    }
    return true;
  };
  auto consistent = [&](std::uint32_t mask) {
    for (std::uint32_t c : conflict_masks) {
      if ((c & mask) == c) return false;
    }
    return true;
  };

  std::uint32_t best_mask = 0;
  double best_value = 0.0;
  int best_count = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (!feasible(mask) || !consistent(mask)) continue;
    double value = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        value += all[i].confidence;
        ++count;
      }
    }
    bool better = value > best_value ||
                  (value == best_value &&
                   (count < best_count ||
                    (count == best_count && mask < best_mask)));
    if (better) {
      best_mask = mask;
      best_value = value;
      best_count = count;
    }
  }

  Alignment accepted;
  std::map<MappingKey, ScoredMapping> records;
  for (std::size_t i = 0; i < n; ++i) {
    ScoredMapping record{all[i], 0.0, MappingStatus::Accepted, {}};
    if (best_mask & (1u << i)) {
      accepted.add(all[i]);
      record.objective_score = all[i].confidence;
    } else {
      std::uint32_t with = best_mask | (1u << i);
      if (!feasible(with)) {
        record.status = MappingStatus::RejectedCardinality;
      } else if (!consistent(with)) {
        record.status = MappingStatus::RejectedInconsistent;
        record.conflicts = conflicts_for(full, all[i].key());
      } else {
        record.status = MappingStatus::RejectedFloor;
      }
    }
    records.emplace(all[i].key(), std::move(record));
  }

  SelectionResult result =
      finalize(engine, accepted, std::move(records), cfg, full.truncated, false);
  return result;
}

}  // namespace kga::selector
