#include "kga/benchgen.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "kga/bench_data.hpp"
#include "kga/ingest.hpp"
#include "kga/splitmix.hpp"

namespace kga::bench {

void BenchConfig::validate() const {
  if (n_classes < 1) throw KgaError("n_classes must be positive");
  if (n_classes > 5000) throw KgaError("n_classes capped at 5000");
  if (branching < 1) throw KgaError("branching must be positive");
  if (label_noise < 0.0 || label_noise > 1.0) {
    throw KgaError("label_noise out of range [0,1]");
  }
  if (edge_delete_rate < 0.0 || edge_delete_rate > 1.0) {
    throw KgaError("edge_delete_rate out of range [0,1]");
  }
  if (n_conflicts < 0) throw KgaError("n_conflicts must be non-negative");
  if (n_conflicts * 4 > n_classes) {
    throw KgaError("n_conflicts must not exceed n_classes/4");
  }
}

namespace {

constexpr std::string_view kSourceNs = "http://kga.example/bench/source#";
constexpr std::string_view kTargetNs = "http://kga.example/bench/target#";
constexpr int kNoParent = -1;

struct Vocab {
  std::vector<std::string> words;
  std::map<std::string, std::string> synonyms;
};

const Vocab& vocab() {
  static const Vocab v = [] {
    Vocab out;
    std::istringstream words(data::kWordList);
    std::string line;
    while (std::getline(words, line)) {
      if (!line.empty()) out.words.push_back(line);
    }
    std::istringstream syns(data::kSynonyms);
    while (std::getline(syns, line)) {
      auto tab = line.find('\t');
      if (tab == std::string::npos) continue;
      out.synonyms[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return out;
  }();
  return v;
}

std::string title_case(const std::string& word) {
  std::string out = word;
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] -= 0x20;
  return out;
}

std::string display_label(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += title_case(tokens[i]);
  }
  return out;
}

std::string local_name(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += '_';
    out += title_case(tokens[i]);
  }
  return out;
}

std::set<std::string> token_set(const std::vector<std::string>& tokens) {
  return {tokens.begin(), tokens.end()};
}

template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.next_below(i)]);
  }
}

bool is_ancestor(int x, int y, const std::vector<int>& parent) {
  for (int cur = parent[y]; cur != kNoParent; cur = parent[cur]) {
    if (cur == x) return true;
  }
  return false;
}

std::vector<std::string> perturb_label(const std::vector<std::string>& tokens,
                                       SplitMix64& rng) {
  const Vocab& v = vocab();
  std::vector<std::string> out = tokens;
  std::uint64_t op = rng.next_below(3);
  if (op == 1) {
    std::vector<std::size_t> with_synonym;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (v.synonyms.contains(out[i])) with_synonym.push_back(i);
    }
    if (!with_synonym.empty()) {
      std::size_t pick = with_synonym[rng.next_below(with_synonym.size())];
      out[pick] = v.synonyms.at(out[pick]);
      return out;
    }
    op = 0;  // no synonym available, fall back to a swap
  }
  if (op == 2) {
    if (out.size() >= 2) {
      shuffle(out, rng);
      return out;
    }
    op = 0;  // single token, fall back to a swap
  }
  // Adjacent character swap inside one token.
  std::size_t t = rng.next_below(out.size());
  std::string& tok = out[t];
  if (tok.size() >= 2) {
    std::size_t p = rng.next_below(tok.size() - 1);
    std::swap(tok[p], tok[p + 1]);
  }
  return out;
}

}  // namespace

BenchResult generate(const BenchConfig& cfg) {
  cfg.validate();
  const Vocab& v = vocab();
  const int n = cfg.n_classes;
  SplitMix64 rng(cfg.seed);

  // Names: distinct unordered word pairs, so no two classes share a token set
  // and a token reorder can never collide with another class.
  std::vector<std::vector<std::string>> names(n);
  std::set<std::pair<std::size_t, std::size_t>> used_pairs;
  for (int c = 0; c < n; ++c) {
    while (true) {
      std::size_t i = rng.next_below(v.words.size());
      std::size_t j = rng.next_below(v.words.size());
      if (i == j) continue;
      auto key = std::minmax(i, j);
      if (!used_pairs.insert(key).second) continue;
      names[c] = {v.words[i], v.words[j]};
      break;
    }
  }

  // Random tree: each non-root attaches to an earlier class with capacity.
  std::vector<int> parent(n, kNoParent);
  std::vector<int> child_count(n, 0);
  for (int c = 1; c < n; ++c) {
    std::vector<int> candidates;
    for (int p = 0; p < c; ++p) {
      if (child_count[p] < cfg.branching) candidates.push_back(p);
    }
    int p = candidates[rng.next_below(candidates.size())];
    parent[c] = p;
    ++child_count[p];
  }

  // Target-side structure: copy, then delete subclass edges.
  std::vector<int> parent2 = parent;
  for (int c = 1; c < n; ++c) {
    if (cfg.edge_delete_rate > 0.0 && rng.next_bool(cfg.edge_delete_rate)) {
      parent2[c] = kNoParent;
    }
  }
  std::vector<int> child_count2(n, 0);
  for (int c = 1; c < n; ++c) {
    if (parent2[c] != kNoParent) ++child_count2[parent2[c]];
  }

  // Conflict injection: child1 ⊑ parent1 on the source side, the child's
  // counterpart re-parented under an unrelated class on the target side, and
  // a disjointness between the two target-side parents. Conflict classes are
  // exempt from label noise so the planted pattern survives matching.
  std::vector<bool> reserved(n, false);
  std::vector<std::pair<int, int>> disjoints;  // (parent1, parent2) indices
  std::vector<std::pair<int, int>> conflicts;  // (child, parent1) indices
  for (int k = 0; k < cfg.n_conflicts; ++k) {
    std::vector<int> children;
    for (int c = 1; c < n; ++c) {
      if (child_count2[c] == 0 && !reserved[c] && !reserved[parent[c]]) {
        children.push_back(c);
      }
    }
    shuffle(children, rng);
    bool placed = false;
    for (int child : children) {
      int p1 = parent[child];
      std::vector<int> others;
      for (int q = 0; q < n; ++q) {
        if (q == child || q == p1 || reserved[q]) continue;
        if (is_ancestor(q, p1, parent2) || is_ancestor(p1, q, parent2)) {
          continue;
        }
        others.push_back(q);
      }
      if (others.empty()) continue;
      int q = others[rng.next_below(others.size())];
      if (parent2[child] != kNoParent) --child_count2[parent2[child]];
      parent2[child] = q;
      ++child_count2[q];
      reserved[child] = reserved[p1] = reserved[q] = true;
      disjoints.emplace_back(p1, q);
      conflicts.emplace_back(child, p1);
      placed = true;
      break;
    }
    if (!placed) {
      throw KgaError("unable to place conflict " + std::to_string(k + 1) +
                     " with this seed and shape; use more classes or fewer "
                     "conflicts");
    }
  }

  // Target labels, perturbed with probability label_noise. The perturbed
  // token set must not collide with any other class's current set (spurious
  // exact matches would corrupt the ground truth).
  std::vector<std::vector<std::string>> labels2 = names;
  std::map<std::set<std::string>, int> set_count;
  for (int c = 0; c < n; ++c) ++set_count[token_set(names[c])];
  for (int c = 0; c < n; ++c) {
    if (reserved[c]) continue;
    if (cfg.label_noise <= 0.0 || !rng.next_bool(cfg.label_noise)) continue;
    --set_count[token_set(labels2[c])];
    std::vector<std::string> chosen = labels2[c];
    for (int attempt = 0; attempt < 20; ++attempt) {
      std::vector<std::string> candidate = perturb_label(names[c], rng);
      auto key = token_set(candidate);
      auto it = set_count.find(key);
      if (it == set_count.end() || it->second == 0) {
        chosen = std::move(candidate);
        break;
      }
    }
    labels2[c] = chosen;
    ++set_count[token_set(labels2[c])];
  }

  // Assemble the graphs.
  auto iri_for = [&](std::string_view ns, int c) {
    return Iri{std::string(ns) + local_name(names[c])};
  };
  std::vector<Entity> entities1;
  std::vector<Axiom> axioms1;
  for (int c = 0; c < n; ++c) {
    entities1.push_back(make_entity(iri_for(kSourceNs, c), EntityKind::Class,
                                    {Label{display_label(names[c]), {}}}));
    if (parent[c] != kNoParent) {
      axioms1.push_back(Axiom::sub_class_of(iri_for(kSourceNs, c),
                                            iri_for(kSourceNs, parent[c])));
    }
  }
  std::vector<Entity> entities2;
  std::vector<Axiom> axioms2;
  for (int c = 0; c < n; ++c) {
    entities2.push_back(make_entity(iri_for(kTargetNs, c), EntityKind::Class,
                                    {Label{display_label(labels2[c]), {}}}));
    if (parent2[c] != kNoParent) {
      axioms2.push_back(Axiom::sub_class_of(iri_for(kTargetNs, c),
                                            iri_for(kTargetNs, parent2[c])));
    }
  }
  for (const auto& [p1, q] : disjoints) {
    axioms2.push_back(
        Axiom::disjoint_with(iri_for(kTargetNs, p1), iri_for(kTargetNs, q)));
  }

  BenchResult result;
  result.source =
      KnowledgeGraph::build("source", std::move(entities1), std::move(axioms1));
  result.target =
      KnowledgeGraph::build("target", std::move(entities2), std::move(axioms2));
  for (int c = 0; c < n; ++c) {
    result.ground_truth.add(Mapping{iri_for(kSourceNs, c),
                                    iri_for(kTargetNs, c),
                                    Relation::Equivalent, 1.0});
  }
  for (const auto& [child, p1] : conflicts) {
    result.conflict_keys.push_back(MappingKey{
        iri_for(kSourceNs, child), iri_for(kTargetNs, child),
        Relation::Equivalent});
    result.conflict_keys.push_back(MappingKey{
        iri_for(kSourceNs, p1), iri_for(kTargetNs, p1), Relation::Equivalent});
  }
  std::sort(result.conflict_keys.begin(), result.conflict_keys.end());
  return result;
}

void write_bench(const BenchResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write_file = [&](const char* name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw KgaError("cannot write " + (dir / name).string());
    out << content;
  };
  write_file("source.ttl", ingest::serialize_ontology(result.source));
  write_file("target.ttl", ingest::serialize_ontology(result.target));
  write_file("reference.tsv", ingest::write_alignment(result.ground_truth));
  std::string manifest;
  for (const MappingKey& key : result.conflict_keys) {
    manifest += key.source.str();
    manifest += '\t';
    manifest += key.target.str();
    manifest += '\t';
    manifest += relation_symbol(key.relation);
    manifest += '\n';
  }
  write_file("manifest.tsv", manifest);
}

std::vector<MappingKey> read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw KgaError("cannot open manifest " + file.string());
  std::vector<MappingKey> keys;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto t1 = line.find('\t');
    auto t2 = line.find('\t', t1 == std::string::npos ? t1 : t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) {
      throw KgaError("malformed manifest line: " + line);
    }
    auto rel = relation_from_symbol(line.substr(t2 + 1));
    if (!rel) throw KgaError("malformed manifest relation: " + line);
    keys.push_back(MappingKey{Iri{line.substr(0, t1)},
                              Iri{line.substr(t1 + 1, t2 - t1 - 1)}, *rel});
  }
  return keys;
}

}  // namespace kga::bench
