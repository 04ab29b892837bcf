#include "kga/reasoner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace kga::reasoner {

namespace {

/// Fixed-width bitset over mapping indices.
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t nbits) : words_((nbits + 63) / 64, 0) {}

  void set(std::uint32_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }

  bool subset_of(const Bits& o) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if ((words_[w] & ~o.words_[w]) != 0) return false;
    }
    return true;
  }

  static Bits union_of(const Bits& x, const Bits& y) {
    Bits out = x;
    for (std::size_t w = 0; w < out.words_.size(); ++w) {
      out.words_[w] |= y.words_[w];
    }
    return out;
  }

  std::size_t popcount() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  // Total order: cardinality first, then lowest set indices first.
  bool less(const Bits& o) const {
    std::size_t pa = popcount();
    std::size_t pb = o.popcount();
    if (pa != pb) return pa < pb;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if (words_[w] != o.words_[w]) return words_[w] < o.words_[w];
    }
    return false;
  }

  bool operator==(const Bits&) const = default;

  SupportSet to_indices() const {
    SupportSet out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        int b = std::countr_zero(bits);
        out.push_back(static_cast<std::uint32_t>(w * 64 + b));
        bits &= bits - 1;
      }
    }
    return out;
  }

 private:
  std::vector<std::uint64_t> words_;
};

using Chain = std::vector<Bits>;  // minimal antichain, sorted by Bits::less

/// Merges `s` into the antichain. Returns true when the chain changed.
bool antichain_insert(Chain& chain, const Bits& s, std::size_t cap,
                      bool& truncated) {
  for (const Bits& e : chain) {
    if (e.subset_of(s)) return false;  // already covered
  }
  bool removed = false;
  std::erase_if(chain, [&](const Bits& e) {
    bool superset = s.subset_of(e);
    removed |= superset;
    return superset;
  });
  auto pos = std::lower_bound(
      chain.begin(), chain.end(), s,
      [](const Bits& x, const Bits& y) { return x.less(y); });
  if (!removed && chain.size() >= cap &&
      pos == chain.end()) {
    truncated = true;
    return false;  // dropped past the cap; chain unchanged
  }
  chain.insert(pos, s);
  if (chain.size() > cap) {
    chain.resize(cap);
    truncated = true;
  }
  return true;
}

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

const DerivedSubsumption* ClosureResult::find(const Iri& sub,
                                              const Iri& sup) const {
  auto it = std::lower_bound(
      subsumptions.begin(), subsumptions.end(), std::pair(sub, sup),
      [](const DerivedSubsumption& d, const std::pair<Iri, Iri>& key) {
        if (d.sub != key.first) return d.sub < key.first;
        return d.sup < key.second;
      });
  if (it == subsumptions.end() || it->sub != sub || it->sup != sup) {
    return nullptr;
  }
  return &*it;
}

const UnsatReport* ClosureResult::find_unsat(const Iri& concept_iri) const {
  auto it = std::lower_bound(unsat.begin(), unsat.end(), concept_iri,
                             [](const UnsatReport& r, const Iri& c) {
                               return r.concept_iri < c;
                             });
  if (it == unsat.end() || it->concept_iri != concept_iri) return nullptr;
  return &*it;
}

std::optional<std::uint32_t> ClosureResult::index_of(
    const MappingKey& key) const {
  auto it = std::lower_bound(mapping_keys.begin(), mapping_keys.end(), key);
  if (it == mapping_keys.end() || *it != key) return std::nullopt;
  return static_cast<std::uint32_t>(it - mapping_keys.begin());
}

SupportSet ClosureResult::all_involved() const {
  std::set<std::uint32_t> all;
  for (const UnsatReport& r : unsat) all.insert(r.involved.begin(), r.involved.end());
  return SupportSet(all.begin(), all.end());
}

ClosureEngine::ClosureEngine(const KnowledgeGraph& kg1,
                             const KnowledgeGraph& kg2)
    : kg1_(&kg1), kg2_(&kg2) {
  std::set<Iri> node_set;
  for (const auto& [iri, e] : kg1.entities()) node_set.insert(iri);
  for (const auto& [iri, e] : kg2.entities()) node_set.insert(iri);
  nodes_.assign(node_set.begin(), node_set.end());
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) index_[nodes_[i]] = i;

  auto add_axioms = [&](const KnowledgeGraph& kg) {
    for (const Axiom& ax : kg.axioms()) {
      std::uint32_t l = index_.at(ax.lhs);
      std::uint32_t r = index_.at(ax.rhs);
      switch (ax.kind) {
        case AxiomKind::SubClassOf:
          base_edges_.emplace_back(l, r);
          break;
        case AxiomKind::EquivalentClass:
          base_edges_.emplace_back(l, r);
          base_edges_.emplace_back(r, l);
          break;
        case AxiomKind::DisjointWith:
          disjoint_pairs_.emplace_back(l, r);
          break;
      }
    }
  };
  add_axioms(kg1);
  add_axioms(kg2);
  std::sort(base_edges_.begin(), base_edges_.end());
  base_edges_.erase(std::unique(base_edges_.begin(), base_edges_.end()),
                    base_edges_.end());
  std::sort(disjoint_pairs_.begin(), disjoint_pairs_.end());
  disjoint_pairs_.erase(
      std::unique(disjoint_pairs_.begin(), disjoint_pairs_.end()),
      disjoint_pairs_.end());
}

ClosureResult ClosureEngine::run(const Alignment& m,
                                 ClosureOptions opts) const {
  validate_alignment(*kg1_, *kg2_, m);
  if (opts.j_cap == 0) throw KgaError("j_cap must be positive");

  ClosureResult result;
  result.mapping_keys = m.keys();
  const std::size_t n_mappings = result.mapping_keys.size();
  const std::size_t n = nodes_.size();
  bool truncated = false;

  // Edge antichains: base axioms carry the empty support, translated mapping
  // axioms the singleton {mapping index}.
  std::map<std::pair<std::uint32_t, std::uint32_t>, Chain> edge_chains;
  Bits empty_support(n_mappings);
  for (const auto& [from, to] : base_edges_) {
    antichain_insert(edge_chains[{from, to}], empty_support, opts.j_cap,
                     truncated);
  }
  for (std::uint32_t i = 0; i < n_mappings; ++i) {
    const Mapping* mp = m.find(result.mapping_keys[i]);
    Bits support(n_mappings);
    support.set(i);
    std::uint32_t s = index_.at(mp->source);
    std::uint32_t t = index_.at(mp->target);
    switch (mp->relation) {
      case Relation::Subsumed:
        antichain_insert(edge_chains[{s, t}], support, opts.j_cap, truncated);
        break;
      case Relation::Subsumes:
        antichain_insert(edge_chains[{t, s}], support, opts.j_cap, truncated);
        break;
      case Relation::Equivalent:
        antichain_insert(edge_chains[{s, t}], support, opts.j_cap, truncated);
        antichain_insert(edge_chains[{t, s}], support, opts.j_cap, truncated);
        break;
    }
  }

  std::vector<std::vector<std::pair<std::uint32_t, const Chain*>>> out_edges(n);
  for (const auto& [key, chain] : edge_chains) {
    out_edges[key.first].emplace_back(key.second, &chain);
  }

  // Fixpoint over reachability with provenance.
  std::unordered_map<std::uint64_t, Chain> reach;
  std::deque<std::uint64_t> worklist;
  std::unordered_set<std::uint64_t> queued;
  auto enqueue = [&](std::uint64_t key) {
    if (queued.insert(key).second) worklist.push_back(key);
  };
  for (std::uint32_t a = 0; a < n; ++a) {
    Chain& self = reach[pair_key(a, a)];
    antichain_insert(self, Bits(n_mappings), opts.j_cap, truncated);
    enqueue(pair_key(a, a));
  }

  while (!worklist.empty()) {
    std::uint64_t key = worklist.front();
    worklist.pop_front();
    queued.erase(key);
    std::uint32_t a = static_cast<std::uint32_t>(key >> 32);
    std::uint32_t b = static_cast<std::uint32_t>(key & 0xffffffffu);
    // Copy: inserts into `reach` below may invalidate references.
    Chain current = reach[key];
    for (const auto& [c, echain] : out_edges[b]) {
      std::uint64_t target_key = pair_key(a, c);
      bool changed = false;
      for (const Bits& s1 : current) {
        for (const Bits& s2 : *echain) {
          changed |= antichain_insert(reach[target_key],
                                      Bits::union_of(s1, s2), opts.j_cap,
                                      truncated);
        }
      }
      if (changed) enqueue(target_key);
    }
  }

  // Unsatisfiability: a concept below both sides of a disjointness.
  std::map<std::uint32_t, Chain> justifications;
  for (const auto& [x, y] : disjoint_pairs_) {
    for (std::uint32_t a = 0; a < n; ++a) {
      auto itx = reach.find(pair_key(a, x));
      if (itx == reach.end() || itx->second.empty()) continue;
      if (x == y) {
        for (const Bits& s : itx->second) {
          antichain_insert(justifications[a], s, opts.j_cap, truncated);
        }
        continue;
      }
      auto ity = reach.find(pair_key(a, y));
      if (ity == reach.end() || ity->second.empty()) continue;
      for (const Bits& s1 : itx->second) {
        for (const Bits& s2 : ity->second) {
          antichain_insert(justifications[a], Bits::union_of(s1, s2),
                           opts.j_cap, truncated);
        }
      }
    }
  }

  std::vector<std::uint64_t> pair_keys;
  pair_keys.reserve(reach.size());
  for (const auto& [key, chain] : reach) {
    if (!chain.empty()) pair_keys.push_back(key);
  }
  std::sort(pair_keys.begin(), pair_keys.end());
  result.subsumptions.reserve(pair_keys.size());
  for (std::uint64_t key : pair_keys) {
    const Chain& chain = reach[key];
    DerivedSubsumption d;
    d.sub = nodes_[key >> 32];
    d.sup = nodes_[key & 0xffffffffu];
    for (const Bits& s : chain) d.supports.push_back(s.to_indices());
    result.subsumptions.push_back(std::move(d));
  }

  for (const auto& [node, chain] : justifications) {
    UnsatReport report;
    report.concept_iri = nodes_[node];
    std::set<std::uint32_t> all;
    for (const Bits& s : chain) {
      SupportSet indices = s.to_indices();
      all.insert(indices.begin(), indices.end());
      report.justifications.push_back(std::move(indices));
    }
    report.involved.assign(all.begin(), all.end());
    result.unsat.push_back(std::move(report));
  }

  result.truncated = truncated;
  return result;
}

ClosureResult closure(const KnowledgeGraph& kg1, const KnowledgeGraph& kg2,
                      const Alignment& m, ClosureOptions opts) {
  return ClosureEngine(kg1, kg2).run(m, opts);
}

bool involved(const MappingKey& key, const ClosureResult& cr) {
  auto idx = cr.index_of(key);
  if (!idx) {
    throw KgaError("mapping key not part of the diagnosed alignment: " +
                   key.to_string());
  }
  for (const UnsatReport& r : cr.unsat) {
    if (std::binary_search(r.involved.begin(), r.involved.end(), *idx)) {
      return true;
    }
  }
  return false;
}

namespace {

SupportSet touching_indices(const Iri& e, const Alignment& m,
                            const ClosureResult& cr) {
  SupportSet out;
  for (const auto& [key, mapping] : m.entries()) {
    if (mapping.source != e && mapping.target != e) continue;
    auto idx = cr.index_of(key);
    if (!idx) {
      throw KgaError(
          "closure result does not cover the supplied alignment (key " +
          key.to_string() + ")");
    }
    out.push_back(*idx);
  }
  return out;
}

bool intersects(const SupportSet& a, const SupportSet& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia == *ib) return true;
    if (*ia < *ib) {
      ++ia;
    } else {
      ++ib;
    }
  }
  return false;
}

}  // namespace

int consist(const Iri& e, const Alignment& m, const ClosureResult& cr) {
  SupportSet touching = touching_indices(e, m, cr);
  if (touching.empty()) return 1;
  for (const UnsatReport& r : cr.unsat) {
    if (intersects(r.involved, touching)) return 0;
  }
  return 1;
}

std::size_t unsat_count(const Iri& e, const Alignment& m,
                        const ClosureResult& cr) {
  SupportSet touching = touching_indices(e, m, cr);
  if (touching.empty()) return 0;
  std::size_t count = 0;
  for (const UnsatReport& r : cr.unsat) {
    if (intersects(r.involved, touching)) ++count;
  }
  return count;
}

double softconsist(std::uint64_t bot) {
  if (bot > 1000) return 0.0;
  return 2.0 / (1.0 + std::exp(static_cast<double>(bot)));
}

std::string DiffStatement::to_string() const {
  std::string out = sub.str();
  out += " < ";
  out += sup ? sup->str() : "_|_";
  return out;
}

namespace {

/// Plain reachability + unsat over one axiom list (no provenance).
struct PlainClosure {
  std::vector<Iri> nodes;
  std::map<Iri, std::uint32_t> index;
  std::vector<std::vector<bool>> reach;
  std::vector<bool> unsat;

  explicit PlainClosure(const std::vector<Axiom>& axioms,
                        const std::vector<Iri>& sigma) {
    std::set<Iri> node_set(sigma.begin(), sigma.end());
    for (const Axiom& ax : axioms) {
      node_set.insert(ax.lhs);
      node_set.insert(ax.rhs);
    }
    nodes.assign(node_set.begin(), node_set.end());
    for (std::uint32_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;
    std::size_t n = nodes.size();
    reach.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> disjoints;
    for (const Axiom& ax : axioms) {
      std::uint32_t l = index.at(ax.lhs);
      std::uint32_t r = index.at(ax.rhs);
      switch (ax.kind) {
        case AxiomKind::SubClassOf: reach[l][r] = true; break;
        case AxiomKind::EquivalentClass:
          reach[l][r] = true;
          reach[r][l] = true;
          break;
        case AxiomKind::DisjointWith: disjoints.emplace_back(l, r); break;
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!reach[i][k]) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (reach[k][j]) reach[i][j] = true;
        }
      }
    }
    unsat.assign(n, false);
    for (const auto& [x, y] : disjoints) {
      for (std::size_t a = 0; a < n; ++a) {
        if (reach[a][x] && reach[a][y]) unsat[a] = true;
      }
    }
  }
};

}  // namespace

std::vector<DiffStatement> deductive_diff(const std::vector<Axiom>& a,
                                          const std::vector<Axiom>& b,
                                          const std::vector<Iri>& sigma) {
  std::set<Iri> sigma_set(sigma.begin(), sigma.end());
  std::vector<Iri> sigma_sorted(sigma_set.begin(), sigma_set.end());

  PlainClosure ca(a, sigma_sorted);
  PlainClosure cb(b, sigma_sorted);

  auto reach_in = [](const PlainClosure& c, const Iri& x, const Iri& y) {
    auto ix = c.index.find(x);
    auto iy = c.index.find(y);
    if (ix == c.index.end() || iy == c.index.end()) return x == y;
    return static_cast<bool>(c.reach[ix->second][iy->second]);
  };
  auto unsat_in = [](const PlainClosure& c, const Iri& x) {
    auto ix = c.index.find(x);
    if (ix == c.index.end()) return false;
    return static_cast<bool>(c.unsat[ix->second]);
  };

  std::vector<DiffStatement> out;
  for (const Iri& sub : sigma_sorted) {
    if (unsat_in(cb, sub) && !unsat_in(ca, sub)) {
      out.push_back(DiffStatement{sub, std::nullopt});
    }
    for (const Iri& sup : sigma_sorted) {
      if (sub == sup) continue;
      if (reach_in(cb, sub, sup) && !reach_in(ca, sub, sup)) {
        out.push_back(DiffStatement{sub, sup});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace kga::reasoner
