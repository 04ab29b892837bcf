#include "kga/model.hpp"

#include <algorithm>
#include <set>

namespace kga {

namespace {

bool valid_iri_text(std::string_view s) {
  if (s.empty()) return false;
  for (unsigned char c : s) {
    if (c <= 0x20 || c == 0x7f) return false;  // whitespace and control chars
  }
  return true;
}

}  // namespace

Iri::Iri(std::string value) : value_(std::move(value)) {
  if (!valid_iri_text(value_)) {
    throw KgaError("invalid IRI (empty, whitespace, or control characters): '" +
                   value_ + "'");
  }
}

bool Iri::is_absolute() const {
  if (value_.empty()) return false;
  char c = value_[0];
  if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'))) return false;
  for (std::size_t i = 1; i < value_.size(); ++i) {
    char d = value_[i];
    if (d == ':') return true;
    bool scheme_char = (d >= 'a' && d <= 'z') || (d >= 'A' && d <= 'Z') ||
                       (d >= '0' && d <= '9') || d == '+' || d == '-' ||
                       d == '.';
    if (!scheme_char) return false;
  }
  return false;
}

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::Class: return "class";
    case EntityKind::ObjectProperty: return "object-property";
    case EntityKind::DataProperty: return "data-property";
    case EntityKind::Individual: return "individual";
  }
  return "?";
}

std::string_view to_string(AxiomKind kind) {
  switch (kind) {
    case AxiomKind::SubClassOf: return "sub-class-of";
    case AxiomKind::EquivalentClass: return "equivalent-class";
    case AxiomKind::DisjointWith: return "disjoint-with";
  }
  return "?";
}

Entity make_entity(Iri iri, EntityKind kind, std::vector<Label> labels) {
  std::vector<Label> canonical;
  std::set<Label> seen;
  for (auto& label : labels) {
    if (label.text.empty()) {
      throw KgaError("empty label text on entity " + iri.str());
    }
    if (seen.insert(label).second) canonical.push_back(std::move(label));
  }
  if (canonical.size() > 2) {
    std::sort(canonical.begin() + 1, canonical.end());
  }
  return Entity{std::move(iri), kind, std::move(canonical)};
}

Axiom Axiom::sub_class_of(Iri sub, Iri sup) {
  return Axiom{AxiomKind::SubClassOf, std::move(sub), std::move(sup)};
}

Axiom Axiom::equivalent_class(Iri a, Iri b) {
  return Axiom{AxiomKind::EquivalentClass, std::move(a), std::move(b)};
}

Axiom Axiom::disjoint_with(Iri a, Iri b) {
  if (b < a) std::swap(a, b);
  return Axiom{AxiomKind::DisjointWith, std::move(a), std::move(b)};
}

KnowledgeGraph KnowledgeGraph::build(std::string id,
                                     std::vector<Entity> entities,
                                     std::vector<Axiom> axioms) {
  KnowledgeGraph kg;
  kg.id_ = std::move(id);
  for (auto& e : entities) {
    Iri iri = e.iri;
    if (!kg.entities_.emplace(iri, std::move(e)).second) {
      throw KgaError("duplicate entity declaration: " + iri.str());
    }
  }
  for (auto& ax : axioms) {
    if (ax.kind == AxiomKind::DisjointWith && ax.rhs < ax.lhs) {
      std::swap(ax.lhs, ax.rhs);
    }
    for (const Iri* iri : {&ax.lhs, &ax.rhs}) {
      auto it = kg.entities_.find(*iri);
      if (it == kg.entities_.end() || it->second.kind != EntityKind::Class) {
        throw KgaError("axiom operand not declared as a class: " + iri->str());
      }
    }
  }
  std::sort(axioms.begin(), axioms.end());
  axioms.erase(std::unique(axioms.begin(), axioms.end()), axioms.end());
  kg.axioms_ = std::move(axioms);
  return kg;
}

const Entity* KnowledgeGraph::find(const Iri& iri) const {
  auto it = entities_.find(iri);
  return it == entities_.end() ? nullptr : &it->second;
}

bool KnowledgeGraph::declares_class(const Iri& iri) const {
  const Entity* e = find(iri);
  return e != nullptr && e->kind == EntityKind::Class;
}

SignaturePartition signature(const KnowledgeGraph& kg) {
  SignaturePartition part;
  for (const auto& [iri, entity] : kg.entities()) {
    switch (entity.kind) {
      case EntityKind::Class: part.classes.push_back(iri); break;
      case EntityKind::ObjectProperty:
        part.object_properties.push_back(iri);
        break;
      case EntityKind::DataProperty: part.data_properties.push_back(iri); break;
      case EntityKind::Individual: part.individuals.push_back(iri); break;
    }
  }
  return part;
}

char relation_symbol(Relation r) {
  switch (r) {
    case Relation::Subsumed: return '<';
    case Relation::Subsumes: return '>';
    case Relation::Equivalent: return '=';
  }
  return '?';
}

std::optional<Relation> relation_from_symbol(std::string_view symbol) {
  if (symbol == "<") return Relation::Subsumed;
  if (symbol == ">") return Relation::Subsumes;
  if (symbol == "=") return Relation::Equivalent;
  return std::nullopt;
}

std::string MappingKey::to_string() const {
  std::string out = source.str();
  out += ' ';
  out += relation_symbol(relation);
  out += ' ';
  out += target.str();
  return out;
}

Mapping::Mapping(Iri source, Iri target, Relation relation, double confidence)
    : source(std::move(source)),
      target(std::move(target)),
      relation(relation),
      confidence(confidence) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw KgaError("mapping confidence out of range [0,1]: " +
                   std::to_string(confidence));
  }
}

bool Alignment::add(Mapping m) {
  MappingKey key = m.key();
  return entries_.emplace(std::move(key), std::move(m)).second;
}

const Mapping* Alignment::find(const MappingKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<Mapping> Alignment::mappings() const {
  std::vector<Mapping> out;
  out.reserve(entries_.size());
  for (const auto& [key, m] : entries_) out.push_back(m);
  return out;
}

std::vector<MappingKey> Alignment::keys() const {
  std::vector<MappingKey> out;
  out.reserve(entries_.size());
  for (const auto& [key, m] : entries_) out.push_back(key);
  return out;
}

void validate_alignment(const KnowledgeGraph& kg1, const KnowledgeGraph& kg2,
                        const Alignment& m) {
  for (const auto& [key, mapping] : m.entries()) {
    const Entity* src = kg1.find(mapping.source);
    if (src == nullptr) {
      throw KgaError("mapping endpoint not in source signature: " +
                     mapping.source.str());
    }
    const Entity* tgt = kg2.find(mapping.target);
    if (tgt == nullptr) {
      throw KgaError("mapping endpoint not in target signature: " +
                     mapping.target.str());
    }
    if (src->kind != tgt->kind) {
      throw KgaError("mapping endpoints have different kinds: " +
                     key.to_string());
    }
  }
}

std::vector<AlignedAxiom> aligned_axioms(const KnowledgeGraph& kg1,
                                         const KnowledgeGraph& kg2,
                                         const Alignment& m) {
  validate_alignment(kg1, kg2, m);

  std::vector<AlignedAxiom> out;
  std::set<AlignedAxiom> seen;
  auto push = [&](AlignedAxiom entry) {
    if (seen.insert(entry).second) out.push_back(std::move(entry));
  };

  for (const Axiom& ax : kg1.axioms()) push(AlignedAxiom{ax, std::nullopt});
  for (const Axiom& ax : kg2.axioms()) push(AlignedAxiom{ax, std::nullopt});

  for (const auto& [key, mapping] : m.entries()) {
    switch (mapping.relation) {
      case Relation::Subsumed:
        push({Axiom::sub_class_of(mapping.source, mapping.target), key});
        break;
      case Relation::Subsumes:
        push({Axiom::sub_class_of(mapping.target, mapping.source), key});
        break;
      case Relation::Equivalent:
        push({Axiom::sub_class_of(mapping.source, mapping.target), key});
        push({Axiom::sub_class_of(mapping.target, mapping.source), key});
        break;
    }
  }
  return out;
}

}  // namespace kga
