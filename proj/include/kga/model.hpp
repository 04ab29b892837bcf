#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kga {

/// Error thrown on contract violations (bad arguments, broken invariants).
class KgaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An absolute IRI. Comparison is exact byte equality.
class Iri {
 public:
  Iri() = default;
  explicit Iri(std::string value);

  const std::string& str() const { return value_; }
  bool empty() const { return value_.empty(); }

  /// True when the text starts with a URI scheme ("scheme:...").
  bool is_absolute() const;

  auto operator<=>(const Iri&) const = default;

 private:
  std::string value_;
};

enum class EntityKind { Class, ObjectProperty, DataProperty, Individual };

std::string_view to_string(EntityKind kind);

struct Label {
  std::string text;
  std::optional<std::string> lang;

  auto operator<=>(const Label&) const = default;
};

/// A declared entity with its (possibly empty) label list.
/// The first label is the primary one; the remaining labels are kept in
/// sorted order so that graphs built from reordered statements compare equal.
struct Entity {
  Iri iri;
  EntityKind kind = EntityKind::Class;
  std::vector<Label> labels;

  bool operator==(const Entity&) const = default;
};

/// Validates label texts, drops duplicate (text, lang) pairs and sorts the
/// non-primary tail.
Entity make_entity(Iri iri, EntityKind kind, std::vector<Label> labels = {});

enum class AxiomKind { SubClassOf, EquivalentClass, DisjointWith };

std::string_view to_string(AxiomKind kind);

/// Class-level axiom over named classes.
/// SubClassOf(lhs, rhs) reads lhs ⊑ rhs. DisjointWith is stored with
/// lhs ≤ rhs (canonical order).
struct Axiom {
  AxiomKind kind = AxiomKind::SubClassOf;
  Iri lhs;
  Iri rhs;

  static Axiom sub_class_of(Iri sub, Iri sup);
  static Axiom equivalent_class(Iri a, Iri b);
  static Axiom disjoint_with(Iri a, Iri b);

  auto operator<=>(const Axiom&) const = default;
};

/// Immutable ontology fragment: declared entities plus class axioms.
/// The axiom list is canonical (sorted, duplicate-free) and every axiom
/// operand is declared as a class.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  /// Validates and canonicalizes; throws KgaError on duplicate entities or
  /// axioms referencing IRIs not declared as classes.
  static KnowledgeGraph build(std::string id, std::vector<Entity> entities,
                              std::vector<Axiom> axioms);

  const std::string& id() const { return id_; }
  const std::map<Iri, Entity>& entities() const { return entities_; }
  const std::vector<Axiom>& axioms() const { return axioms_; }

  const Entity* find(const Iri& iri) const;
  bool declares(const Iri& iri) const { return entities_.contains(iri); }
  bool declares_class(const Iri& iri) const;

  bool operator==(const KnowledgeGraph&) const = default;

 private:
  std::string id_;
  std::map<Iri, Entity> entities_;
  std::vector<Axiom> axioms_;
};

/// Signature partition: the four disjoint entity-name sets.
struct SignaturePartition {
  std::vector<Iri> classes;
  std::vector<Iri> object_properties;
  std::vector<Iri> data_properties;
  std::vector<Iri> individuals;

  std::size_t total() const {
    return classes.size() + object_properties.size() + data_properties.size() +
           individuals.size();
  }
};

SignaturePartition signature(const KnowledgeGraph& kg);

/// Semantic relation of a mapping: ⊑ (Subsumed), ⊒ (Subsumes), ≡ (Equivalent).
enum class Relation { Subsumed, Subsumes, Equivalent };

/// TSV symbol: '<' for ⊑, '>' for ⊒, '=' for ≡.
char relation_symbol(Relation r);
std::optional<Relation> relation_from_symbol(std::string_view symbol);

/// Identity of a mapping inside an alignment.
struct MappingKey {
  Iri source;
  Iri target;
  Relation relation = Relation::Equivalent;

  auto operator<=>(const MappingKey&) const = default;

  /// Space-delimited rendering "source <sym> target" (IRIs cannot contain
  /// spaces, so this is unambiguous).
  std::string to_string() const;
};

/// A correspondence <e1, e2, r, c> between two graphs.
struct Mapping {
  Iri source;
  Iri target;
  Relation relation = Relation::Equivalent;
  double confidence = 1.0;

  Mapping() = default;
  /// Throws KgaError when confidence is outside [0, 1] or an endpoint is empty.
  Mapping(Iri source, Iri target, Relation relation, double confidence);

  MappingKey key() const { return MappingKey{source, target, relation}; }

  bool operator==(const Mapping&) const = default;
};

/// A set of mappings with unique (source, target, relation) keys and
/// deterministic sorted iteration.
class Alignment {
 public:
  Alignment() = default;

  /// Returns false (and leaves the alignment unchanged) when the key is
  /// already present.
  bool add(Mapping m);

  bool contains(const MappingKey& key) const { return entries_.contains(key); }
  const Mapping* find(const MappingKey& key) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Sorted by key.
  const std::map<MappingKey, Mapping>& entries() const { return entries_; }
  std::vector<Mapping> mappings() const;
  std::vector<MappingKey> keys() const;

  bool operator==(const Alignment&) const = default;

 private:
  std::map<MappingKey, Mapping> entries_;
};

/// An axiom of the aligned graph KG_M. Axioms translated from a mapping carry
/// the originating mapping key; axioms copied from an input graph do not.
struct AlignedAxiom {
  Axiom axiom;
  std::optional<MappingKey> origin;

  auto operator<=>(const AlignedAxiom&) const = default;
};

/// Materializes the aligned graph: kg1.axioms ∪ kg2.axioms ∪ translate(m).
/// Equivalent mappings translate to two SubClassOf axioms, Subsumed to
/// SubClassOf(source, target), Subsumes to SubClassOf(target, source).
/// Duplicate (axiom, origin) entries are removed.
/// Throws KgaError when a mapping endpoint is missing from the respective
/// signature or the endpoint kinds differ.
std::vector<AlignedAxiom> aligned_axioms(const KnowledgeGraph& kg1,
                                         const KnowledgeGraph& kg2,
                                         const Alignment& m);

/// Endpoint and kind checks shared by every consumer of (kg1, kg2, m).
void validate_alignment(const KnowledgeGraph& kg1, const KnowledgeGraph& kg2,
                        const Alignment& m);

}  // namespace kga
