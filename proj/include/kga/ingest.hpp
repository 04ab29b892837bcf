#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kga/model.hpp"

namespace kga::ingest {

enum class Severity { Error, Warning };

/// A parse problem. Error diagnostics abort parsing of the file; warnings
/// accumulate. line/column are 1-based.
struct ParseDiagnostic {
  std::string path;
  std::size_t line = 1;
  std::size_t column = 1;
  std::string message;
  Severity severity = Severity::Error;

  std::string to_string() const;
};

struct OntologyParseResult {
  std::optional<KnowledgeGraph> graph;  // present iff no Error was emitted
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return graph.has_value(); }
};

/// Parses the Turtle subset described in docs/formats.md. Entity
/// declarations may appear after use within the same file; prefixes must be
/// declared before use. Unrecognized predicates produce warnings and are
/// skipped.
OntologyParseResult parse_ontology(std::string_view text, std::string id,
                                   std::string path = "<input>");
OntologyParseResult parse_ontology_file(const std::filesystem::path& file,
                                        std::string id = "");

/// Deterministic serialization: fixed sorted prefix block, entities sorted
/// by IRI, axioms in canonical order. parse(serialize(kg)) == kg.
std::string serialize_ontology(const KnowledgeGraph& kg);

struct AlignmentParseResult {
  std::optional<Alignment> alignment;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return alignment.has_value(); }
};

/// Reads the alignment TSV format: `source<TAB>target<TAB>rel<TAB>confidence`
/// with rel in {=,<,>}; `#` comment lines and blank lines are skipped.
AlignmentParseResult read_alignment(std::string_view text,
                                    std::string path = "<input>");
AlignmentParseResult read_alignment_file(const std::filesystem::path& file);

/// Optional per-row annotation written as a comment line above the row.
struct ScoreAnnotation {
  double score = 0.0;
  std::string status;
};

/// Deterministic sorted output; read_alignment(write_alignment(a)) == a.
std::string write_alignment(
    const Alignment& a,
    const std::map<MappingKey, ScoreAnnotation>* scores = nullptr);

/// Confidence and score rendering used across all text formats (6 fraction
/// digits).
std::string format_confidence(double value);

}  // namespace kga::ingest
