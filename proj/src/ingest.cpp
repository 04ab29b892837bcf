#include "kga/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace kga::ingest {

namespace {

constexpr std::string_view kRdfsNs = "http://www.w3.org/2000/01/rdf-schema#";
constexpr std::string_view kOwlNs = "http://www.w3.org/2002/07/owl#";
constexpr std::string_view kSkosNs = "http://www.w3.org/2004/02/skos/core#";

std::string ns(std::string_view base, std::string_view local) {
  std::string out(base);
  out += local;
  return out;
}

bool iri_text_ok(std::string_view s) {
  if (s.empty()) return false;
  for (unsigned char c : s) {
    if (c <= 0x20 || c == 0x7f) return false;
  }
  return true;
}

bool absolute_iri_text(std::string_view s) {
  if (s.empty()) return false;
  char c = s[0];
  if (!std::isalpha(static_cast<unsigned char>(c))) return false;
  for (std::size_t i = 1; i < s.size(); ++i) {
    char d = s[i];
    if (d == ':') return true;
    if (!(std::isalnum(static_cast<unsigned char>(d)) || d == '+' ||
          d == '-' || d == '.')) {
      return false;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Lexer

enum class TokKind { Eof, Dot, AtPrefix, IriRef, PName, KeywordA, String };

struct Token {
  TokKind kind = TokKind::Eof;
  std::string value;                 // IRI text, pname text, or literal text
  std::optional<std::string> lang;   // language tag for String tokens
  std::size_t line = 1;
  std::size_t column = 1;
};

struct LexError {
  std::size_t line;
  std::size_t column;
  std::string message;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  // Throws LexError on malformed input.
  Token next() {
    skip_ws_and_comments();
    Token tok;
    tok.line = line_;
    tok.column = column_;
    if (pos_ >= text_.size()) {
      tok.kind = TokKind::Eof;
      return tok;
    }
    char c = text_[pos_];
    if (c == '.') {
      advance();
      tok.kind = TokKind::Dot;
      return tok;
    }
    if (c == '<') return lex_iriref(tok);
    if (c == '"') return lex_string(tok);
    if (c == '@') return lex_at(tok);
    return lex_pname(tok);
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_ws_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  Token lex_iriref(Token tok) {
    advance();  // consume '<'
    std::string value;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') {
        throw LexError{tok.line, tok.column, "unterminated IRI reference"};
      }
      char c = text_[pos_];
      advance();
      if (c == '>') break;
      value.push_back(c);
    }
    tok.kind = TokKind::IriRef;
    tok.value = std::move(value);
    return tok;
  }

  Token lex_string(Token tok) {
    advance();  // consume '"'
    std::string value;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') {
        throw LexError{tok.line, tok.column, "unterminated string literal"};
      }
      char c = text_[pos_];
      advance();
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= text_.size()) {
          throw LexError{tok.line, tok.column, "unterminated string literal"};
        }
        char esc = text_[pos_];
        advance();
        switch (esc) {
          case 'n': value.push_back('\n'); break;
          case 't': value.push_back('\t'); break;
          case 'r': value.push_back('\r'); break;
          case '"': value.push_back('"'); break;
          case '\\': value.push_back('\\'); break;
          default:
            throw LexError{line_, column_,
                           std::string("unsupported escape sequence \\") + esc};
        }
      } else {
        value.push_back(c);
      }
    }
    tok.kind = TokKind::String;
    tok.value = std::move(value);
    if (pos_ < text_.size() && text_[pos_] == '@') {
      advance();
      std::string lang;
      while (pos_ < text_.size()) {
        char c = text_[pos_];
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '-') {
          lang.push_back(c);
          advance();
        } else {
          break;
        }
      }
      if (lang.empty() || !std::isalpha(static_cast<unsigned char>(lang[0]))) {
        throw LexError{line_, column_, "malformed language tag"};
      }
      tok.lang = std::move(lang);
    }
    return tok;
  }

  Token lex_at(Token tok) {
    std::string word;
    word.push_back(text_[pos_]);
    advance();
    while (pos_ < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      word.push_back(text_[pos_]);
      advance();
    }
    if (word != "@prefix") {
      throw LexError{tok.line, tok.column, "unknown directive '" + word + "'"};
    }
    tok.kind = TokKind::AtPrefix;
    return tok;
  }

  Token lex_pname(Token tok) {
    std::string value;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '<' ||
          c == '"' || c == '#') {
        break;
      }
      value.push_back(c);
      advance();
    }
    // A trailing '.' terminates the statement rather than the name.
    if (value.size() > 1 && value.back() == '.') {
      value.pop_back();
      --pos_;
      --column_;
    }
    if (value == "a") {
      tok.kind = TokKind::KeywordA;
      return tok;
    }
    tok.kind = TokKind::PName;
    tok.value = std::move(value);
    return tok;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

struct Term {
  enum class Kind { Iri, KeywordA, Literal } kind = Kind::Iri;
  std::string iri;  // expanded
  std::string text;
  std::optional<std::string> lang;
  std::size_t line = 1;
  std::size_t column = 1;
};

struct Statement {
  Term subject;
  Term predicate;
  Term object;
};

class OntologyParser {
 public:
  OntologyParser(std::string_view text, std::string id, std::string path)
      : lexer_(text), id_(std::move(id)), path_(std::move(path)) {}

  OntologyParseResult run() {
    OntologyParseResult result;
    try {
      parse_statements();
      build_graph();
    } catch (const LexError& e) {
      diagnostics_.push_back(
          {path_, e.line, e.column, e.message, Severity::Error});
    } catch (const Abort&) {
      // first Error diagnostic aborts the parse
    }
    result.diagnostics = std::move(diagnostics_);
    bool has_error = std::any_of(
        result.diagnostics.begin(), result.diagnostics.end(),
        [](const ParseDiagnostic& d) { return d.severity == Severity::Error; });
    if (!has_error) result.graph = std::move(graph_);
    return result;
  }

 private:
  struct Abort {};

  void error(std::size_t line, std::size_t column, std::string message) {
    diagnostics_.push_back(
        {path_, line, column, std::move(message), Severity::Error});
    throw Abort{};
  }

  void warn(std::size_t line, std::size_t column, std::string message) {
    diagnostics_.push_back(
        {path_, line, column, std::move(message), Severity::Warning});
  }

  void parse_statements() {
    while (true) {
      Token tok = lexer_.next();
      if (tok.kind == TokKind::Eof) return;
      if (tok.kind == TokKind::AtPrefix) {
        parse_prefix_decl(tok);
        continue;
      }
      if (tok.kind == TokKind::Dot) {
        error(tok.line, tok.column, "empty statement");
      }
      Statement st;
      st.subject = resolve_term(tok, /*literal_ok=*/false);
      st.predicate = resolve_term(lexer_.next(), /*literal_ok=*/false);
      st.object = resolve_term(lexer_.next(), /*literal_ok=*/true);
      Token dot = lexer_.next();
      if (dot.kind != TokKind::Dot) {
        error(dot.line, dot.column, "expected '.' at end of statement");
      }
      if (st.subject.kind != Term::Kind::Iri) {
        error(st.subject.line, st.subject.column,
              "statement subject must be an IRI");
      }
      statements_.push_back(std::move(st));
    }
  }

  void parse_prefix_decl(const Token& at) {
    Token name = lexer_.next();
    if (name.kind != TokKind::PName || name.value.empty() ||
        name.value.back() != ':') {
      error(name.line, name.column, "expected prefix name ending in ':'");
    }
    std::string prefix = name.value.substr(0, name.value.size() - 1);
    if (prefix.find(':') != std::string::npos) {
      error(name.line, name.column, "malformed prefix name");
    }
    Token iri = lexer_.next();
    if (iri.kind != TokKind::IriRef) {
      error(iri.line, iri.column, "expected IRI reference in prefix declaration");
    }
    Token dot = lexer_.next();
    if (dot.kind != TokKind::Dot) {
      error(dot.line, dot.column, "expected '.' after prefix declaration");
    }
    (void)at;
    prefixes_[prefix] = iri.value;
  }

  Term resolve_term(const Token& tok, bool literal_ok) {
    Term term;
    term.line = tok.line;
    term.column = tok.column;
    switch (tok.kind) {
      case TokKind::KeywordA:
        term.kind = Term::Kind::KeywordA;
        return term;
      case TokKind::String:
        if (!literal_ok) {
          error(tok.line, tok.column, "string literal not allowed here");
        }
        term.kind = Term::Kind::Literal;
        term.text = tok.value;
        term.lang = tok.lang;
        return term;
      case TokKind::IriRef:
        term.kind = Term::Kind::Iri;
        term.iri = tok.value;
        break;
      case TokKind::PName: {
        auto colon = tok.value.find(':');
        if (colon == std::string::npos) {
          error(tok.line, tok.column,
                "expected a prefixed name or IRI, got '" + tok.value + "'");
        }
        std::string prefix = tok.value.substr(0, colon);
        std::string local = tok.value.substr(colon + 1);
        auto it = prefixes_.find(prefix);
        if (it == prefixes_.end()) {
          error(tok.line, tok.column, "undeclared prefix '" + prefix + ":'");
        }
        term.kind = Term::Kind::Iri;
        term.iri = it->second + local;
        break;
      }
      default:
        error(tok.line, tok.column, "unexpected token");
    }
    if (!iri_text_ok(term.iri)) {
      error(tok.line, tok.column, "malformed IRI '" + term.iri + "'");
    }
    if (!absolute_iri_text(term.iri)) {
      error(tok.line, tok.column,
            "IRI is not absolute after prefix expansion: '" + term.iri + "'");
    }
    return term;
  }

  void build_graph() {
    const std::string owl_class = ns(kOwlNs, "Class");
    const std::string owl_obj_prop = ns(kOwlNs, "ObjectProperty");
    const std::string owl_data_prop = ns(kOwlNs, "DatatypeProperty");
    const std::string owl_individual = ns(kOwlNs, "NamedIndividual");
    const std::string rdfs_subclass = ns(kRdfsNs, "subClassOf");
    const std::string owl_equivalent = ns(kOwlNs, "equivalentClass");
    const std::string owl_disjoint = ns(kOwlNs, "disjointWith");
    const std::string rdfs_label = ns(kRdfsNs, "label");
    const std::string skos_alt = ns(kSkosNs, "altLabel");

    // First pass: declarations.
    std::map<std::string, EntityKind> kinds;
    for (const Statement& st : statements_) {
      if (st.predicate.kind != Term::Kind::KeywordA) continue;
      if (st.object.kind != Term::Kind::Iri) {
        error(st.object.line, st.object.column,
              "declaration object must be an IRI");
      }
      EntityKind kind;
      if (st.object.iri == owl_class) {
        kind = EntityKind::Class;
      } else if (st.object.iri == owl_obj_prop) {
        kind = EntityKind::ObjectProperty;
      } else if (st.object.iri == owl_data_prop) {
        kind = EntityKind::DataProperty;
      } else if (st.object.iri == owl_individual) {
        kind = EntityKind::Individual;
      } else {
        warn(st.object.line, st.object.column,
             "unrecognized declaration type <" + st.object.iri +
                 ">, statement skipped");
        continue;
      }
      auto [it, inserted] = kinds.emplace(st.subject.iri, kind);
      if (!inserted && it->second != kind) {
        error(st.subject.line, st.subject.column,
              "conflicting declaration for <" + st.subject.iri + ">");
      }
    }

    // Second pass: axioms and labels.
    std::vector<Axiom> axioms;
    std::map<std::string, std::set<Label>> rdfs_labels;
    std::map<std::string, std::set<Label>> alt_labels;
    for (const Statement& st : statements_) {
      if (st.predicate.kind == Term::Kind::KeywordA) continue;
      const std::string& pred = st.predicate.iri;
      bool is_axiom = pred == rdfs_subclass || pred == owl_equivalent ||
                      pred == owl_disjoint;
      if (is_axiom) {
        if (st.object.kind != Term::Kind::Iri) {
          error(st.object.line, st.object.column,
                "axiom object must be an IRI");
        }
        for (const Term* t : {&st.subject, &st.object}) {
          auto it = kinds.find(t->iri);
          if (it == kinds.end() || it->second != EntityKind::Class) {
            error(t->line, t->column,
                  "axiom references <" + t->iri +
                      "> which is not declared as a class");
          }
        }
        Iri lhs{st.subject.iri};
        Iri rhs{st.object.iri};
        if (pred == rdfs_subclass) {
          axioms.push_back(Axiom::sub_class_of(lhs, rhs));
        } else if (pred == owl_equivalent) {
          axioms.push_back(Axiom::equivalent_class(lhs, rhs));
        } else {
          axioms.push_back(Axiom::disjoint_with(lhs, rhs));
        }
        continue;
      }
      if (pred == rdfs_label || pred == skos_alt) {
        if (st.object.kind != Term::Kind::Literal) {
          error(st.object.line, st.object.column,
                "label object must be a string literal");
        }
        if (st.object.text.empty()) {
          error(st.object.line, st.object.column, "empty label text");
        }
        if (!kinds.contains(st.subject.iri)) {
          warn(st.subject.line, st.subject.column,
               "label on undeclared entity <" + st.subject.iri +
                   ">, statement skipped");
          continue;
        }
        Label label{st.object.text, st.object.lang};
        if (pred == rdfs_label) {
          rdfs_labels[st.subject.iri].insert(std::move(label));
        } else {
          alt_labels[st.subject.iri].insert(std::move(label));
        }
        continue;
      }
      warn(st.predicate.line, st.predicate.column,
           "unrecognized predicate <" + pred + ">, statement skipped");
    }

    std::vector<Entity> entities;
    for (const auto& [iri, kind] : kinds) {
      std::vector<Label> labels;
      auto r = rdfs_labels.find(iri);
      if (r != rdfs_labels.end()) {
        // Smallest preferred label becomes the primary one; order insensitivity
        // beats file order here.
        labels.assign(r->second.begin(), r->second.end());
      }
      auto a = alt_labels.find(iri);
      if (a != alt_labels.end()) {
        labels.insert(labels.end(), a->second.begin(), a->second.end());
      }
      entities.push_back(make_entity(Iri{iri}, kind, std::move(labels)));
    }
    graph_ = KnowledgeGraph::build(id_, std::move(entities), std::move(axioms));
  }

  Lexer lexer_;
  std::string id_;
  std::string path_;
  std::map<std::string, std::string> prefixes_;
  std::vector<Statement> statements_;
  std::vector<ParseDiagnostic> diagnostics_;
  std::optional<KnowledgeGraph> graph_;
};

std::string escape_literal(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string_view kind_term(EntityKind kind) {
  switch (kind) {
    case EntityKind::Class: return "owl:Class";
    case EntityKind::ObjectProperty: return "owl:ObjectProperty";
    case EntityKind::DataProperty: return "owl:DatatypeProperty";
    case EntityKind::Individual: return "owl:NamedIndividual";
  }
  return "?";
}

}  // namespace

std::string ParseDiagnostic::to_string() const {
  std::ostringstream out;
  out << path << ':' << line << ':' << column << ": "
      << (severity == Severity::Error ? "error" : "warning") << ": " << message;
  return out.str();
}

OntologyParseResult parse_ontology(std::string_view text, std::string id,
                                   std::string path) {
  OntologyParser parser(text, std::move(id), std::move(path));
  return parser.run();
}

OntologyParseResult parse_ontology_file(const std::filesystem::path& file,
                                        std::string id) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    OntologyParseResult result;
    result.diagnostics.push_back(
        {file.string(), 1, 1, "cannot open file", Severity::Error});
    return result;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (id.empty()) id = file.stem().string();
  return parse_ontology(buffer.str(), std::move(id), file.string());
}

std::string serialize_ontology(const KnowledgeGraph& kg) {
  std::ostringstream out;
  out << "@prefix owl: <" << kOwlNs << "> .\n";
  out << "@prefix rdfs: <" << kRdfsNs << "> .\n";
  out << "@prefix skos: <" << kSkosNs << "> .\n";
  out << "\n";
  for (const auto& [iri, entity] : kg.entities()) {
    out << '<' << iri.str() << "> a " << kind_term(entity.kind) << " .\n";
    for (std::size_t i = 0; i < entity.labels.size(); ++i) {
      const Label& label = entity.labels[i];
      out << '<' << iri.str() << "> "
          << (i == 0 ? "rdfs:label" : "skos:altLabel") << " \""
          << escape_literal(label.text) << '"';
      if (label.lang) out << '@' << *label.lang;
      out << " .\n";
    }
  }
  if (!kg.axioms().empty()) out << "\n";
  for (const Axiom& ax : kg.axioms()) {
    out << '<' << ax.lhs.str() << "> ";
    switch (ax.kind) {
      case AxiomKind::SubClassOf: out << "rdfs:subClassOf"; break;
      case AxiomKind::EquivalentClass: out << "owl:equivalentClass"; break;
      case AxiomKind::DisjointWith: out << "owl:disjointWith"; break;
    }
    out << " <" << ax.rhs.str() << "> .\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Alignment TSV

namespace {

bool valid_confidence_text(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = 0;
  std::size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    ++i;
    ++digits;
  }
  if (digits == 0) return false;
  if (i == s.size()) return true;
  if (s[i] != '.') return false;
  ++i;
  std::size_t fraction = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    ++i;
    ++fraction;
  }
  return i == s.size() && fraction >= 1 && fraction <= 6;
}

}  // namespace

std::string format_confidence(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

AlignmentParseResult read_alignment(std::string_view text, std::string path) {
  AlignmentParseResult result;
  Alignment alignment;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto fail = [&](std::size_t column, std::string message) {
    result.diagnostics.push_back(
        {path, line_no, column, std::move(message), Severity::Error});
  };

  while (pos <= text.size() && result.diagnostics.empty()) {
    if (pos == text.size()) break;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line[0] == '#') continue;

    std::vector<std::string_view> fields;
    std::vector<std::size_t> offsets;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      offsets.push_back(start);
      if (tab == std::string_view::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() != 4) {
      fail(1, "expected 4 tab-separated columns, got " +
                  std::to_string(fields.size()));
      break;
    }
    bool row_ok = true;
    for (int i = 0; i < 2 && row_ok; ++i) {
      if (!iri_text_ok(fields[i]) || !absolute_iri_text(fields[i])) {
        fail(offsets[i] + 1,
             "invalid IRI '" + std::string(fields[i]) + "'");
        row_ok = false;
      }
    }
    if (!row_ok) break;
    auto relation = relation_from_symbol(fields[2]);
    if (!relation) {
      fail(offsets[2] + 1,
           "unknown relation symbol '" + std::string(fields[2]) + "'");
      break;
    }
    if (!valid_confidence_text(fields[3])) {
      fail(offsets[3] + 1,
           "unparsable confidence '" + std::string(fields[3]) + "'");
      break;
    }
    double confidence = 0.0;
    auto [ptr, ec] = std::from_chars(fields[3].data(),
                                     fields[3].data() + fields[3].size(),
                                     confidence);
    if (ec != std::errc{} || ptr != fields[3].data() + fields[3].size()) {
      fail(offsets[3] + 1,
           "unparsable confidence '" + std::string(fields[3]) + "'");
      break;
    }
    if (confidence < 0.0 || confidence > 1.0) {
      fail(offsets[3] + 1, "confidence out of range [0,1]");
      break;
    }
    Mapping mapping{Iri{std::string(fields[0])}, Iri{std::string(fields[1])},
                    *relation, confidence};
    if (!alignment.add(std::move(mapping))) {
      fail(1, "duplicate mapping key");
      break;
    }
  }
  if (result.diagnostics.empty()) result.alignment = std::move(alignment);
  return result;
}

AlignmentParseResult read_alignment_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    AlignmentParseResult result;
    result.diagnostics.push_back(
        {file.string(), 1, 1, "cannot open file", Severity::Error});
    return result;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return read_alignment(buffer.str(), file.string());
}

std::string write_alignment(const Alignment& a,
                            const std::map<MappingKey, ScoreAnnotation>* scores) {
  std::ostringstream out;
  for (const auto& [key, m] : a.entries()) {
    if (scores != nullptr) {
      auto it = scores->find(key);
      if (it != scores->end()) {
        out << "# score=" << format_confidence(it->second.score)
            << " status=" << it->second.status << "\n";
      }
    }
    out << m.source.str() << '\t' << m.target.str() << '\t'
        << relation_symbol(m.relation) << '\t'
        << format_confidence(m.confidence) << '\n';
  }
  return out.str();
}

}  // namespace kga::ingest
