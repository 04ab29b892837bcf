#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>

#include "kga/benchgen.hpp"
#include "kga/evaluation.hpp"
#include "kga/ingest.hpp"
#include "kga/lexical.hpp"
#include "kga/reasoner.hpp"
#include "support/fixtures.hpp"

using namespace kga;
using namespace kga::bench;
using namespace kga_test;

TEST_CASE("config validation") {
  BenchConfig cfg;
  cfg.n_classes = 0;
  CHECK_THROWS_AS(cfg.validate(), KgaError);
  cfg = BenchConfig{};
  cfg.n_classes = 10;
  cfg.n_conflicts = 3;  // exceeds n/4
  CHECK_THROWS_AS(cfg.validate(), KgaError);
  cfg.n_conflicts = 2;
  CHECK_NOTHROW(cfg.validate());
  cfg.label_noise = 1.5;
  CHECK_THROWS_AS(cfg.validate(), KgaError);
}

TEST_CASE("same seed, same bytes") {
  BenchConfig cfg;
  cfg.seed = 42;
  cfg.n_classes = 40;
  cfg.n_conflicts = 3;
  BenchResult a = generate(cfg);
  BenchResult b = generate(cfg);
  CHECK(ingest::serialize_ontology(a.source) ==
        ingest::serialize_ontology(b.source));
  CHECK(ingest::serialize_ontology(a.target) ==
        ingest::serialize_ontology(b.target));
  CHECK(ingest::write_alignment(a.ground_truth) ==
        ingest::write_alignment(b.ground_truth));
  CHECK(a.conflict_keys == b.conflict_keys);

  BenchConfig other = cfg;
  other.seed = 43;
  BenchResult c = generate(other);
  CHECK(ingest::serialize_ontology(a.source) !=
        ingest::serialize_ontology(c.source));
}

TEST_CASE("ground truth is a 1:1 class bijection") {
  BenchConfig cfg;
  cfg.seed = 7;
  cfg.n_classes = 50;
  cfg.n_conflicts = 4;
  BenchResult r = generate(cfg);
  CHECK(r.ground_truth.size() == 50);
  std::set<Iri> sources, targets;
  for (const auto& [key, m] : r.ground_truth.entries()) {
    CHECK(m.relation == Relation::Equivalent);
    CHECK(m.confidence == 1.0);
    CHECK(sources.insert(m.source).second);
    CHECK(targets.insert(m.target).second);
    CHECK(r.source.declares_class(m.source));
    CHECK(r.target.declares_class(m.target));
  }
  CHECK(sources.size() == r.source.entities().size());
  CHECK(targets.size() == r.target.entities().size());
}

TEST_CASE("planted conflicts are exactly the unsatisfiable concepts") {
  BenchConfig cfg;
  cfg.seed = 11;
  cfg.n_classes = 60;
  cfg.n_conflicts = 5;
  BenchResult r = generate(cfg);
  REQUIRE(r.conflict_keys.size() == 10);  // two mappings per conflict

  // The input union must be coherent on its own.
  reasoner::ClosureResult base = reasoner::closure(r.source, r.target, {});
  CHECK(base.unsat.empty());

  reasoner::ClosureResult cr =
      reasoner::closure(r.source, r.target, r.ground_truth);
  REQUIRE_FALSE(cr.truncated);
  CHECK(cr.unsat.size() == 2 * 5);

  std::set<MappingKey> manifest(r.conflict_keys.begin(),
                                r.conflict_keys.end());
  std::set<Iri> manifest_endpoints;
  for (const MappingKey& key : r.conflict_keys) {
    manifest_endpoints.insert(key.source);
    manifest_endpoints.insert(key.target);
  }
  for (const auto& report : cr.unsat) {
    CHECK(manifest_endpoints.contains(report.concept_iri));
    REQUIRE(report.justifications.size() == 1);
    REQUIRE(report.justifications[0].size() == 2);
    for (std::uint32_t idx : report.justifications[0]) {
      CHECK(manifest.contains(cr.mapping_keys[idx]));
    }
  }
}

TEST_CASE("four classes and one conflict reproduce the lymphokine shape") {
  bool found = false;
  for (std::uint64_t seed = 0; seed < 100 && !found; ++seed) {
    BenchConfig cfg;
    cfg.seed = seed;
    cfg.n_classes = 4;
    cfg.n_conflicts = 1;
    cfg.label_noise = 0.0;
    cfg.edge_delete_rate = 0.0;
    BenchResult r;
    try {
      r = generate(cfg);
    } catch (const KgaError&) {
      continue;  // this tree shape cannot host a conflict
    }
    found = true;
    REQUIRE(r.conflict_keys.size() == 2);

    // Identify the child and parent mappings.
    const MappingKey* child_key = nullptr;
    const MappingKey* parent_key = nullptr;
    for (const MappingKey& key : r.conflict_keys) {
      bool is_child = false;
      for (const Axiom& ax : r.source.axioms()) {
        if (ax.kind == AxiomKind::SubClassOf && ax.lhs == key.source) {
          // the child's source-side parent must be the other conflict key
          for (const MappingKey& other : r.conflict_keys) {
            if (&other != &key && other.source == ax.rhs) is_child = true;
          }
        }
      }
      if (is_child) {
        child_key = &key;
      } else {
        parent_key = &key;
      }
    }
    REQUIRE(child_key != nullptr);
    REQUIRE(parent_key != nullptr);

    // Target side: the child's counterpart sits under a class disjoint from
    // the parent's counterpart.
    REQUIRE(r.target.axioms().size() >= 2);
    const Axiom* disjoint = nullptr;
    for (const Axiom& ax : r.target.axioms()) {
      if (ax.kind == AxiomKind::DisjointWith) disjoint = &ax;
    }
    REQUIRE(disjoint != nullptr);
    CHECK((disjoint->lhs == parent_key->target ||
           disjoint->rhs == parent_key->target));
    Iri other_parent = disjoint->lhs == parent_key->target ? disjoint->rhs
                                                           : disjoint->lhs;
    bool child_under_other = false;
    for (const Axiom& ax : r.target.axioms()) {
      if (ax.kind == AxiomKind::SubClassOf && ax.lhs == child_key->target &&
          ax.rhs == other_parent) {
        child_under_other = true;
      }
    }
    CHECK(child_under_other);

    // And the planted pair is jointly unsatisfiable but individually fine.
    reasoner::ClosureResult cr =
        reasoner::closure(r.source, r.target, r.ground_truth);
    CHECK(cr.unsat.size() == 2);
    Alignment one;
    one.add(*r.ground_truth.find(*child_key));
    CHECK(reasoner::closure(r.source, r.target, one).unsat.empty());
  }
  CHECK(found);
}

TEST_CASE("clean copy is recovered exactly by the matcher at threshold 1") {
  BenchConfig cfg;
  cfg.seed = 5;
  cfg.n_classes = 60;
  cfg.label_noise = 0.0;
  cfg.edge_delete_rate = 0.0;
  cfg.n_conflicts = 0;
  BenchResult r = generate(cfg);
  lexical::MatcherConfig mcfg{lexical::Metric::Combined, 1.0,
                              lexical::Blocking::SharedToken};
  Alignment candidates = lexical::generate_candidates(r.source, r.target, mcfg);
  evaluation::EvalReport rep =
      evaluation::evaluate(candidates, r.ground_truth);
  CHECK(rep.f1 == 1.0);
}

TEST_CASE("write_bench emits the four files; manifest reads back") {
  TempDir dir;
  BenchConfig cfg;
  cfg.seed = 9;
  cfg.n_classes = 24;
  cfg.n_conflicts = 2;
  BenchResult r = generate(cfg);
  write_bench(r, dir.path);
  for (const char* name :
       {"source.ttl", "target.ttl", "reference.tsv", "manifest.tsv"}) {
    CHECK(std::filesystem::exists(dir.file(name)));
  }
  auto source = ingest::parse_ontology_file(dir.file("source.ttl"), "source");
  REQUIRE(source.ok());
  CHECK(*source.graph == r.source);
  auto reference = ingest::read_alignment_file(dir.file("reference.tsv"));
  REQUIRE(reference.ok());
  CHECK(*reference.alignment == r.ground_truth);
  CHECK(read_manifest(dir.file("manifest.tsv")) == r.conflict_keys);
}

TEST_CASE("perturbed labels never collide with another class") {
  BenchConfig cfg;
  cfg.seed = 13;
  cfg.n_classes = 120;
  cfg.label_noise = 0.8;  // aggressive noise for this check
  cfg.n_conflicts = 0;
  BenchResult r = generate(cfg);
  std::map<std::set<std::string>, int> seen;
  for (const auto& [iri, e] : r.target.entities()) {
    REQUIRE(e.labels.size() == 1);
    auto tokens = lexical::normalize(e.labels[0].text).tokens;
    std::set<std::string> key(tokens.begin(), tokens.end());
    CHECK(++seen[key] == 1);
  }
}
