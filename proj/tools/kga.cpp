#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "kga/benchgen.hpp"
#include "kga/evaluation.hpp"
#include "kga/ingest.hpp"
#include "kga/lexical.hpp"
#include "kga/log.hpp"
#include "kga/model.hpp"
#include "kga/reasoner.hpp"
#include "kga/report.hpp"
#include "kga/selector.hpp"
#include "kga/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitFlagged = 3;

void print_diagnostics(const std::vector<kga::ingest::ParseDiagnostic>& diags) {
  for (const auto& d : diags) std::cerr << d.to_string() << "\n";
}

std::optional<kga::KnowledgeGraph> load_graph(const std::string& path,
                                              const std::string& id) {
  auto result = kga::ingest::parse_ontology_file(path, id);
  print_diagnostics(result.diagnostics);
  if (!result.ok()) return std::nullopt;
  kga::log::info("parsed " + path + ": " +
                 std::to_string(result.graph->entities().size()) +
                 " entities, " + std::to_string(result.graph->axioms().size()) +
                 " axioms");
  return std::move(result.graph);
}

std::optional<kga::Alignment> load_alignment(const std::string& path) {
  auto result = kga::ingest::read_alignment_file(path);
  print_diagnostics(result.diagnostics);
  if (!result.ok()) return std::nullopt;
  kga::log::info("read " + path + ": " + std::to_string(result.alignment->size()) +
                 " mappings");
  return std::move(result.alignment);
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return false;
  }
  out << content;
  return true;
}

struct MatchOptions {
  std::string source, target, out;
  std::string metric = "combined";
  double threshold = 0.5;
  std::string blocking = "shared-token";
};

int run_match(const MatchOptions& opt) {
  auto metric = kga::lexical::metric_from_string(opt.metric);
  auto blocking = kga::lexical::blocking_from_string(opt.blocking);
  if (!metric || !blocking) {
    std::cerr << "error: unknown metric or blocking value\n";
    return kExitInput;
  }
  auto kg1 = load_graph(opt.source, "source");
  auto kg2 = load_graph(opt.target, "target");
  if (!kg1 || !kg2) return kExitInput;

  kga::lexical::MatcherConfig cfg{*metric, opt.threshold, *blocking};
  kga::Alignment candidates;
  try {
    candidates = kga::lexical::generate_candidates(*kg1, *kg2, cfg);
  } catch (const kga::KgaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  if (!write_file(opt.out, kga::ingest::write_alignment(candidates))) {
    return kExitInput;
  }
  std::cout << candidates.size() << " candidates written to " << opt.out
            << "\n";
  return kExitOk;
}

struct RepairOptions {
  std::string source, target, alignment, out, report_path;
  std::string mode = "hard";
  double theta = 0.7;
  int cardinality = 1;
  double gamma = 0.0;
  int max_soft_iterations = 10;
  std::size_t j_cap = 16;
  bool exact = false;
};

int run_repair(const RepairOptions& opt) {
  auto mode = kga::selector::mode_from_string(opt.mode);
  if (!mode) {
    std::cerr << "error: unknown repair mode '" << opt.mode << "'\n";
    return kExitInput;
  }
  if (opt.exact && *mode != kga::selector::Mode::Hard) {
    std::cerr << "error: --exact is only available with --mode hard\n";
    return kExitInput;
  }
  auto kg1 = load_graph(opt.source, "source");
  auto kg2 = load_graph(opt.target, "target");
  auto candidates = load_alignment(opt.alignment);
  if (!kg1 || !kg2 || !candidates) return kExitInput;

  kga::selector::SelectorConfig cfg;
  cfg.mode = *mode;
  cfg.theta = opt.theta;
  cfg.cardinality_t = opt.cardinality;
  cfg.gamma = opt.gamma;
  cfg.max_soft_iterations = opt.max_soft_iterations;
  cfg.j_cap = opt.j_cap;

  auto start = std::chrono::steady_clock::now();
  kga::selector::SelectionResult sel;
  try {
    sel = opt.exact
              ? kga::selector::select_exact_hard(*kg1, *kg2, *candidates, cfg)
              : kga::selector::select(*kg1, *kg2, *candidates, cfg);
  } catch (const kga::KgaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();

  std::map<kga::MappingKey, kga::ingest::ScoreAnnotation> annotations;
  for (const auto& record : sel.records) {
    if (record.status == kga::selector::MappingStatus::Accepted) {
      annotations[record.mapping.key()] = {record.objective_score,
                                           std::string(to_string(record.status))};
    }
  }
  if (!write_file(opt.out,
                  kga::ingest::write_alignment(sel.accepted, &annotations))) {
    return kExitInput;
  }

  double objective = kga::selector::objective_value(sel.records);
  if (!opt.report_path.empty()) {
    kga::report::RunReport rep;
    rep.tool_version = std::string(kga::kVersion);
    rep.command = "repair";
    rep.inputs = {
        {"source", opt.source, kga::report::file_digest(opt.source)},
        {"target", opt.target, kga::report::file_digest(opt.target)},
        {"alignment", opt.alignment, kga::report::file_digest(opt.alignment)},
    };
    rep.config = {
        {"mode", std::string(to_string(cfg.mode))},
        {"theta", kga::ingest::format_confidence(cfg.theta)},
        {"cardinality", std::to_string(cfg.cardinality_t)},
        {"gamma", kga::ingest::format_confidence(cfg.gamma)},
        {"max-soft-iterations", std::to_string(cfg.max_soft_iterations)},
        {"j-cap", std::to_string(cfg.j_cap)},
        {"exact", opt.exact ? "true" : "false"},
        {"out", opt.out},
    };
    rep.mappings = sel.records;
    rep.unsat = sel.final_closure.unsat;
    rep.mapping_keys = sel.final_closure.mapping_keys;
    rep.objective = objective;
    rep.truncated = sel.truncated;
    rep.hit_iteration_cap = sel.hit_iteration_cap;
    rep.timing_ms = elapsed;
    if (!write_file(opt.report_path, kga::report::render(rep))) {
      return kExitInput;
    }
  }

  std::size_t accepted = sel.accepted.size();
  std::cout << "accepted " << accepted << " of " << sel.records.size()
            << " candidates; objective "
            << kga::ingest::format_confidence(objective) << "; "
            << sel.final_closure.unsat.size() << " unsatisfiable concepts\n";
  if (sel.hit_iteration_cap || sel.truncated) return kExitFlagged;
  return kExitOk;
}

struct DiagnoseOptions {
  std::string source, target, alignment, report_path;
};

int run_diagnose(const DiagnoseOptions& opt) {
  auto kg1 = load_graph(opt.source, "source");
  auto kg2 = load_graph(opt.target, "target");
  auto alignment = load_alignment(opt.alignment);
  if (!kg1 || !kg2 || !alignment) return kExitInput;

  kga::reasoner::ClosureResult cr;
  try {
    cr = kga::reasoner::closure(*kg1, *kg2, *alignment);
  } catch (const kga::KgaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  std::ostringstream out;
  out << "# kga diagnose report\n";
  out << "version\t" << kga::kVersion << "\n";
  out << "input\tsource\t" << opt.source << "\t"
      << kga::report::file_digest(opt.source) << "\n";
  out << "input\ttarget\t" << opt.target << "\t"
      << kga::report::file_digest(opt.target) << "\n";
  out << "input\talignment\t" << opt.alignment << "\t"
      << kga::report::file_digest(opt.alignment) << "\n";
  out << "unsat-count\t" << cr.unsat.size() << "\n";
  out << "truncated\t" << (cr.truncated ? "true" : "false") << "\n";
  out << "[unsat]\n";
  out << "concept\tjustifications\n";
  for (const auto& report : cr.unsat) {
    out << report.concept_iri.str() << "\t";
    for (std::size_t j = 0; j < report.justifications.size(); ++j) {
      if (j > 0) out << " ";
      out << "{";
      for (std::size_t i = 0; i < report.justifications[j].size(); ++i) {
        if (i > 0) out << "; ";
        out << cr.mapping_keys[report.justifications[j][i]].to_string();
      }
      out << "}";
    }
    out << "\n";
  }
  out << "[bottom]\n";
  out << "entity\tcount\n";
  std::set<kga::Iri> endpoints;
  for (const auto& [key, m] : alignment->entries()) {
    endpoints.insert(m.source);
    endpoints.insert(m.target);
  }
  for (const kga::Iri& e : endpoints) {
    out << e.str() << "\t"
        << kga::reasoner::unsat_count(e, *alignment, cr) << "\n";
  }

  std::cout << out.str();
  if (!opt.report_path.empty() && !write_file(opt.report_path, out.str())) {
    return kExitInput;
  }
  return kExitOk;  // diagnosis, not failure
}

void print_eval(const kga::evaluation::EvalReport& rep) {
  std::cout << "tp\t" << rep.true_positives << "\n";
  std::cout << "fp\t" << rep.false_positives << "\n";
  std::cout << "fn\t" << rep.false_negatives << "\n";
  std::cout << "precision\t" << kga::ingest::format_confidence(rep.precision)
            << "\n";
  std::cout << "recall\t" << kga::ingest::format_confidence(rep.recall) << "\n";
  std::cout << "f1\t" << kga::ingest::format_confidence(rep.f1) << "\n";
  std::cout << "supervised-objective\t" << rep.true_positives << "\n";
}

int run_eval(const std::string& alignment_path,
             const std::string& reference_path) {
  auto alignment = load_alignment(alignment_path);
  auto reference = load_alignment(reference_path);
  if (!alignment || !reference) return kExitInput;
  print_eval(kga::evaluation::evaluate(*alignment, *reference));
  return kExitOk;
}

struct CalibrateOptions {
  std::string source, target, candidates, reference;
  std::string mode = "threshold";
  double grid_step = 0.01;
  int cardinality = 1;
  double gamma = 0.0;
  int max_soft_iterations = 10;
};

int run_calibrate(const CalibrateOptions& opt) {
  auto mode = kga::selector::mode_from_string(opt.mode);
  if (!mode) {
    std::cerr << "error: unknown repair mode '" << opt.mode << "'\n";
    return kExitInput;
  }
  auto kg1 = load_graph(opt.source, "source");
  auto kg2 = load_graph(opt.target, "target");
  auto candidates = load_alignment(opt.candidates);
  auto reference = load_alignment(opt.reference);
  if (!kg1 || !kg2 || !candidates || !reference) return kExitInput;

  kga::selector::SelectorConfig cfg;
  cfg.mode = *mode;
  cfg.cardinality_t = opt.cardinality;
  cfg.gamma = opt.gamma;
  cfg.max_soft_iterations = opt.max_soft_iterations;
  try {
    auto result = kga::evaluation::calibrate(*kg1, *kg2, *candidates,
                                             *reference, cfg, opt.grid_step);
    std::cout << "parameter\t"
              << kga::ingest::format_confidence(result.parameter) << "\n";
    print_eval(result.report);
  } catch (const kga::KgaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

struct DiffOptions {
  std::string kg1, kg2, alignment;
};

int run_diff(const DiffOptions& opt) {
  auto kg1 = load_graph(opt.kg1, "kg1");
  auto kg2 = load_graph(opt.kg2, "kg2");
  if (!kg1 || !kg2) return kExitInput;

  std::vector<kga::Iri> sigma;
  for (const auto& [iri, e] : kg1->entities()) sigma.push_back(iri);
  for (const auto& [iri, e] : kg2->entities()) sigma.push_back(iri);

  std::vector<kga::Axiom> base;
  base.insert(base.end(), kg1->axioms().begin(), kg1->axioms().end());
  base.insert(base.end(), kg2->axioms().begin(), kg2->axioms().end());

  std::vector<kga::reasoner::DiffStatement> statements;
  try {
    if (!opt.alignment.empty()) {
      auto alignment = load_alignment(opt.alignment);
      if (!alignment) return kExitInput;
      std::vector<kga::Axiom> aligned;
      for (const auto& entry : kga::aligned_axioms(*kg1, *kg2, *alignment)) {
        aligned.push_back(entry.axiom);
      }
      statements = kga::reasoner::deductive_diff(base, aligned, sigma);
    } else {
      statements = kga::reasoner::deductive_diff(kg1->axioms(), kg2->axioms(),
                                                 sigma);
    }
  } catch (const kga::KgaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  for (const auto& st : statements) std::cout << st.to_string() << "\n";
  std::cout << statements.size() << " statements\n";
  return kExitOk;
}

struct BenchgenOptions {
  std::uint64_t seed = 0;
  int n_classes = 100;
  int branching = 4;
  double label_noise = 0.1;
  double edge_delete_rate = 0.05;
  int n_conflicts = 0;
  std::string out_dir;
};

int run_benchgen(const BenchgenOptions& opt) {
  kga::bench::BenchConfig cfg;
  cfg.seed = opt.seed;
  cfg.n_classes = opt.n_classes;
  cfg.branching = opt.branching;
  cfg.label_noise = opt.label_noise;
  cfg.edge_delete_rate = opt.edge_delete_rate;
  cfg.n_conflicts = opt.n_conflicts;
  try {
    kga::bench::BenchResult result = kga::bench::generate(cfg);
    kga::bench::write_bench(result, opt.out_dir);
    std::cout << "wrote " << opt.out_dir << " (" << cfg.n_classes
              << " classes, " << cfg.n_conflicts << " conflicts)\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kga — knowledge graph alignment toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kga::kVersion));

  MatchOptions match;
  CLI::App* cmd_match = app.add_subcommand(
      "match", "Generate candidate mappings from entity labels");
  cmd_match->add_option("--source", match.source, "Source ontology (.ttl)")
      ->required();
  cmd_match->add_option("--target", match.target, "Target ontology (.ttl)")
      ->required();
  cmd_match->add_option("--out", match.out, "Candidate alignment output (.tsv)")
      ->required();
  cmd_match->add_option("--metric", match.metric,
                        "levenshtein|jaro-winkler|jaccard|combined");
  cmd_match->add_option("--candidate-threshold", match.threshold,
                        "Minimum similarity for a candidate (default 0.5)");
  cmd_match->add_option("--blocking", match.blocking, "none|shared-token");

  RepairOptions repair;
  CLI::App* cmd_repair = app.add_subcommand(
      "repair", "Filter an alignment under a consistency objective");
  cmd_repair->add_option("--source", repair.source, "Source ontology")
      ->required();
  cmd_repair->add_option("--target", repair.target, "Target ontology")
      ->required();
  cmd_repair->add_option("--alignment", repair.alignment, "Candidate TSV")
      ->required();
  cmd_repair->add_option("--mode", repair.mode, "hard|threshold|soft|none")
      ->required();
  cmd_repair->add_option("--theta", repair.theta,
                         "Threshold mode: confidence exempting a mapping from "
                         "the consistency check (default 0.7)");
  cmd_repair->add_option("--cardinality", repair.cardinality,
                         "Per-entity cap on accepted mappings (default 1)");
  cmd_repair->add_option("--gamma", repair.gamma,
                         "Soft mode: score floor (default 0)");
  cmd_repair->add_option("--max-soft-iterations", repair.max_soft_iterations,
                         "Soft mode: removal iteration cap (default 10)");
  cmd_repair->add_option("--j-cap", repair.j_cap,
                         "Max stored justifications per derived fact");
  cmd_repair->add_flag("--exact", repair.exact,
                       "Exhaustive hard-mode optimum (≤ 20 candidates)");
  cmd_repair->add_option("--out", repair.out, "Repaired alignment output")
      ->required();
  cmd_repair->add_option("--report", repair.report_path, "Run report path");

  DiagnoseOptions diagnose;
  CLI::App* cmd_diagnose = app.add_subcommand(
      "diagnose", "Report unsatisfiable concepts and involved mappings");
  cmd_diagnose->add_option("--source", diagnose.source, "Source ontology")
      ->required();
  cmd_diagnose->add_option("--target", diagnose.target, "Target ontology")
      ->required();
  cmd_diagnose->add_option("--alignment", diagnose.alignment, "Alignment TSV")
      ->required();
  cmd_diagnose->add_option("--report", diagnose.report_path, "Report path");

  std::string eval_alignment, eval_reference;
  CLI::App* cmd_eval =
      app.add_subcommand("eval", "Score an alignment against a reference");
  cmd_eval->add_option("--alignment", eval_alignment, "Alignment TSV")
      ->required();
  cmd_eval->add_option("--reference", eval_reference, "Reference TSV")
      ->required();

  CalibrateOptions calibrate;
  CLI::App* cmd_calibrate = app.add_subcommand(
      "calibrate", "Sweep a selector parameter against a reference");
  cmd_calibrate->add_option("--source", calibrate.source, "Source ontology")
      ->required();
  cmd_calibrate->add_option("--target", calibrate.target, "Target ontology")
      ->required();
  cmd_calibrate
      ->add_option("--candidates", calibrate.candidates, "Candidate TSV")
      ->required();
  cmd_calibrate
      ->add_option("--reference", calibrate.reference, "Reference TSV")
      ->required();
  cmd_calibrate->add_option("--mode", calibrate.mode,
                            "hard|threshold|soft|none (default threshold)");
  cmd_calibrate->add_option("--grid-step", calibrate.grid_step,
                            "Sweep step (default 0.01)");
  cmd_calibrate->add_option("--cardinality", calibrate.cardinality,
                            "Per-entity cap (default 1)");
  cmd_calibrate->add_option("--gamma", calibrate.gamma,
                            "Soft mode score floor");
  cmd_calibrate->add_option("--max-soft-iterations",
                            calibrate.max_soft_iterations,
                            "Soft mode iteration cap");

  DiffOptions diff;
  CLI::App* cmd_diff = app.add_subcommand(
      "diff", "Deductive difference between two graphs (optionally aligned)");
  cmd_diff->add_option("--kg1", diff.kg1, "First ontology")->required();
  cmd_diff->add_option("--kg2", diff.kg2, "Second ontology")->required();
  cmd_diff->add_option("--alignment", diff.alignment,
                       "Alignment TSV; when given, diffs KG∅ against KG_M");

  BenchgenOptions bench;
  CLI::App* cmd_benchgen =
      app.add_subcommand("benchgen", "Generate a synthetic benchmark pair");
  cmd_benchgen->add_option("--seed", bench.seed, "PRNG seed")->required();
  cmd_benchgen->add_option("--n-classes", bench.n_classes, "Class count")
      ->required();
  cmd_benchgen->add_option("--branching", bench.branching,
                           "Max children per class (default 4)");
  cmd_benchgen->add_option("--label-noise", bench.label_noise,
                           "Per-label perturbation probability (default 0.1)");
  cmd_benchgen->add_option("--edge-delete-rate", bench.edge_delete_rate,
                           "Target-side edge deletion rate (default 0.05)");
  cmd_benchgen->add_option("--n-conflicts", bench.n_conflicts,
                           "Planted conflicts (default 0)");
  cmd_benchgen->add_option("--out-dir", bench.out_dir, "Output directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (app.got_subcommand(cmd_match)) return run_match(match);
  if (app.got_subcommand(cmd_repair)) return run_repair(repair);
  if (app.got_subcommand(cmd_diagnose)) return run_diagnose(diagnose);
  if (app.got_subcommand(cmd_eval)) return run_eval(eval_alignment, eval_reference);
  if (app.got_subcommand(cmd_calibrate)) return run_calibrate(calibrate);
  if (app.got_subcommand(cmd_diff)) return run_diff(diff);
  if (app.got_subcommand(cmd_benchgen)) return run_benchgen(bench);
  return kExitInput;
}
