#pragma once

#include "kga/model.hpp"
#include "kga/selector.hpp"

namespace kga::evaluation {

struct EvalReport {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 1.0;  // 1 when TP+FP == 0
  double recall = 1.0;     // 1 when TP+FN == 0
  double f1 = 0.0;         // harmonic mean; 0 when P+R == 0
};

/// Compares on (source, target, relation); confidence is ignored.
EvalReport evaluate(const Alignment& m, const Alignment& reference);

struct CalibrationResult {
  double parameter = 0.0;  // smallest grid value achieving maximal F1
  EvalReport report;
  selector::SelectionResult selection;  // the selection at that parameter
};

/// Sweeps {0, grid_step, ..., 1}: theta in Threshold mode, a candidate
/// confidence floor otherwise; maximizes F1 against the reference.
/// Throws KgaError on an empty reference.
CalibrationResult calibrate(const KnowledgeGraph& kg1,
                            const KnowledgeGraph& kg2,
                            const Alignment& candidates,
                            const Alignment& reference,
                            const selector::SelectorConfig& cfg,
                            double grid_step = 0.01);

}  // namespace kga::evaluation
