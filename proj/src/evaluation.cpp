#include "kga/evaluation.hpp"

#include <cmath>

namespace kga::evaluation {

EvalReport evaluate(const Alignment& m, const Alignment& reference) {
  EvalReport report;
  for (const auto& [key, mapping] : m.entries()) {
    if (reference.contains(key)) {
      ++report.true_positives;
    } else {
      ++report.false_positives;
    }
  }
  report.false_negatives = reference.size() - report.true_positives;

  std::size_t tp_fp = report.true_positives + report.false_positives;
  std::size_t tp_fn = report.true_positives + report.false_negatives;
  report.precision =
      tp_fp == 0 ? 1.0
                 : static_cast<double>(report.true_positives) /
                       static_cast<double>(tp_fp);
  report.recall = tp_fn == 0 ? 1.0
                             : static_cast<double>(report.true_positives) /
                                   static_cast<double>(tp_fn);
  double pr = report.precision + report.recall;
  report.f1 = pr == 0.0 ? 0.0 : 2.0 * report.precision * report.recall / pr;
  return report;
}

CalibrationResult calibrate(const KnowledgeGraph& kg1,
                            const KnowledgeGraph& kg2,
                            const Alignment& candidates,
                            const Alignment& reference,
                            const selector::SelectorConfig& cfg,
                            double grid_step) {
  if (reference.empty()) {
    throw KgaError("calibrate requires a non-empty reference alignment");
  }
  if (!(grid_step > 0.0 && grid_step <= 1.0)) {
    throw KgaError("grid step must be in (0,1]");
  }

  std::optional<CalibrationResult> best;
  double previous = -1.0;
  for (std::size_t k = 0;; ++k) {
    double param = std::min(1.0, static_cast<double>(k) * grid_step);
    if (param == previous) break;  // reached and evaluated 1.0
    previous = param;

    selector::SelectorConfig step_cfg = cfg;
    Alignment swept;
    if (cfg.mode == selector::Mode::Threshold) {
      step_cfg.theta = param;
      swept = candidates;
    } else {
      for (const auto& [key, m] : candidates.entries()) {
        if (m.confidence >= param) swept.add(m);
      }
    }
    selector::SelectionResult sel = selector::select(kg1, kg2, swept, step_cfg);
    EvalReport report = evaluate(sel.accepted, reference);
    if (!best || report.f1 > best->report.f1) {
      best = CalibrationResult{param, report, std::move(sel)};
    }
    if (param >= 1.0) break;
  }
  return std::move(*best);
}

}  // namespace kga::evaluation
