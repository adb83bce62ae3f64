#pragma once

#include <vector>

#include "dacat/types.hpp"

namespace dacat::eval {

// Per-video metric report. Phase-based metrics are averaged over the
// phases present in the ground truth; per-phase entries for phases absent
// from the ground truth are NaN and excluded everywhere.
struct MetricReport {
  double accuracy = 0.0;
  double precision = 0.0, recall = 0.0, jaccard = 0.0;  // phase averages
  std::vector<double> per_phase_precision, per_phase_recall, per_phase_jaccard;
  std::vector<bool> phase_in_gt;
};

MetricReport strict_metrics(const PhaseTimeline& pred, const PhaseTimeline& gt,
                            int num_phases);

// Boundary-relaxed adjustment: within w = round(window_s * fps) frames
// after a ground-truth transition, predictions equal to the outgoing phase
// are rewritten to the incoming one; within w frames before a transition,
// predictions equal to the incoming phase are rewritten to the outgoing
// one. Windows stop at neighboring transitions, so a rewrite always lands
// on the frame's own ground truth and relaxed scores can never drop below
// strict ones. Returns the adjusted prediction timeline.
PhaseTimeline relax_boundaries(const PhaseTimeline& pred, const PhaseTimeline& gt,
                               double window_s = 10.0, double fps = 1.0);

inline MetricReport relaxed_metrics(const PhaseTimeline& pred,
                                    const PhaseTimeline& gt, int num_phases,
                                    double window_s = 10.0, double fps = 1.0) {
  return strict_metrics(relax_boundaries(pred, gt, window_s, fps), gt, num_phases);
}

// Cross-video aggregation: per-video phase averages first, then mean and
// population standard deviation across videos.
struct AggregateReport {
  double accuracy_mean = 0.0, accuracy_std = 0.0;
  double precision_mean = 0.0, precision_std = 0.0;
  double recall_mean = 0.0, recall_std = 0.0;
  double jaccard_mean = 0.0, jaccard_std = 0.0;
};

AggregateReport aggregate(const std::vector<MetricReport>& reports);

}  // namespace dacat::eval
