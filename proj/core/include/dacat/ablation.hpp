#pragma once

#include <string>
#include <vector>

#include "dacat/metrics.hpp"
#include "dacat/train.hpp"

namespace dacat::eval {

// Inference + metrics for one trained model over a dataset. Videos are
// independent; `jobs` > 1 parallelizes across them without changing
// results.
struct ModelEvaluation {
  std::vector<MetricReport> strict, relaxed;
  AggregateReport strict_agg, relaxed_agg;
  std::vector<PhaseTimeline> predictions;
};

ModelEvaluation evaluate_model(const ParamSet& params, const ModelConfig& cfg,
                               const pipeline::Dataset& data,
                               double window_s = 10.0, int jobs = 1);

// Read-out ablation: trains one model per read-out strategy (adaptive,
// fixed:10, fixed:100, all) from the same stage-1 parameters and seed,
// then reports strict per-phase Jaccard on the test set.
struct ReadoutAblation {
  std::vector<std::string> strategies;
  std::vector<std::vector<double>> phase_jaccard;  // strategy x phase
  std::vector<double> overall_jaccard;             // per strategy
  std::size_t num_phases = 0;
};

ReadoutAblation ablate_readout(const pipeline::Dataset& train,
                               const pipeline::Dataset& test,
                               const ParamSet& stage1, const ModelConfig& base_cfg,
                               const pipeline::StageOptions& opt, int jobs = 1);

// Header "strategy,p0,...,p{K-1},overall", one row per strategy.
std::string ablation_csv(const ReadoutAblation& table);

}  // namespace dacat::eval
