#include "dacat/ablation.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

namespace dacat::eval {

ModelEvaluation evaluate_model(const ParamSet& params, const ModelConfig& cfg,
                               const pipeline::Dataset& data, double window_s,
                               int jobs) {
  data.validate(cfg);
  const pipeline::OnlineEngine engine(cfg, params);
  const std::size_t n = data.videos.size();
  ModelEvaluation ev;
  ev.strict.resize(n);
  ev.relaxed.resize(n);
  ev.predictions.resize(n);

  auto eval_video = [&](std::size_t i) {
    const auto& video = data.videos[i];
    auto run = engine.run(video.obs);
    ev.strict[i] = strict_metrics(run.timeline, video.labels, static_cast<int>(cfg.K));
    ev.relaxed[i] = relaxed_metrics(run.timeline, video.labels,
                                    static_cast<int>(cfg.K), window_s,
                                    video.labels.fps);
    ev.predictions[i] = std::move(run.timeline);
  };

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) eval_video(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
          eval_video(i);
      });
    for (auto& th : pool) th.join();
  }

  ev.strict_agg = aggregate(ev.strict);
  ev.relaxed_agg = aggregate(ev.relaxed);
  return ev;
}

ReadoutAblation ablate_readout(const pipeline::Dataset& train,
                               const pipeline::Dataset& test,
                               const ParamSet& stage1, const ModelConfig& base_cfg,
                               const pipeline::StageOptions& opt, int jobs) {
  const std::vector<Readout> readouts = {Readout::adaptive(), Readout::fixed(10),
                                         Readout::fixed(100), Readout::all()};
  ReadoutAblation table;
  table.num_phases = base_cfg.K;
  for (const auto& ro : readouts) {
    ModelConfig cfg = base_cfg;
    cfg.readout = ro;
    auto trained = pipeline::train_dacat(train, stage1, cfg, opt);
    auto ev = evaluate_model(trained.params, cfg, test, 10.0, jobs);

    // Mean per-phase Jaccard over the videos whose ground truth contains
    // the phase; NaN if the phase never occurs.
    std::vector<double> per_phase(cfg.K, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < cfg.K; ++k) {
      double sum = 0;
      int cnt = 0;
      for (const auto& r : ev.strict) {
        if (!r.phase_in_gt[k]) continue;
        sum += r.per_phase_jaccard[k];
        ++cnt;
      }
      if (cnt > 0) per_phase[k] = sum / cnt;
    }
    table.strategies.push_back(to_string(ro));
    table.phase_jaccard.push_back(std::move(per_phase));
    table.overall_jaccard.push_back(ev.strict_agg.jaccard_mean);
  }
  return table;
}

std::string ablation_csv(const ReadoutAblation& table) {
  std::string out = "strategy";
  for (std::size_t k = 0; k < table.num_phases; ++k)
    out += ",p" + std::to_string(k);
  out += ",overall\n";
  char buf[32];
  for (std::size_t s = 0; s < table.strategies.size(); ++s) {
    out += table.strategies[s];
    for (std::size_t k = 0; k < table.num_phases; ++k) {
      std::snprintf(buf, sizeof(buf), "%.6f", table.phase_jaccard[s][k]);
      out += ",";
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), "%.6f", table.overall_jaccard[s]);
    out += ",";
    out += buf;
    out += "\n";
  }
  return out;
}

}  // namespace dacat::eval
