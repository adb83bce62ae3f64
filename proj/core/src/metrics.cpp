#include "dacat/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dacat::eval {

MetricReport strict_metrics(const PhaseTimeline& pred, const PhaseTimeline& gt,
                            int num_phases) {
  if (pred.size() != gt.size())
    throw std::invalid_argument("strict_metrics: timeline length mismatch");
  if (gt.size() == 0) throw std::invalid_argument("strict_metrics: empty timelines");
  pred.validate(num_phases);
  gt.validate(num_phases);

  const std::size_t n = gt.size();
  std::vector<long> tp(num_phases, 0), fp(num_phases, 0), fn(num_phases, 0);
  std::vector<bool> in_gt(num_phases, false);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int p = pred.labels[i], g = gt.labels[i];
    in_gt[g] = true;
    if (p == g) {
      ++tp[g];
      ++hits;
    } else {
      ++fp[p];
      ++fn[g];
    }
  }

  MetricReport r;
  r.accuracy = static_cast<double>(hits) / static_cast<double>(n);
  r.phase_in_gt = in_gt;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.per_phase_precision.assign(num_phases, nan);
  r.per_phase_recall.assign(num_phases, nan);
  r.per_phase_jaccard.assign(num_phases, nan);

  double psum = 0, rsum = 0, jsum = 0;
  int present = 0;
  for (int k = 0; k < num_phases; ++k) {
    if (!in_gt[k]) continue;  // skipped: prevents undefined 0/0 averages
    const double denom_p = static_cast<double>(tp[k] + fp[k]);
    const double denom_r = static_cast<double>(tp[k] + fn[k]);
    const double denom_j = static_cast<double>(tp[k] + fp[k] + fn[k]);
    r.per_phase_precision[k] = denom_p > 0 ? tp[k] / denom_p : 0.0;
    r.per_phase_recall[k] = denom_r > 0 ? tp[k] / denom_r : 0.0;
    r.per_phase_jaccard[k] = denom_j > 0 ? tp[k] / denom_j : 0.0;
    psum += r.per_phase_precision[k];
    rsum += r.per_phase_recall[k];
    jsum += r.per_phase_jaccard[k];
    ++present;
  }
  r.precision = psum / present;
  r.recall = rsum / present;
  r.jaccard = jsum / present;
  return r;
}

PhaseTimeline relax_boundaries(const PhaseTimeline& pred, const PhaseTimeline& gt,
                               double window_s, double fps) {
  if (pred.size() != gt.size())
    throw std::invalid_argument("relax_boundaries: timeline length mismatch");
  const std::size_t n = gt.size();
  PhaseTimeline out = pred;
  if (n == 0) return out;
  const long w = std::lround(window_s * fps);
  if (w <= 0) return out;

  for (std::size_t tr = 1; tr < n; ++tr) {
    if (gt.labels[tr] == gt.labels[tr - 1]) continue;
    const int prev = gt.labels[tr - 1];
    const int cur = gt.labels[tr];
    // After the transition: lingering predictions of the outgoing phase.
    for (std::size_t i = tr; i < n && i < tr + static_cast<std::size_t>(w); ++i) {
      if (gt.labels[i] != cur) break;  // stop at the next transition
      if (out.labels[i] == prev) out.labels[i] = cur;
    }
    // Before the transition: early predictions of the incoming phase.
    for (long i = static_cast<long>(tr) - 1;
         i >= 0 && i >= static_cast<long>(tr) - w; --i) {
      if (gt.labels[i] != prev) break;
      if (out.labels[i] == cur) out.labels[i] = prev;
    }
  }
  return out;
}

AggregateReport aggregate(const std::vector<MetricReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate: no reports");
  auto mean_std = [&](auto getter, double& mean, double& sd) {
    double s = 0;
    for (const auto& r : reports) s += getter(r);
    mean = s / reports.size();
    double v = 0;
    for (const auto& r : reports) {
      const double d = getter(r) - mean;
      v += d * d;
    }
    sd = std::sqrt(v / reports.size());  // population standard deviation
  };
  AggregateReport a;
  mean_std([](const MetricReport& r) { return r.accuracy; }, a.accuracy_mean,
           a.accuracy_std);
  mean_std([](const MetricReport& r) { return r.precision; }, a.precision_mean,
           a.precision_std);
  mean_std([](const MetricReport& r) { return r.recall; }, a.recall_mean,
           a.recall_std);
  mean_std([](const MetricReport& r) { return r.jaccard; }, a.jaccard_mean,
           a.jaccard_std);
  return a;
}

}  // namespace dacat::eval
