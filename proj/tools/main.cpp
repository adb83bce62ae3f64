// dacat: generate synthetic phase streams, train the dual-stream model,
// run online inference and evaluate it. Every command is deterministic in
// (flags, seed, input files); manifests record all of them.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dacat/ablation.hpp"
#include "dacat/checkpoint.hpp"
#include "dacat/io.hpp"
#include "dacat/metrics.hpp"
#include "dacat/synth.hpp"
#include "dacat/throughput.hpp"
#include "dacat/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dacat;

namespace {

std::string video_stem(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "video_%03d", index);
  return buf;
}

std::string pred_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "pred_%03d.csv", index);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for write: " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

json read_json(const fs::path& path, const char* what) {
  std::ifstream is(path);
  if (!is)
    throw std::runtime_error(std::string("missing ") + what + ": " + path.string());
  json j;
  is >> j;
  return j;
}

// Readout flag syntax: adaptive | all | fixed:k
Readout parse_readout(const std::string& s) {
  if (s == "adaptive") return Readout::adaptive();
  if (s == "all") return Readout::all();
  if (s.rfind("fixed:", 0) == 0) {
    const long k = std::stol(s.substr(6));
    if (k < 1) throw CLI::ValidationError("--readout", "fixed:k requires k >= 1");
    return Readout::fixed(static_cast<std::size_t>(k));
  }
  throw CLI::ValidationError("--readout", "expected adaptive, all or fixed:k");
}

FusionMode parse_fusion(const std::string& s) {
  if (s == "after") return FusionMode::After;
  if (s == "before") return FusionMode::Before;
  throw CLI::ValidationError("--fusion", "expected before or after");
}

Interaction parse_interaction(const std::string& s) {
  if (s == "add") return Interaction::Add;
  if (s == "concat") return Interaction::Concat;
  if (s == "ca") return Interaction::CrossAttention;
  throw CLI::ValidationError("--interaction", "expected add, concat or ca");
}

BranchMode parse_branch(const std::string& s) {
  if (s == "both") return BranchMode::Both;
  if (s == "fwb") return BranchMode::FwbOnly;
  if (s == "acb") return BranchMode::AcbOnly;
  throw CLI::ValidationError("--branch", "expected both, fwb or acb");
}

json config_to_json(const ModelConfig& cfg) {
  json j;
  j["d"] = cfg.d;
  j["d_raw"] = cfg.d_raw;
  j["phases"] = cfg.K;
  j["hidden"] = cfg.hidden;
  j["fusion"] = to_string(cfg.fusion);
  j["interaction"] = to_string(cfg.interaction);
  j["readout"] = to_string(cfg.readout);
  j["branch"] = to_string(cfg.branch);
  j["seed"] = cfg.seed;
  if (cfg.cache_capacity) j["capacity"] = *cfg.cache_capacity;
  return j;
}

ModelConfig config_from_json(const json& j) {
  ModelConfig cfg;
  cfg.d = j.at("d").get<std::size_t>();
  cfg.d_raw = j.at("d_raw").get<std::size_t>();
  cfg.K = j.at("phases").get<std::size_t>();
  cfg.hidden = j.at("hidden").get<std::size_t>();
  cfg.fusion = parse_fusion(j.at("fusion").get<std::string>());
  cfg.interaction = parse_interaction(j.at("interaction").get<std::string>());
  cfg.readout = parse_readout(j.at("readout").get<std::string>());
  cfg.branch = parse_branch(j.value("branch", "both"));
  cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("capacity")) cfg.cache_capacity = j["capacity"].get<std::size_t>();
  return cfg;
}

struct LoadedDataset {
  pipeline::Dataset data;
  int phases = 0;
  int d_raw = 0;
  std::vector<std::string> stems;
};

LoadedDataset load_dataset(const fs::path& dir, bool with_labels = true) {
  const json manifest = read_json(dir / "manifest.json", "dataset manifest");
  LoadedDataset out;
  out.phases = manifest.at("phases").get<int>();
  out.d_raw = manifest.at("d_raw").get<int>();
  for (const auto& v : manifest.at("videos")) {
    pipeline::VideoSample sample;
    const auto obs_path = dir / v.at("obs").get<std::string>();
    if (!fs::exists(obs_path))
      throw std::runtime_error("missing embedding file: " + obs_path.string());
    sample.obs = data::load_embeddings(obs_path.string());
    if (with_labels) {
      const auto lab_path = dir / v.at("labels").get<std::string>();
      if (!fs::exists(lab_path))
        throw std::runtime_error("missing annotation file: " + lab_path.string());
      sample.labels = data::load_annotations(lab_path.string(), out.phases);
      if (sample.labels.size() != sample.obs.size())
        throw std::runtime_error("annotation/embedding length mismatch for " +
                                 obs_path.string());
    }
    out.stems.push_back(fs::path(v.at("obs").get<std::string>()).stem().string());
    out.data.videos.push_back(std::move(sample));
  }
  if (out.data.videos.empty()) throw std::runtime_error("dataset has no videos");
  return out;
}

std::string metrics_csv(const std::vector<eval::MetricReport>& reports,
                        const eval::AggregateReport& agg) {
  std::string out = "video,accuracy,precision,recall,jaccard\n";
  char buf[160];
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%.6f,%.6f\n", i,
                  reports[i].accuracy, reports[i].precision, reports[i].recall,
                  reports[i].jaccard);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "mean,%.6f,%.6f,%.6f,%.6f\n", agg.accuracy_mean,
                agg.precision_mean, agg.recall_mean, agg.jaccard_mean);
  out += buf;
  std::snprintf(buf, sizeof(buf), "std,%.6f,%.6f,%.6f,%.6f\n", agg.accuracy_std,
                agg.precision_std, agg.recall_std, agg.jaccard_std);
  out += buf;
  return out;
}

void parallel_videos(std::size_t n, int jobs,
                     const std::function<void(std::size_t)>& fn) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------- gen-data

int cmd_gen_data(const data::SyntheticConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  fs::create_directories(out_dir);
  json manifest;
  manifest["kind"] = "dacat-dataset";
  manifest["version"] = 1;
  manifest["seed"] = cfg.seed;
  manifest["phases"] = cfg.K;
  manifest["d_raw"] = cfg.d_raw;
  json gen;
  gen["videos"] = cfg.n_videos;
  gen["video_len"] = cfg.video_len;
  gen["mean_dwell"] = cfg.mean_dwell;
  gen["dwell_jitter"] = cfg.dwell_jitter;
  gen["interference_rate"] = cfg.interference_rate;
  gen["noise_scale"] = cfg.noise_scale;
  gen["cluster_separation"] = cfg.cluster_separation;
  gen["skip_prob"] = cfg.skip_prob;
  gen["repeat_prob"] = cfg.repeat_prob;
  manifest["generator"] = gen;

  json videos = json::array();
  for (int i = 0; i < cfg.n_videos; ++i) {
    auto v = data::gen_stream(cfg, i);
    const std::string stem = video_stem(i);
    data::write_embeddings((fs::path(out_dir) / (stem + ".dcat")).string(), v.obs);
    data::write_annotations((fs::path(out_dir) / (stem + ".csv")).string(),
                            v.labels);
    json jv;
    jv["obs"] = stem + ".dcat";
    jv["labels"] = stem + ".csv";
    jv["frames"] = v.obs.size();
    videos.push_back(jv);
  }
  manifest["videos"] = videos;
  write_json(fs::path(out_dir) / "manifest.json", manifest);
  std::printf("wrote %d videos to %s\n", cfg.n_videos, out_dir.c_str());
  return 0;
}

// -------------------------------------------------------------------- train

struct TrainArgs {
  std::string data_dir, out_dir;
  ModelConfig cfg;
  pipeline::StageOptions s1, s2;
  std::string stage = "both";
  std::string precision = "f64";
  bool verbose = false;
};

int cmd_train(TrainArgs args) {
  if (args.precision != "f64")
    throw std::runtime_error("training runs in f64 only; --precision f32 is "
                             "available for infer and bench");
  auto loaded = load_dataset(args.data_dir);
  args.cfg.K = static_cast<std::size_t>(loaded.phases);
  args.cfg.d_raw = static_cast<std::size_t>(loaded.d_raw);
  args.cfg.validate();
  fs::create_directories(args.out_dir);

  json manifest;
  manifest["kind"] = "dacat-train";
  manifest["version"] = 1;
  manifest["data"] = args.data_dir;
  manifest["config"] = config_to_json(args.cfg);
  manifest["stage"] = args.stage;
  json opts;
  opts["epochs1"] = args.s1.epochs;
  opts["epochs2"] = args.s2.epochs;
  opts["lr1"] = args.s1.lr;
  opts["lr2"] = args.s2.lr;
  opts["segment1"] = args.s1.segment_len;
  opts["segment2"] = args.s2.segment_len;
  opts["weight_decay"] = args.s1.weight_decay;
  manifest["options"] = opts;

  const fs::path cache_ckpt = fs::path(args.out_dir) / "cache_encoder.dcpt";
  const fs::path dacat_ckpt = fs::path(args.out_dir) / "dacat.dcpt";

  ParamSet stage1;
  if (args.stage == "both" || args.stage == "1") {
    auto r1 = pipeline::train_cache_encoder(loaded.data, args.cfg, args.s1);
    stage1 = std::move(r1.params);
    nn::save_checkpoint(cache_ckpt.string(), stage1);
    manifest["stage1_epoch_loss"] = r1.epoch_loss;
    manifest["stage1_train_accuracy"] = r1.final_train_accuracy;
    std::printf("stage 1 done: train accuracy %.4f\n", r1.final_train_accuracy);
  } else {
    if (!fs::exists(cache_ckpt))
      throw std::runtime_error("missing cache encoder checkpoint: " +
                               cache_ckpt.string());
    stage1 = nn::load_checkpoint(cache_ckpt.string());
  }

  if (args.stage == "both" || args.stage == "2") {
    auto r2 = pipeline::train_dacat(loaded.data, stage1, args.cfg, args.s2);
    nn::save_checkpoint(dacat_ckpt.string(), r2.params);
    manifest["stage2_epoch_loss"] = r2.epoch_loss;
    manifest["stage2_train_accuracy"] = r2.final_train_accuracy;
    std::printf("stage 2 done: train accuracy %.4f\n", r2.final_train_accuracy);
  }
  write_json(fs::path(args.out_dir) / "train_manifest.json", manifest);
  return 0;
}

// -------------------------------------------------------------------- infer

int cmd_infer(const std::string& data_dir, const std::string& ckpt_dir,
              const std::string& out_dir, int jobs, const std::string& precision) {
  const json tm = read_json(fs::path(ckpt_dir) / "train_manifest.json",
                            "train manifest");
  const ModelConfig cfg = config_from_json(tm.at("config"));
  const fs::path ckpt = fs::path(ckpt_dir) / "dacat.dcpt";
  if (!fs::exists(ckpt))
    throw std::runtime_error("missing model checkpoint: " + ckpt.string());
  const ParamSet params = nn::load_checkpoint(ckpt.string());

  auto loaded = load_dataset(data_dir, /*with_labels=*/false);
  if (loaded.d_raw != static_cast<int>(cfg.d_raw))
    throw std::runtime_error("dataset dimension does not match checkpoint config");
  fs::create_directories(out_dir);

  const std::size_t n = loaded.data.videos.size();
  if (precision == "f32") {
    pipeline::OnlineEngineF engine(cfg, params);
    parallel_videos(n, jobs, [&](std::size_t i) {
      std::vector<std::vector<float>> video;
      video.reserve(loaded.data.videos[i].obs.size());
      for (const auto& o : loaded.data.videos[i].obs)
        video.emplace_back(o.begin(), o.end());
      auto run = engine.run(video);
      data::write_annotations((fs::path(out_dir) / pred_name(int(i))).string(),
                              run.timeline);
    });
  } else if (precision == "f64") {
    pipeline::OnlineEngine engine(cfg, params);
    parallel_videos(n, jobs, [&](std::size_t i) {
      auto run = engine.run(loaded.data.videos[i].obs);
      data::write_annotations((fs::path(out_dir) / pred_name(int(i))).string(),
                              run.timeline);
    });
  } else {
    throw std::runtime_error("--precision must be f32 or f64");
  }

  json manifest;
  manifest["kind"] = "dacat-infer";
  manifest["data"] = data_dir;
  manifest["checkpoint"] = ckpt.string();
  manifest["config"] = config_to_json(cfg);
  manifest["precision"] = precision;
  manifest["videos"] = n;
  write_json(fs::path(out_dir) / "infer_manifest.json", manifest);
  std::printf("wrote %zu prediction files to %s\n", n, out_dir.c_str());
  return 0;
}

// --------------------------------------------------------------------- eval

int cmd_eval(const std::string& pred_dir, const std::string& data_dir,
             const std::string& out_dir, double window_s, double fps) {
  auto loaded = load_dataset(data_dir);
  fs::create_directories(out_dir);

  std::vector<eval::MetricReport> strict, relaxed;
  for (std::size_t i = 0; i < loaded.data.videos.size(); ++i) {
    const fs::path p = fs::path(pred_dir) / pred_name(int(i));
    if (!fs::exists(p))
      throw std::runtime_error("missing prediction file: " + p.string());
    PhaseTimeline pred = data::load_annotations(p.string(), loaded.phases);
    pred.fps = fps;
    const auto& gt = loaded.data.videos[i].labels;
    if (pred.size() != gt.size())
      throw std::runtime_error("prediction length mismatch for " + p.string());
    strict.push_back(eval::strict_metrics(pred, gt, loaded.phases));
    relaxed.push_back(
        eval::relaxed_metrics(pred, gt, loaded.phases, window_s, fps));
  }
  const auto agg_s = eval::aggregate(strict);
  const auto agg_r = eval::aggregate(relaxed);
  write_text(fs::path(out_dir) / "metrics_strict.csv", metrics_csv(strict, agg_s));
  write_text(fs::path(out_dir) / "metrics_relaxed.csv",
             metrics_csv(relaxed, agg_r));

  json manifest;
  manifest["kind"] = "dacat-eval";
  manifest["pred"] = pred_dir;
  manifest["data"] = data_dir;
  manifest["window_s"] = window_s;
  manifest["fps"] = fps;
  manifest["strict_accuracy_mean"] = agg_s.accuracy_mean;
  manifest["strict_jaccard_mean"] = agg_s.jaccard_mean;
  manifest["relaxed_accuracy_mean"] = agg_r.accuracy_mean;
  manifest["relaxed_jaccard_mean"] = agg_r.jaccard_mean;
  write_json(fs::path(out_dir) / "eval_manifest.json", manifest);
  std::printf("strict accuracy %.4f jaccard %.4f | relaxed accuracy %.4f "
              "jaccard %.4f\n",
              agg_s.accuracy_mean, agg_s.jaccard_mean, agg_r.accuracy_mean,
              agg_r.jaccard_mean);
  return 0;
}

// ------------------------------------------------------------------- ablate

int cmd_ablate(const std::string& train_dir, const std::string& test_dir,
               const std::string& out_dir, ModelConfig cfg,
               pipeline::StageOptions s1, pipeline::StageOptions s2, int jobs) {
  auto train = load_dataset(train_dir);
  auto test = load_dataset(test_dir);
  if (train.phases != test.phases || train.d_raw != test.d_raw)
    throw std::runtime_error("train and test datasets disagree on shape");
  cfg.K = static_cast<std::size_t>(train.phases);
  cfg.d_raw = static_cast<std::size_t>(train.d_raw);
  cfg.validate();
  fs::create_directories(out_dir);

  auto r1 = pipeline::train_cache_encoder(train.data, cfg, s1);
  auto table =
      eval::ablate_readout(train.data, test.data, r1.params, cfg, s2, jobs);
  write_text(fs::path(out_dir) / "ablation.csv", eval::ablation_csv(table));

  json manifest;
  manifest["kind"] = "dacat-ablate";
  manifest["config"] = config_to_json(cfg);
  manifest["train"] = train_dir;
  manifest["test"] = test_dir;
  json opts;
  opts["epochs1"] = s1.epochs;
  opts["epochs2"] = s2.epochs;
  opts["lr1"] = s1.lr;
  opts["lr2"] = s2.lr;
  opts["segment1"] = s1.segment_len;
  opts["segment2"] = s2.segment_len;
  manifest["options"] = opts;
  write_json(fs::path(out_dir) / "ablate_manifest.json", manifest);
  std::printf("%s", eval::ablation_csv(table).c_str());
  return 0;
}

// -------------------------------------------------------------------- bench

int cmd_bench(const std::string& out_dir, ModelConfig cfg,
              const std::vector<std::size_t>& lengths,
              const std::string& precision) {
  cfg.validate();
  auto params =
      pipeline::init_dacat_params(cfg, pipeline::init_stage1_params(cfg, cfg.seed),
                                  cfg.seed);
  const auto prec =
      precision == "f32" ? eval::Precision::F32 : eval::Precision::F64;
  auto rows = eval::bench_throughput(params, cfg, lengths, cfg.seed, prec);
  fs::create_directories(out_dir);
  const auto csv = eval::throughput_csv(rows);
  write_text(fs::path(out_dir) / "bench.csv", csv);
  std::printf("%s", csv.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual-stream adaptive clip-aware online phase recognition"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
  data::SyntheticConfig scfg;
  std::string gen_out;
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--videos", scfg.n_videos, "number of videos");
  gen->add_option("--len", scfg.video_len, "frames per video");
  gen->add_option("--phases", scfg.K, "number of phases");
  gen->add_option("--d-raw", scfg.d_raw, "raw observation dimension");
  gen->add_option("--mean-dwell", scfg.mean_dwell, "mean frames per phase");
  gen->add_option("--dwell-jitter", scfg.dwell_jitter, "dwell jitter fraction");
  gen->add_option("--interference", scfg.interference_rate,
                  "interference frame rate in [0,1]");
  gen->add_option("--noise-scale", scfg.noise_scale, "observation noise scale");
  gen->add_option("--separation", scfg.cluster_separation,
                  "phase cluster separation");
  gen->add_option("--skip-prob", scfg.skip_prob, "phase skip probability");
  gen->add_option("--repeat-prob", scfg.repeat_prob, "phase repeat probability");
  gen->add_option("--seed", scfg.seed, "generator seed");

  // shared model/train flags
  TrainArgs targs;
  std::string fusion = "after", interaction = "ca", readout = "adaptive",
              branch = "both";
  std::size_t capacity = 0;
  auto add_model_flags = [&](CLI::App* cmd) {
    cmd->add_option("--d", targs.cfg.d, "embedding dimension");
    cmd->add_option("--hidden", targs.cfg.hidden, "LSTM hidden size");
    cmd->add_option("--fusion", fusion, "before|after");
    cmd->add_option("--interaction", interaction, "add|concat|ca");
    cmd->add_option("--readout", readout, "adaptive|all|fixed:k");
    cmd->add_option("--branch", branch, "both|fwb|acb");
    cmd->add_option("--capacity", capacity, "cache capacity (0 = unbounded)");
    cmd->add_option("--seed", targs.cfg.seed, "training seed");
  };
  auto add_stage_flags = [&](CLI::App* cmd) {
    cmd->add_option("--epochs1", targs.s1.epochs, "stage 1 epochs");
    cmd->add_option("--epochs2", targs.s2.epochs, "stage 2 epochs");
    cmd->add_option("--lr1", targs.s1.lr, "stage 1 learning rate");
    cmd->add_option("--lr2", targs.s2.lr, "stage 2 learning rate");
    cmd->add_option("--segment1", targs.s1.segment_len, "stage 1 segment length");
    cmd->add_option("--segment2", targs.s2.segment_len, "stage 2 segment length");
    cmd->add_option("--weight-decay", targs.s1.weight_decay, "AdamW weight decay");
  };

  auto* train = app.add_subcommand("train", "two-stage training");
  train->add_option("--data", targs.data_dir, "dataset directory")->required();
  train->add_option("--out", targs.out_dir, "checkpoint directory")->required();
  add_model_flags(train);
  add_stage_flags(train);
  train->add_option("--stage", targs.stage, "1|2|both");
  train->add_option("--precision", targs.precision, "f32|f64");
  train->add_flag("--verbose", targs.verbose, "log per-epoch losses");

  // defaults mirror the reference schedule, scaled for desk runs
  targs.cfg.d = 32;
  targs.cfg.hidden = 64;
  targs.s1 = {/*epochs=*/10, /*segment_len=*/256, /*lr=*/1e-4, 0.01, false};
  targs.s2 = {/*epochs=*/10, /*segment_len=*/64, /*lr=*/1e-5, 0.01, false};

  auto* infer = app.add_subcommand("infer", "online frame-by-frame inference");
  std::string infer_data, infer_ckpt, infer_out, infer_precision = "f64";
  int jobs = 1;
  infer->add_option("--data", infer_data, "dataset directory")->required();
  infer->add_option("--ckpt", infer_ckpt, "checkpoint directory")->required();
  infer->add_option("--out", infer_out, "prediction directory")->required();
  infer->add_option("--jobs", jobs, "videos to run in parallel");
  infer->add_option("--precision", infer_precision, "f32|f64");

  auto* ev = app.add_subcommand("eval", "strict and relaxed metrics");
  std::string eval_pred, eval_data, eval_out;
  double window_s = 10.0, fps = 1.0;
  ev->add_option("--pred", eval_pred, "prediction directory")->required();
  ev->add_option("--data", eval_data, "dataset directory with ground truth")
      ->required();
  ev->add_option("--out", eval_out, "metrics directory")->required();
  ev->add_option("--window", window_s, "relaxed boundary window (seconds)");
  ev->add_option("--fps", fps, "frames per second of the timelines");

  auto* ab = app.add_subcommand("ablate", "read-out strategy ablation");
  std::string ab_train, ab_test, ab_out;
  ab->add_option("--data", ab_train, "training dataset directory")->required();
  ab->add_option("--test", ab_test, "test dataset directory")->required();
  ab->add_option("--out", ab_out, "output directory")->required();
  add_model_flags(ab);
  add_stage_flags(ab);
  ab->add_option("--jobs", jobs, "videos to evaluate in parallel");

  auto* be = app.add_subcommand("bench", "per-frame throughput benchmark");
  ModelConfig bench_cfg;  // headline shape: d=768, adaptive read-out
  bench_cfg.hidden = 128;
  std::string bench_out, bench_lengths = "100,1000,10000",
                         bench_precision = "f64";
  be->add_option("--out", bench_out, "output directory")->required();
  be->add_option("--lengths", bench_lengths, "comma-separated stream lengths");
  be->add_option("--d", bench_cfg.d, "embedding dimension");
  be->add_option("--d-raw", bench_cfg.d_raw, "raw observation dimension");
  be->add_option("--hidden", bench_cfg.hidden, "LSTM hidden size");
  be->add_option("--phases", bench_cfg.K, "number of phases");
  be->add_option("--readout", readout, "adaptive|all|fixed:k");
  be->add_option("--interaction", interaction, "add|concat|ca");
  be->add_option("--fusion", fusion, "before|after");
  be->add_option("--seed", bench_cfg.seed, "parameter seed");
  be->add_option("--precision", bench_precision, "f32|f64");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_data(scfg, gen_out);

    targs.cfg.fusion = parse_fusion(fusion);
    targs.cfg.interaction = parse_interaction(interaction);
    targs.cfg.readout = parse_readout(readout);
    targs.cfg.branch = parse_branch(branch);
    if (capacity > 0) targs.cfg.cache_capacity = capacity;
    targs.s2.weight_decay = targs.s1.weight_decay;
    targs.s1.verbose = targs.s2.verbose = targs.verbose;

    if (train->parsed()) return cmd_train(targs);
    if (infer->parsed())
      return cmd_infer(infer_data, infer_ckpt, infer_out, jobs, infer_precision);
    if (ev->parsed()) return cmd_eval(eval_pred, eval_data, eval_out, window_s, fps);
    if (ab->parsed())
      return cmd_ablate(ab_train, ab_test, ab_out, targs.cfg, targs.s1, targs.s2,
                        jobs);
    if (be->parsed()) {
      bench_cfg.fusion = parse_fusion(fusion);
      bench_cfg.interaction = parse_interaction(interaction);
      bench_cfg.readout = parse_readout(readout);
      std::vector<std::size_t> lengths;
      std::string tok;
      std::stringstream ss(bench_lengths);
      while (std::getline(ss, tok, ','))
        if (!tok.empty()) lengths.push_back(std::stoul(tok));
      if (lengths.empty()) throw std::runtime_error("--lengths is empty");
      return cmd_bench(bench_out, bench_cfg, lengths, bench_precision);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
