// Copyright 2026 The quadvo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "quadvo_tools/cli.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "quadvo/dataset/kitti.h"
#include "quadvo/dataset/png_io.h"
#include "quadvo/dataset/synth.h"
#include "quadvo/errors.h"
#include "quadvo/eval/drift.h"
#include "quadvo/eval/report.h"
#include "quadvo/flow/flo_io.h"
#include "quadvo/flow/lucas_kanade.h"
#include "quadvo/geometry/kitti_io.h"
#include "quadvo/geometry/pose.h"
#include "quadvo/geometry/umeyama.h"
#include "quadvo/model/network.h"
#include "quadvo/train/checkpoint.h"
#include "quadvo/train/fit.h"
#include "quadvo_tools/config.h"
#include "quadvo_tools/plot.h"

namespace quadvo::tools {

namespace fs = std::filesystem;
using geometry::PoseIncrement;
using geometry::PoseMatrix;

namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

void require_file(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) {
    throw UsageError(std::string(what) + " not found: " + p.string());
  }
}

void require_dir(const fs::path& p, const char* what) {
  if (!fs::is_directory(p)) {
    throw UsageError(std::string(what) + " not found: " + p.string());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
}

struct Common {
  std::string config;
  std::vector<std::string> sets;

  void add(CLI::App* cmd) {
    cmd->add_option("--config", config, "key = value configuration file");
    cmd->add_option("--set", sets, "KEY=VALUE override (repeatable)");
  }
  RunConfig load() const {
    if (!config.empty()) require_file(config, "config file");
    return load_run_config(config, sets);
  }
};

// ---------------------------------------------------------------- flow

struct FlowArgs {
  Common common;
  std::string in_a, in_b, out;
  int window = 0, levels = 0;
};

int cmd_flow(const FlowArgs& a, std::ostream& out) {
  RunConfig cfg = a.common.load();
  if (a.window > 0) cfg.lk.window = a.window;
  if (a.levels > 0) cfg.lk.levels = a.levels;
  require_file(a.in_a, "image");
  require_file(a.in_b, "image");
  const flow::GrayImage img_a = dataset::read_png(a.in_a);
  const flow::GrayImage img_b = dataset::read_png(a.in_b);
  if (img_a.width() != img_b.width() || img_a.height() != img_b.height()) {
    throw std::runtime_error("images differ in size: " + std::to_string(img_a.width()) +
                             "x" + std::to_string(img_a.height()) + " vs " +
                             std::to_string(img_b.width()) + "x" +
                             std::to_string(img_b.height()));
  }
  const flow::FlowField field = flow::lk_flow(img_a, img_b, cfg.lk);
  flow::write_flo(field, a.out);
  out << "mean_magnitude " << fmt("%.6f", flow::mean_magnitude(field)) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- track

struct TrackArgs {
  Common common;
  std::string images, flows, checkpoint, out;
};

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> out;
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_track(const TrackArgs& a, std::ostream& out) {
  const RunConfig cfg = a.common.load();
  if (a.images.empty() == a.flows.empty()) {
    throw UsageError("track: give exactly one of --images or --flows");
  }
  require_file(a.checkpoint, "checkpoint");
  model::Network net = train::restore_network(train::load_checkpoint(a.checkpoint));
  const int w = net.config.input_width, h = net.config.input_height;

  std::vector<PoseIncrement> increments;
  std::size_t frames = 0;
  if (!a.images.empty()) {
    require_dir(a.images, "image directory");
    dataset::KittiOptions opts;
    opts.width = w;
    opts.height = h;
    opts.stride = cfg.data_stride;
    opts.use_poses = false;
    const dataset::KittiSequence seq = dataset::load_kitti(a.images, opts);
    frames = seq.frame_count();
    flow::GrayImage prev = seq.frame(0);
    for (std::size_t i = 1; i < frames; ++i) {
      flow::GrayImage next = seq.frame(i);
      increments.push_back(model::predict(net, flow::lk_flow(prev, next, cfg.lk)));
      prev = std::move(next);
    }
  } else {
    require_dir(a.flows, "flow directory");
    const std::vector<fs::path> files = sorted_files(a.flows, ".flo");
    if (files.empty()) throw std::runtime_error("track: no .flo files in " + a.flows);
    for (const fs::path& f : files) {
      const flow::FlowField field = flow::read_flo(f);
      if (field.width() != w || field.height() != h) {
        throw std::runtime_error("track: " + f.string() + " is " +
                                 std::to_string(field.width()) + "x" +
                                 std::to_string(field.height()) + " but the checkpoint expects " +
                                 std::to_string(w) + "x" + std::to_string(h));
      }
      increments.push_back(model::predict(net, field));
    }
    frames = files.size() + 1;
  }
  const geometry::Trajectory traj = geometry::accumulate(increments);
  geometry::write_kitti_poses(traj.poses, a.out);
  double length = 0.0;
  for (const PoseIncrement& inc : increments) length += std::abs(inc.dp);
  out << "frames " << frames << "\n";
  out << "poses " << traj.poses.size() << "\n";
  out << "path_length " << fmt("%.4f", length) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  Common common;
  std::string gt, est, align, report;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  RunConfig cfg = a.common.load();
  if (!a.align.empty()) {
    if (a.align != "none" && a.align != "rigid" && a.align != "similarity") {
      throw UsageError("eval: --align must be none, rigid or similarity");
    }
    cfg.align = a.align;
  }
  require_file(a.gt, "ground-truth pose file");
  require_file(a.est, "estimated pose file");
  const std::vector<PoseMatrix> gt = geometry::read_kitti_poses(a.gt);
  std::vector<PoseMatrix> est = geometry::read_kitti_poses(a.est);
  if (gt.size() != est.size()) {
    throw std::runtime_error("eval: pose files differ in length (" + std::to_string(gt.size()) +
                             " vs " + std::to_string(est.size()) + ")");
  }
  double scale = 1.0;
  if (cfg.align != "none") {
    const geometry::Alignment al = geometry::umeyama_align(
        geometry::positions(est), geometry::positions(gt), cfg.align == "similarity");
    for (PoseMatrix& p : est) p = al.transform.apply(p);
    scale = al.transform.scale;
  }
  const std::vector<eval::SegmentError> errors = eval::segment_errors(gt, est, cfg.segments);
  const eval::EvalReport report = eval::aggregate(errors, cfg.aggregate);
  if (!a.report.empty()) {
    eval::save_report(report, a.report + ".csv", a.report + ".json");
  }
  out << "segments " << report.count << "\n";
  out << "align " << cfg.align << " scale " << fmt("%.9f", scale) << "\n";
  out << "t_rel " << fmt("%.2f", report.t_rel_pct) << "%\n";
  out << "r_rel " << fmt("%.2f", report.r_rel_deg_per_100m) << " deg/100m\n";
  return kExitOk;
}

// ---------------------------------------------------------------- plot

struct PlotArgs {
  std::vector<std::string> poses;
  std::string labels, out;
};

int cmd_plot(const PlotArgs& a, std::ostream& out) {
  std::vector<std::vector<PoseMatrix>> trajs;
  for (const std::string& p : a.poses) {
    require_file(p, "pose file");
    trajs.push_back(geometry::read_kitti_poses(p));
  }
  std::vector<std::string> labels;
  if (!a.labels.empty()) {
    std::stringstream ss(a.labels);
    std::string item;
    while (std::getline(ss, item, ',')) labels.push_back(item);
  }
  for (std::size_t i = labels.size(); i < a.poses.size(); ++i) {
    labels.push_back(fs::path(a.poses[i]).stem().string());
  }
  write_text(a.out, trajectory_svg(trajs, labels));
  out << "wrote " << a.out << " (" << trajs.size() << " trajectories)\n";
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  Common common;
  std::string checkpoint, size = "1226x370", out;
  int frames = 10;
};

struct StageStats {
  double mean = 0.0, median = 0.0, p95 = 0.0;
};

StageStats stats(std::vector<double> ms) {
  std::sort(ms.begin(), ms.end());
  StageStats s;
  for (double v : ms) s.mean += v;
  s.mean /= static_cast<double>(ms.size());
  const std::size_t n = ms.size();
  s.median = n % 2 == 1 ? ms[n / 2] : 0.5 * (ms[n / 2 - 1] + ms[n / 2]);
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95 = ms[std::clamp<std::size_t>(rank, 1, n) - 1];
  return s;
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  RunConfig cfg = a.common.load();
  if (a.frames < 1) throw UsageError("bench: --frames must be >= 1");
  int w = 0, h = 0;
  if (std::sscanf(a.size.c_str(), "%dx%d", &w, &h) != 2 || w < 2 || h < 2) {
    throw UsageError("bench: --size must look like WIDTHxHEIGHT, got '" + a.size + "'");
  }
  model::Network net;
  if (!a.checkpoint.empty()) {
    require_file(a.checkpoint, "checkpoint");
    net = train::restore_network(train::load_checkpoint(a.checkpoint));
    if (net.config.input_width != w || net.config.input_height != h) {
      throw UsageError("bench: checkpoint expects " + std::to_string(net.config.input_width) +
                       "x" + std::to_string(net.config.input_height) + ", --size is " + a.size);
    }
  } else {
    model::ModelConfig mc = cfg.model;
    mc.input_width = w;
    mc.input_height = h;
    net = model::init_params(mc, cfg.seed);
  }

  dataset::SceneSpec scene = cfg.scene;
  scene.width = w;
  scene.height = h;
  scene.supersample = 1;
  const PoseIncrement motion{0.2, 0.02};
  const flow::GrayImage prev = dataset::render_view(scene, {});
  const flow::GrayImage next =
      dataset::render_view(scene, dataset::advance(dataset::CameraState{}, motion));

  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };
  std::vector<double> t_flow, t_forward, t_acc;
  std::vector<PoseIncrement> incs;
  for (int i = 0; i < a.frames; ++i) {
    auto t0 = clock::now();
    const flow::FlowField field = flow::lk_flow(prev, next, cfg.lk);
    t_flow.push_back(ms_since(t0));
    t0 = clock::now();
    const PoseIncrement inc = model::predict(net, field);
    t_forward.push_back(ms_since(t0));
    t0 = clock::now();
    incs.push_back(inc);
    const geometry::Trajectory traj = geometry::accumulate(std::span(&incs.back(), 1));
    t_acc.push_back(ms_since(t0));
    if (traj.poses.size() != 2) throw std::logic_error("bench: accumulate failed");
  }

  std::ostringstream csv;
  csv << "stage,frames,width,height,mean_ms,median_ms,p95_ms\n";
  const std::pair<const char*, std::vector<double>*> stages[] = {
      {"flow", &t_flow}, {"forward", &t_forward}, {"accumulate", &t_acc}};
  for (const auto& [name, samples] : stages) {
    const StageStats s = stats(*samples);
    csv << name << "," << samples->size() << "," << w << "," << h << ","
        << fmt("%.6f", s.mean) << "," << fmt("%.6f", s.median) << "," << fmt("%.6f", s.p95)
        << "\n";
  }
  if (!a.out.empty()) write_text(a.out, csv.str());
  out << csv.str();
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  Common common;
  std::string data, out, history;
};

std::vector<dataset::Sample> synthetic_samples(const RunConfig& cfg) {
  const std::vector<PoseIncrement> incs =
      dataset::synth_increments(cfg.scene.seed, cfg.synth_count, cfg.dp, cfg.dphi);
  const std::vector<flow::GrayImage> frames = dataset::render_sequence(cfg.scene, incs);
  std::vector<dataset::Sample> samples;
  for (std::size_t i = 0; i < incs.size(); ++i) {
    samples.push_back({frames[i], frames[i + 1], std::nullopt, incs[i]});
  }
  return samples;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  RunConfig cfg = a.common.load();
  std::vector<dataset::Sample> samples;
  if (a.data == "synthetic") {
    samples = synthetic_samples(cfg);
  } else {
    require_dir(a.data, "data directory");
    int w = cfg.data_width, h = cfg.data_height;
    if (w == 0 || h == 0) {
      const dataset::KittiSequence probe =
          dataset::load_kitti(a.data, dataset::KittiOptions{1, 1, cfg.data_stride, {}, false});
      const flow::GrayImage first = dataset::read_png(probe.manifest.images.front());
      if (w == 0) w = first.width();
      if (h == 0) h = first.height();
    }
    const dataset::KittiSequence seq =
        dataset::load_kitti(a.data, dataset::KittiOptions{w, h, cfg.data_stride, {}, true});
    if (!seq.has_ground_truth()) {
      throw UsageError("train: " + a.data + " has no poses.txt");
    }
    samples = dataset::load_samples(seq);
  }
  if (samples.empty()) throw UsageError("train: no training samples");
  cfg.model.input_width = samples.front().prev.width();
  cfg.model.input_height = samples.front().prev.height();
  cfg.model.validate();
  cfg.train.validate();

  const std::vector<train::Example> examples = train::make_examples(samples, cfg.lk);
  model::Network net = model::init_params(cfg.model, cfg.seed);
  const train::FitResult res =
      train::fit(examples, net, cfg.train, [&](const train::EpochRecord& r) {
        out << "epoch " << r.epoch << " train " << fmt("%.6e", r.train_loss) << " val "
            << fmt("%.6e", r.val_loss) << " lr " << fmt("%.3e", r.lr) << "\n";
      });
  const int epochs = static_cast<int>(res.history.size());
  train::save_checkpoint(train::make_checkpoint(net, &res.adam, epochs, res.history), a.out);
  const std::string history = a.history.empty() ? a.out + ".history.csv" : a.history;
  std::ofstream hist(history, std::ios::trunc);
  if (!hist) throw std::runtime_error("cannot open " + history);
  train::write_history_csv(res.history, hist);
  const double final_loss = train::evaluate(net, examples, cfg.train.alpha);
  out << "samples " << examples.size() << "\n";
  out << "steps " << res.steps << "\n";
  out << "best_epoch " << res.best_epoch << "\n";
  out << "final_train_loss " << fmt("%.6e", final_loss) << "\n";
  if (res.diverged) {
    out << "diverged: training stopped on a non-finite loss\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  Common common;
  std::optional<long long> seed;  // default: synth.texture_seed
  std::optional<long long> n;     // default: synth.count
  std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  RunConfig cfg = a.common.load();
  if (a.n && *a.n < 0) throw UsageError("synth: --n must be >= 0");
  if (a.seed && *a.seed < 0) throw UsageError("synth: --seed must be >= 0");
  if (a.seed) cfg.scene.seed = static_cast<std::uint64_t>(*a.seed);
  const std::uint64_t seed = cfg.scene.seed;
  const std::size_t n = a.n ? static_cast<std::size_t>(*a.n) : cfg.synth_count;
  const fs::path root(a.out);
  fs::create_directories(root / "image_2");
  const std::vector<PoseIncrement> incs = dataset::synth_increments(
      seed, n, cfg.dp, cfg.dphi);
  std::string manifest, inc_text;
  std::vector<PoseMatrix> poses;
  if (!incs.empty()) {
    const std::vector<flow::GrayImage> frames = dataset::render_sequence(cfg.scene, incs);
    for (std::size_t i = 0; i < frames.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "%06zu.png", i);
      dataset::write_png(root / "image_2" / name, frames[i]);
      manifest += std::string("image_2/") + name + "\n";
    }
    poses = geometry::accumulate(incs).poses;
    for (const PoseIncrement& inc : incs) {
      char line[80];
      std::snprintf(line, sizeof(line), "%.17g %.17g\n", inc.dp, inc.dphi);
      inc_text += line;
    }
  }
  write_text(root / "manifest.txt", manifest);
  write_text(root / "increments.txt", inc_text);
  geometry::write_kitti_poses(poses, root / "poses.txt");
  out << "frames " << (incs.empty() ? 0 : incs.size() + 1) << "\n";
  out << "increments " << incs.size() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"quadvo: monocular visual odometry from dense optical flow"};
  app.name("quadvo");
  app.require_subcommand(1);

  FlowArgs flow_args;
  CLI::App* flow_cmd = app.add_subcommand("flow", "dense optical flow between two images");
  flow_args.common.add(flow_cmd);
  flow_cmd->add_option("--in-a", flow_args.in_a, "first image (PNG)")->required();
  flow_cmd->add_option("--in-b", flow_args.in_b, "second image (PNG)")->required();
  flow_cmd->add_option("--out", flow_args.out, "output .flo file")->required();
  flow_cmd->add_option("--window", flow_args.window, "window size (odd)");
  flow_cmd->add_option("--levels", flow_args.levels, "pyramid levels");

  TrackArgs track_args;
  CLI::App* track_cmd = app.add_subcommand("track", "estimate a trajectory");
  track_args.common.add(track_cmd);
  track_cmd->add_option("--images", track_args.images, "sequence directory");
  track_cmd->add_option("--flows", track_args.flows, "directory of .flo files");
  track_cmd->add_option("--checkpoint", track_args.checkpoint, "trained model")->required();
  track_cmd->add_option("--out", track_args.out, "output pose file")->required();

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "drift metrics against ground truth");
  eval_args.common.add(eval_cmd);
  eval_cmd->add_option("--gt", eval_args.gt, "ground-truth poses")->required();
  eval_cmd->add_option("--est", eval_args.est, "estimated poses")->required();
  eval_cmd->add_option("--align", eval_args.align, "none | rigid | similarity");
  eval_cmd->add_option("--report", eval_args.report, "report prefix (.csv and .json)");

  PlotArgs plot_args;
  CLI::App* plot_cmd = app.add_subcommand("plot", "SVG plot of trajectories");
  plot_cmd->add_option("--poses", plot_args.poses, "pose files")->required();
  plot_cmd->add_option("--labels", plot_args.labels, "comma-separated legend labels");
  plot_cmd->add_option("--out", plot_args.out, "output SVG")->required();

  BenchArgs bench_args;
  CLI::App* bench_cmd = app.add_subcommand("bench", "per-stage runtime report");
  bench_args.common.add(bench_cmd);
  bench_cmd->add_option("--checkpoint", bench_args.checkpoint, "model to time");
  bench_cmd->add_option("--frames", bench_args.frames, "frames to time");
  bench_cmd->add_option("--size", bench_args.size, "frame size WIDTHxHEIGHT");
  bench_cmd->add_option("--out", bench_args.out, "CSV report");

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  train_args.common.add(train_cmd);
  train_cmd->add_option("--data", train_args.data, "sequence directory or 'synthetic'")
      ->required();
  train_cmd->add_option("--out", train_args.out, "output checkpoint")->required();
  train_cmd->add_option("--history", train_args.history, "history CSV");

  SynthArgs synth_args;
  CLI::App* synth_cmd = app.add_subcommand("synth", "render a synthetic sequence");
  synth_args.common.add(synth_cmd);
  synth_cmd->add_option("--seed", synth_args.seed, "texture and motion seed");
  synth_cmd->add_option("--n", synth_args.n, "number of increments");
  synth_cmd->add_option("--out", synth_args.out, "output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*flow_cmd) return cmd_flow(flow_args, out);
    if (*track_cmd) return cmd_track(track_args, out);
    if (*eval_cmd) return cmd_eval(eval_args, out);
    if (*plot_cmd) return cmd_plot(plot_args, out);
    if (*bench_cmd) return cmd_bench(bench_args, out);
    if (*train_cmd) return cmd_train(train_args, out);
    if (*synth_cmd) return cmd_synth(synth_args, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace quadvo::tools
