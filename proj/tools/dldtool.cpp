/* Copyright 2026 The dldkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// dldtool: batch front end over the dld C interface.
//
//   dldtool inject-noise IN OUT --ratio R --seed S [--vocab FILE]
//   dldtool eval --gt DIR --pred DIR [--record FILE] [--iou T]
//                [--ap-mode voc07|all_point] [--out-dir DIR]
//   dldtool detect-el --log CSV --metric NAME [--eta E] [--degree D]
//                [--min-epochs M] [--scale percent|fraction]
//                [--scan causal|posthoc] [--out CSV]
//   dldtool train CONFIG [--out CSV] [--plot SVG]
//   dldtool sweep CONFIG [--seeds N] [--out CSV]
//
// Exit codes: 0 ok, 1 internal, 2 parse/config/io, 3 vocabulary too small,
// 4 image id mismatch, 5 insufficient points, 6 divergence.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dldkit/dld.h"

namespace fs = std::filesystem;

namespace {

int ExitCode(dld_status s) {
  switch (s) {
    case DLD_OK: return 0;
    case DLD_ERR_VOCABULARY_TOO_SMALL: return 3;
    case DLD_ERR_ID_MISMATCH: return 4;
    case DLD_ERR_INSUFFICIENT_POINTS: return 5;
    case DLD_ERR_DIVERGENCE: return 6;
    case DLD_ERR_INTERNAL: return 1;
    default: return 2;
  }
}

// Prints the failure to stderr and returns the exit code.
int Report(dld_status s) {
  std::cerr << "dldtool: " << dld_status_name(s) << ": " << dld_last_error()
            << '\n';
  return ExitCode(s);
}

int Usage(const std::string& message) {
  std::cerr << "dldtool: " << message << '\n';
  return 2;
}

bool ParentExists(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  return parent.empty() || fs::is_directory(parent);
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
template <typename T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using Dataset = Handle<dld_dataset, dld_dataset_free>;
using Record = Handle<dld_noise_record, dld_noise_record_free>;
using Detections = Handle<dld_detections, dld_detections_free>;
using EvalReport = Handle<dld_eval_report, dld_eval_report_free>;
using Series = Handle<dld_series, dld_series_free>;
using ElReport = Handle<dld_el_report, dld_el_report_free>;
using Experiment = Handle<dld_experiment, dld_experiment_free>;
using TrainLog = Handle<dld_train_log, dld_train_log_free>;

struct InjectArgs {
  std::string in_dir, out_dir, vocab;
  double ratio = 0.0;
  std::uint64_t seed = 0;
};

int RunInject(const InjectArgs& a) {
  if (!fs::is_directory(a.in_dir)) {
    return Usage("input directory not found: " + a.in_dir);
  }
  if (fs::exists(a.out_dir) &&
      fs::equivalent(fs::path(a.in_dir), fs::path(a.out_dir))) {
    return Usage("output directory must differ from input directory");
  }
  dld_dataset* raw = nullptr;
  if (dld_status s = dld_dataset_load_dir(a.in_dir.c_str(), &raw)) {
    return Report(s);
  }
  Dataset ds(raw);

  char** vocab = nullptr;
  size_t vocab_size = 0;
  if (!a.vocab.empty()) {
    if (dld_status s = dld_vocabulary_load(a.vocab.c_str(), &vocab, &vocab_size)) {
      return Report(s);
    }
  }
  dld_dataset* noisy_raw = nullptr;
  dld_noise_record* rec_raw = nullptr;
  const dld_status s = dld_inject_noise(ds.get(), a.ratio, a.seed, vocab,
                                        vocab_size, &noisy_raw, &rec_raw);
  dld_vocabulary_free(vocab, vocab_size);
  if (s) return Report(s);
  Dataset noisy(noisy_raw);
  Record rec(rec_raw);

  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) return Usage("cannot create " + a.out_dir + ": " + ec.message());
  if (dld_status w = dld_dataset_save_dir(noisy.get(), a.out_dir.c_str())) {
    return Report(w);
  }
  const std::string record_path = (fs::path(a.out_dir) / "noise_record.txt").string();
  if (dld_status w = dld_noise_record_save(rec.get(), record_path.c_str())) {
    return Report(w);
  }
  std::cout << "N=" << dld_dataset_instance_count(ds.get())
            << " changed=" << dld_noise_record_size(rec.get())
            << " record=" << record_path << '\n';
  return 0;
}

struct EvalArgs {
  std::string gt, pred, record, ap_mode = "voc07", out_dir = ".";
  double iou = 0.5;
};

int RunEval(const EvalArgs& a) {
  for (const std::string& d : {a.gt, a.pred}) {
    if (!fs::is_directory(d)) return Usage("directory not found: " + d);
  }
  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) return Usage("cannot create " + a.out_dir + ": " + ec.message());
  dld_eval_config cfg = dld_eval_config_default();
  cfg.iou_threshold = a.iou;
  cfg.ap_mode = a.ap_mode == "all_point" ? DLD_AP_ALL_POINT : DLD_AP_VOC07;

  dld_dataset* gt_raw = nullptr;
  if (dld_status s = dld_dataset_load_dir(a.gt.c_str(), &gt_raw)) return Report(s);
  Dataset gt(gt_raw);
  dld_detections* det_raw = nullptr;
  if (dld_status s = dld_detections_load_dir(a.pred.c_str(), &det_raw)) {
    return Report(s);
  }
  Detections dets(det_raw);
  Record rec;
  if (!a.record.empty()) {
    dld_noise_record* r = nullptr;
    if (dld_status s = dld_noise_record_load(a.record.c_str(), &r)) {
      return Report(s);
    }
    rec.reset(r);
  }
  dld_eval_report* rep_raw = nullptr;
  if (dld_status s = dld_evaluate(dets.get(), gt.get(), rec.get(), &cfg, &rep_raw)) {
    return Report(s);
  }
  EvalReport rep(rep_raw);
  const std::string csv = (fs::path(a.out_dir) / "report.csv").string();
  const std::string txt = (fs::path(a.out_dir) / "report.txt").string();
  if (dld_status s = dld_eval_report_write(rep.get(), csv.c_str(), txt.c_str())) {
    return Report(s);
  }
  std::printf("mAP=%.6f ACC=%.6f", dld_eval_report_map(rep.get()),
              dld_eval_report_acc(rep.get()));
  double v = 0.0;
  if (dld_eval_report_map_correct(rep.get(), &v)) std::printf(" mAPC=%.6f", v);
  if (dld_eval_report_map_incorrect(rep.get(), &v)) std::printf(" mAPI=%.6f", v);
  std::printf("\n");
  return 0;
}

struct DetectArgs {
  std::string log, metric, scale = "fraction", scan = "causal",
      out = "el_trace.csv";
  double eta = 0.001;
  int degree = 4;
  int min_epochs = 6;
};

int RunDetect(const DetectArgs& a) {
  if (!ParentExists(a.out)) return Usage("output directory not found for " + a.out);
  dld_series* raw = nullptr;
  if (dld_status s = dld_series_load_csv(a.log.c_str(), a.metric.c_str(), &raw)) {
    return Report(s);
  }
  Series series(raw);
  if (a.scale == "percent") {
    if (dld_status s = dld_series_scale(series.get(), 0.01)) return Report(s);
  }
  dld_el_report* rep_raw = nullptr;
  const dld_el_scan scan =
      a.scan == "posthoc" ? DLD_EL_SCAN_POSTHOC : DLD_EL_SCAN_CAUSAL;
  if (dld_status s = dld_detect_el(series.get(), a.eta, a.degree, a.min_epochs,
                                   scan, &rep_raw)) {
    return Report(s);
  }
  ElReport rep(rep_raw);
  if (dld_status s = dld_el_report_write_csv(rep.get(), a.out.c_str())) {
    return Report(s);
  }
  if (dld_el_report_immediate(rep.get())) {
    std::cerr << "dldtool: warning: curvature below eta at the first fit "
                 "(degenerate curvature); EL is the earliest admissible epoch\n";
  }
  int el = 0;
  if (dld_el_report_el(rep.get(), &el)) {
    std::cout << "EL=" << el << '\n';
  } else {
    std::cout << "EL=none\n";
  }
  return 0;
}

struct TrainArgs {
  std::string config, out, plot;
};

int RunTrain(const TrainArgs& a) {
  dld_experiment* raw = nullptr;
  if (dld_status s = dld_experiment_load(a.config.c_str(), 0, &raw)) {
    return Report(s);
  }
  Experiment exp(raw);
  std::string out = a.out;
  if (out.empty() && dld_experiment_output(exp.get())) {
    out = dld_experiment_output(exp.get());
  }
  if (out.empty()) out = "train_log.csv";
  std::string plot = a.plot;
  if (plot.empty() && dld_experiment_plot(exp.get())) {
    plot = dld_experiment_plot(exp.get());
  }
  for (const std::string& p : {out, plot}) {
    if (!p.empty() && !ParentExists(p)) {
      return Usage("output directory not found for " + p);
    }
  }

  dld_train_log* log_raw = nullptr;
  const dld_status status = dld_train(exp.get(), &log_raw);
  TrainLog log(log_raw);
  if (log) {
    if (dld_status s = dld_train_log_write_csv(log.get(), out.c_str())) {
      return Report(s);
    }
    if (!plot.empty()) {
      if (dld_status s = dld_train_log_write_svg(log.get(), plot.c_str())) {
        return Report(s);
      }
    }
  }
  if (status) return Report(status);
  int el = 0;
  std::cout << "log=" << out << " epochs=" << dld_train_log_rows(log.get());
  if (dld_train_log_el(log.get(), &el)) {
    std::cout << " EL=" << el;
  } else {
    std::cout << " EL=none";
  }
  if (!plot.empty()) std::cout << " plot=" << plot;
  std::cout << '\n';
  return 0;
}

struct SweepArgs {
  std::string config, out = "sweep.csv";
  int seeds = 0;
};

int RunSweep(const SweepArgs& a) {
  if (!ParentExists(a.out)) return Usage("output directory not found for " + a.out);
  dld_experiment* raw = nullptr;
  if (dld_status s = dld_experiment_load(a.config.c_str(), 1, &raw)) {
    return Report(s);
  }
  Experiment exp(raw);
  size_t rows = 0;
  if (dld_status s = dld_sweep(exp.get(), a.seeds, a.out.c_str(), &rows)) {
    return Report(s);
  }
  std::cout << "sweep=" << a.out << " rows=" << rows << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noise injection, evaluation, EL detection and training"};
  app.require_subcommand(1);

  InjectArgs inject;
  auto* c_inject = app.add_subcommand("inject-noise", "corrupt category labels");
  c_inject->add_option("in_dir", inject.in_dir)->required();
  c_inject->add_option("out_dir", inject.out_dir)->required();
  c_inject->add_option("--ratio", inject.ratio)->required();
  c_inject->add_option("--seed", inject.seed)->required();
  c_inject->add_option("--vocab", inject.vocab, "one category per line");

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "mAP, ACC and subset mAP");
  c_eval->add_option("--gt", eval.gt)->required();
  c_eval->add_option("--pred", eval.pred)->required();
  c_eval->add_option("--record", eval.record);
  c_eval->add_option("--iou", eval.iou)->capture_default_str();
  c_eval->add_option("--ap-mode", eval.ap_mode)
      ->check(CLI::IsMember({"voc07", "all_point"}))
      ->capture_default_str();
  c_eval->add_option("--out-dir", eval.out_dir)->capture_default_str();

  DetectArgs detect;
  auto* c_detect = app.add_subcommand("detect-el", "early-learning endpoint");
  c_detect->add_option("--log", detect.log)->required();
  c_detect->add_option("--metric", detect.metric)->required();
  c_detect->add_option("--eta", detect.eta)->capture_default_str();
  c_detect->add_option("--degree", detect.degree)->capture_default_str();
  c_detect->add_option("--min-epochs", detect.min_epochs)->capture_default_str();
  c_detect->add_option("--scale", detect.scale)
      ->check(CLI::IsMember({"percent", "fraction"}))
      ->capture_default_str();
  c_detect->add_option("--scan", detect.scan)
      ->check(CLI::IsMember({"causal", "posthoc"}))
      ->capture_default_str();
  c_detect->add_option("--out", detect.out, "trace CSV")->capture_default_str();

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "train the toy classifier");
  c_train->add_option("config", train.config)->required();
  c_train->add_option("--out", train.out, "log CSV (overrides config)");
  c_train->add_option("--plot", train.plot, "SVG path (overrides config)");

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "grid of training runs");
  c_sweep->add_option("config", sweep.config)->required();
  c_sweep->add_option("--seeds", sweep.seeds, "overrides config 'seeds'")
      ->check(CLI::PositiveNumber);
  c_sweep->add_option("--out", sweep.out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (c_inject->parsed()) return RunInject(inject);
  if (c_eval->parsed()) return RunEval(eval);
  if (c_detect->parsed()) return RunDetect(detect);
  if (c_train->parsed()) return RunTrain(train);
  return RunSweep(sweep);
}
