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

#include "dldkit/dld.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "dldkit/annotations.hpp"
#include "dldkit/dynamics.hpp"
#include "dldkit/error.hpp"
#include "dldkit/experiment.hpp"
#include "dldkit/geometry.hpp"
#include "dldkit/loss.hpp"
#include "dldkit/metrics.hpp"
#include "dldkit/plot.hpp"
#include "dldkit/text.hpp"
#include "dldkit/trainer.hpp"

namespace ann = dldkit::annotations;
namespace dyn = dldkit::dynamics;
namespace geo = dldkit::geometry;
namespace met = dldkit::metrics;

struct dld_dataset {
  ann::Dataset value;
};
struct dld_noise_record {
  ann::NoiseRecord value;
};
struct dld_detections {
  std::vector<met::ImageDetections> value;
};
struct dld_eval_report {
  met::EvalReport value;
};
struct dld_series {
  dyn::EpochSeries value;
};
struct dld_el_report {
  dyn::ElReport value;
};
struct dld_experiment {
  dldkit::experiment::Experiment value;
};
struct dld_train_log {
  dldkit::trainer::TrainLog value;
};

namespace {

thread_local std::string g_last_error;

dld_status ToStatus(dldkit::ErrorCode code) {
  using dldkit::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return DLD_ERR_INVALID_ARGUMENT;
    case ErrorCode::kMalformedLine:
    case ErrorCode::kEmptyCategory: return DLD_ERR_PARSE;
    case ErrorCode::kVocabularyTooSmall: return DLD_ERR_VOCABULARY_TOO_SMALL;
    case ErrorCode::kInvalidRatio: return DLD_ERR_INVALID_RATIO;
    case ErrorCode::kRecordMismatch: return DLD_ERR_RECORD_MISMATCH;
    case ErrorCode::kUnknownCategory: return DLD_ERR_UNKNOWN_CATEGORY;
    case ErrorCode::kIdMismatch: return DLD_ERR_ID_MISMATCH;
    case ErrorCode::kInsufficientPoints: return DLD_ERR_INSUFFICIENT_POINTS;
    case ErrorCode::kIllConditioned: return DLD_ERR_ILL_CONDITIONED;
    case ErrorCode::kScheduleSingular: return DLD_ERR_SCHEDULE_SINGULAR;
    case ErrorCode::kDivergenceDetected: return DLD_ERR_DIVERGENCE;
    case ErrorCode::kIo: return DLD_ERR_IO;
    case ErrorCode::kConfig: return DLD_ERR_CONFIG;
  }
  return DLD_ERR_INTERNAL;
}

dld_status Fail(dld_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
dld_status Guard(F&& body) {
  try {
    g_last_error.clear();
    body();
    return DLD_OK;
  } catch (const dldkit::Error& e) {
    return Fail(ToStatus(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(DLD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(DLD_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(DLD_ERR_INTERNAL, "unknown failure");
  }
}

#define DLD_REQUIRE(cond, what)                                   \
  do {                                                            \
    if (!(cond)) return Fail(DLD_ERR_INVALID_ARGUMENT, what);     \
  } while (0)

geo::Quad QuadFromArray(const double xy[8]) {
  geo::Quad q;
  for (int i = 0; i < 4; ++i) q[i] = {xy[2 * i], xy[2 * i + 1]};
  return q;
}

geo::OrientedBox BoxFrom(const dld_obb& b) {
  return geo::OrientedBox(b.cx, b.cy, b.w, b.h, b.angle);
}

dldkit::loss::Schedule ScheduleFrom(dld_schedule s) {
  return s == DLD_SCHEDULE_PAPER_LITERAL ? dldkit::loss::Schedule::kPaperLiteral
                                         : dldkit::loss::Schedule::kExpDecay;
}

std::filesystem::path Sibling(const std::filesystem::path& csv,
                              const std::string& suffix) {
  std::filesystem::path out = csv;
  out.replace_filename(csv.stem().string() + suffix);
  return out;
}

}  // namespace

extern "C" {

const char* dld_last_error(void) { return g_last_error.c_str(); }

const char* dld_status_name(dld_status status) {
  switch (status) {
    case DLD_OK: return "ok";
    case DLD_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case DLD_ERR_PARSE: return "parse_error";
    case DLD_ERR_VOCABULARY_TOO_SMALL: return "vocabulary_too_small";
    case DLD_ERR_ID_MISMATCH: return "id_mismatch";
    case DLD_ERR_INSUFFICIENT_POINTS: return "insufficient_points";
    case DLD_ERR_DIVERGENCE: return "divergence_detected";
    case DLD_ERR_IO: return "io_error";
    case DLD_ERR_CONFIG: return "config_error";
    case DLD_ERR_RECORD_MISMATCH: return "record_mismatch";
    case DLD_ERR_UNKNOWN_CATEGORY: return "unknown_category";
    case DLD_ERR_SCHEDULE_SINGULAR: return "schedule_singular";
    case DLD_ERR_ILL_CONDITIONED: return "ill_conditioned";
    case DLD_ERR_INVALID_RATIO: return "invalid_ratio";
    case DLD_ERR_INTERNAL: return "internal_error";
  }
  return "unknown_status";
}

/* geometry */

dld_status dld_obb_corners(const dld_obb* box, double out_xy[8]) {
  DLD_REQUIRE(box && out_xy, "null argument");
  return Guard([&] {
    const geo::Quad q = geo::ToCorners(BoxFrom(*box));
    for (int i = 0; i < 4; ++i) {
      out_xy[2 * i] = q[i].x;
      out_xy[2 * i + 1] = q[i].y;
    }
  });
}

dld_status dld_rotated_iou(const dld_obb* a, const dld_obb* b,
                           double* out_iou) {
  DLD_REQUIRE(a && b && out_iou, "null argument");
  return Guard([&] { *out_iou = geo::RotatedIou(BoxFrom(*a), BoxFrom(*b)); });
}

dld_status dld_quad_iou(const double a_xy[8], const double b_xy[8],
                        double* out_iou) {
  DLD_REQUIRE(a_xy && b_xy && out_iou, "null argument");
  return Guard([&] {
    const geo::Quad a = geo::MakeCounterClockwise(QuadFromArray(a_xy));
    const geo::Quad b = geo::MakeCounterClockwise(QuadFromArray(b_xy));
    *out_iou = geo::QuadIou(a, b);
  });
}

/* annotations */

dld_status dld_dataset_load_dir(const char* dir, dld_dataset** out) {
  DLD_REQUIRE(dir && out, "null argument");
  return Guard([&] {
    *out = new dld_dataset{ann::LoadDotaDirectory(dir)};
  });
}

dld_status dld_dataset_parse(const char* text, const char* image_id,
                             dld_dataset** out) {
  DLD_REQUIRE(text && image_id && out, "null argument");
  return Guard([&] {
    ann::Dataset ds;
    ds.push_back(ann::ParseDota(text, image_id));
    *out = new dld_dataset{std::move(ds)};
  });
}

dld_status dld_dataset_save_dir(const dld_dataset* ds, const char* dir) {
  DLD_REQUIRE(ds && dir, "null argument");
  return Guard([&] { ann::WriteDotaDirectory(ds->value, dir); });
}

size_t dld_dataset_image_count(const dld_dataset* ds) {
  return ds ? ds->value.size() : 0;
}

size_t dld_dataset_instance_count(const dld_dataset* ds) {
  return ds ? ann::InstanceCount(ds->value) : 0;
}

void dld_dataset_free(dld_dataset* ds) { delete ds; }

dld_status dld_inject_noise(const dld_dataset* ds, double ratio, uint64_t seed,
                            const char* const* vocabulary,
                            size_t vocabulary_size, dld_dataset** out_noisy,
                            dld_noise_record** out_record) {
  DLD_REQUIRE(ds && out_noisy && out_record, "null argument");
  DLD_REQUIRE(vocabulary || vocabulary_size == 0, "null vocabulary");
  return Guard([&] {
    std::optional<std::vector<std::string>> vocab;
    if (vocabulary) vocab.emplace(vocabulary, vocabulary + vocabulary_size);
    ann::NoisyDataset noisy = ann::InjectNoise(ds->value, ratio, seed, vocab);
    auto* d = new dld_dataset{std::move(noisy.dataset)};
    try {
      *out_record = new dld_noise_record{std::move(noisy.record)};
    } catch (...) {
      delete d;
      throw;
    }
    *out_noisy = d;
  });
}

dld_status dld_vocabulary_load(const char* path, char*** out_items,
                               size_t* out_count) {
  DLD_REQUIRE(path && out_items && out_count, "null argument");
  return Guard([&] {
    const std::string content = dldkit::text::ReadFile(path);
    std::vector<std::string> items;
    for (std::string_view line : dldkit::text::Split(content, '\n')) {
      line = dldkit::text::Trim(line);
      if (!line.empty()) items.emplace_back(line);
    }
    char** arr = new char*[items.size() + 1]();
    for (size_t i = 0; i < items.size(); ++i) {
      arr[i] = new char[items[i].size() + 1];
      std::memcpy(arr[i], items[i].c_str(), items[i].size() + 1);
    }
    *out_items = arr;
    *out_count = items.size();
  });
}

void dld_vocabulary_free(char** items, size_t count) {
  if (!items) return;
  for (size_t i = 0; i < count; ++i) delete[] items[i];
  delete[] items;
}

dld_status dld_noise_record_load(const char* path, dld_noise_record** out) {
  DLD_REQUIRE(path && out, "null argument");
  return Guard([&] {
    *out = new dld_noise_record{
        ann::ParseNoiseRecord(dldkit::text::ReadFile(path))};
  });
}

dld_status dld_noise_record_save(const dld_noise_record* rec,
                                 const char* path) {
  DLD_REQUIRE(rec && path, "null argument");
  return Guard([&] {
    dldkit::text::WriteFile(path, ann::WriteNoiseRecord(rec->value));
  });
}

size_t dld_noise_record_size(const dld_noise_record* rec) {
  return rec ? rec->value.changes.size() : 0;
}

void dld_noise_record_free(dld_noise_record* rec) { delete rec; }

dld_status dld_partition_sizes(const dld_dataset* ds,
                               const dld_noise_record* rec, size_t* out_clean,
                               size_t* out_corrupted) {
  DLD_REQUIRE(ds && rec && out_clean && out_corrupted, "null argument");
  return Guard([&] {
    const ann::Partition p = ann::PartitionByRecord(ds->value, rec->value);
    *out_clean = ann::InstanceCount(p.clean);
    *out_corrupted = ann::InstanceCount(p.corrupted);
  });
}

/* metrics */

dld_eval_config dld_eval_config_default(void) {
  const met::EvalConfig d;
  return {d.iou_threshold,
          d.ap_mode == met::ApMode::kAllPoint ? DLD_AP_ALL_POINT : DLD_AP_VOC07,
          d.ignore_difficult ? 1 : 0};
}

dld_status dld_detections_load_dir(const char* dir, dld_detections** out) {
  DLD_REQUIRE(dir && out, "null argument");
  return Guard([&] {
    *out = new dld_detections{met::LoadDetectionDirectory(dir)};
  });
}

void dld_detections_free(dld_detections* dets) { delete dets; }

dld_status dld_evaluate(const dld_detections* dets, const dld_dataset* gt,
                        const dld_noise_record* record,
                        const dld_eval_config* cfg, dld_eval_report** out) {
  DLD_REQUIRE(dets && gt && out, "null argument");
  return Guard([&] {
    met::EvalConfig c;
    if (cfg) {
      c.iou_threshold = cfg->iou_threshold;
      c.ap_mode = cfg->ap_mode == DLD_AP_ALL_POINT ? met::ApMode::kAllPoint
                                                   : met::ApMode::kVoc07ElevenPoint;
      c.ignore_difficult = cfg->ignore_difficult != 0;
    }
    *out = new dld_eval_report{met::Evaluate(
        dets->value, gt->value, record ? &record->value : nullptr, c)};
  });
}

double dld_eval_report_map(const dld_eval_report* r) {
  return r ? r->value.map : 0.0;
}

double dld_eval_report_acc(const dld_eval_report* r) {
  return r && r->value.acc ? *r->value.acc : 0.0;
}

int dld_eval_report_map_correct(const dld_eval_report* r, double* out) {
  if (!r || !out || !r->value.map_correct) return 0;
  *out = *r->value.map_correct;
  return 1;
}

int dld_eval_report_map_incorrect(const dld_eval_report* r, double* out) {
  if (!r || !out || !r->value.map_incorrect) return 0;
  *out = *r->value.map_incorrect;
  return 1;
}

dld_status dld_eval_report_write(const dld_eval_report* r, const char* csv_path,
                                 const char* txt_path) {
  DLD_REQUIRE(r, "null report");
  return Guard([&] {
    if (csv_path) dldkit::text::WriteFile(csv_path, r->value.ToCsv());
    if (txt_path) dldkit::text::WriteFile(txt_path, r->value.ToText());
  });
}

void dld_eval_report_free(dld_eval_report* r) { delete r; }

/* dynamics */

dld_status dld_series_load_csv(const char* path, const char* metric,
                               dld_series** out) {
  DLD_REQUIRE(path && metric && out, "null argument");
  return Guard([&] {
    *out = new dld_series{
        dyn::ParseSeriesCsv(dldkit::text::ReadFile(path), metric, path)};
  });
}

dld_status dld_series_from_arrays(const int* epochs, const double* values,
                                  size_t n, dld_series** out) {
  DLD_REQUIRE(out && (n == 0 || (epochs && values)), "null argument");
  return Guard([&] {
    *out = new dld_series{dyn::EpochSeries(
        "acc", std::vector<int>(epochs, epochs + n),
        std::vector<double>(values, values + n))};
  });
}

size_t dld_series_size(const dld_series* s) { return s ? s->value.size() : 0; }

dld_status dld_series_scale(dld_series* s, double factor) {
  DLD_REQUIRE(s, "null series");
  return Guard([&] { s->value = s->value.Scaled(factor); });
}

void dld_series_free(dld_series* s) { delete s; }

dld_status dld_detect_el(const dld_series* s, double eta, int degree,
                         int min_epochs, dld_el_scan scan,
                         dld_el_report** out) {
  DLD_REQUIRE(s && out, "null argument");
  return Guard([&] {
    dyn::ElParams p;
    p.eta = eta;
    p.degree = degree;
    p.min_epochs = min_epochs;
    p.scan = scan == DLD_EL_SCAN_POSTHOC ? dyn::ElScan::kPosthoc
                                         : dyn::ElScan::kCausal;
    *out = new dld_el_report{dyn::DetectEl(s->value, p)};
  });
}

int dld_el_report_el(const dld_el_report* r, int* out_el) {
  if (!r || !r->value.el) return 0;
  if (out_el) *out_el = *r->value.el;
  return 1;
}

int dld_el_report_immediate(const dld_el_report* r) {
  return r && r->value.immediate_trigger ? 1 : 0;
}

dld_status dld_el_report_write_csv(const dld_el_report* r, const char* path) {
  DLD_REQUIRE(r && path, "null argument");
  return Guard([&] { dldkit::text::WriteFile(path, r->value.ToCsv()); });
}

void dld_el_report_free(dld_el_report* r) { delete r; }

/* loss */

dld_status dld_ce_loss(const double* probs, size_t num_classes, size_t label,
                       double* out) {
  DLD_REQUIRE(probs && out, "null argument");
  return Guard([&] {
    const dldkit::loss::ProbVector p(
        std::vector<double>(probs, probs + num_classes));
    *out = dldkit::loss::CrossEntropy(p, label);
  });
}

dld_status dld_alpha(int ec, int el, dld_schedule schedule, double tau,
                     double* out) {
  DLD_REQUIRE(out, "null argument");
  return Guard(
      [&] { *out = dldkit::loss::Alpha(ec, el, ScheduleFrom(schedule), tau); });
}

dld_status dld_dld_loss(const double* losses, size_t n, int ec, int el,
                        double k_fraction, dld_schedule schedule, double tau,
                        double* out_loss, double* out_weights) {
  DLD_REQUIRE(out_loss && (n == 0 || losses), "null argument");
  return Guard([&] {
    dldkit::loss::LossBatch batch;
    batch.losses.assign(losses, losses + n);
    batch.indices.resize(n);
    for (size_t i = 0; i < n; ++i) batch.indices[i] = i;
    dldkit::loss::DldConfig cfg;
    cfg.k_fraction = k_fraction;
    cfg.el = el;
    cfg.schedule = ScheduleFrom(schedule);
    cfg.tau = tau;
    const dldkit::loss::WeightedLoss w = dldkit::loss::DldLoss(batch, ec, cfg);
    *out_loss = w.value;
    if (out_weights) {
      for (size_t i = 0; i < n; ++i) out_weights[i] = w.weights[i];
    }
  });
}

/* experiments */

dld_status dld_experiment_load(const char* path, int allow_grid,
                               dld_experiment** out) {
  DLD_REQUIRE(path && out, "null argument");
  return Guard([&] {
    std::string content;
    try {
      content = dldkit::text::ReadFile(path);
    } catch (const dldkit::Error& e) {
      throw dldkit::Error(dldkit::ErrorCode::kConfig, e.what());
    }
    *out = new dld_experiment{
        dldkit::experiment::ParseExperiment(content, allow_grid != 0)};
  });
}

const char* dld_experiment_output(const dld_experiment* e) {
  return e && e->value.output ? e->value.output->c_str() : nullptr;
}

const char* dld_experiment_plot(const dld_experiment* e) {
  return e && e->value.plot ? e->value.plot->c_str() : nullptr;
}

int dld_experiment_seeds(const dld_experiment* e) {
  return e ? e->value.seeds : 0;
}

void dld_experiment_free(dld_experiment* e) { delete e; }

dld_status dld_train(const dld_experiment* e, dld_train_log** out) {
  DLD_REQUIRE(e && out, "null argument");
  *out = nullptr;
  return Guard([&] {
    try {
      *out = new dld_train_log{dldkit::experiment::RunExperiment(e->value)};
    } catch (const dldkit::trainer::TrainingDiverged& d) {
      *out = new dld_train_log{d.partial_log()};
      throw;
    }
  });
}

size_t dld_train_log_rows(const dld_train_log* log) {
  return log ? log->value.rows.size() : 0;
}

int dld_train_log_el(const dld_train_log* log, int* out_el) {
  if (!log || !log->value.el) return 0;
  if (out_el) *out_el = *log->value.el;
  return 1;
}

dld_status dld_train_log_write_csv(const dld_train_log* log, const char* path) {
  DLD_REQUIRE(log && path, "null argument");
  return Guard([&] { dldkit::text::WriteFile(path, log->value.ToCsv()); });
}

dld_status dld_train_log_write_svg(const dld_train_log* log, const char* path) {
  DLD_REQUIRE(log && path, "null argument");
  return Guard([&] {
    dldkit::text::WriteFile(path, dldkit::plot::TrainLogSvg(log->value));
  });
}

void dld_train_log_free(dld_train_log* log) { delete log; }

dld_status dld_sweep(const dld_experiment* e, int seeds, const char* csv_path,
                     size_t* out_rows) {
  DLD_REQUIRE(e && csv_path, "null argument");
  return Guard([&] {
    const auto& x = e->value;
    const int n = seeds >= 1 ? seeds : x.seeds;
    std::vector<std::uint64_t> seed_list;
    for (int i = 0; i < n; ++i) seed_list.push_back(x.seed + i);
    const auto rows = dldkit::trainer::Sweep(x.data, x.train, x.grid, seed_list);
    const std::filesystem::path csv(csv_path);
    dldkit::text::WriteFile(csv, dldkit::trainer::SweepCsv(rows));
    if (!x.grid.el_offset.empty()) {
      dldkit::text::WriteFile(Sibling(csv, "_el_table.csv"),
                              dldkit::trainer::ElOffsetTable(rows));
    }
    if (!x.grid.k_fraction.empty()) {
      dldkit::text::WriteFile(Sibling(csv, "_topk_table.csv"),
                              dldkit::trainer::TopKTable(rows));
    }
    if (out_rows) *out_rows = rows.size();
  });
}

}  // extern "C"
