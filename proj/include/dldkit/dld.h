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

/* C interface to dldkit. Every function returns a dld_status; on failure a
 * message for the calling thread is available from dld_last_error(). Objects
 * are opaque handles owned by the caller and released with the matching
 * *_free function (NULL is accepted). */

#ifndef DLDKIT_DLD_H_
#define DLDKIT_DLD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DLD_API __declspec(dllexport)
#else
#define DLD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dld_status {
  DLD_OK = 0,
  DLD_ERR_INVALID_ARGUMENT = 1,
  DLD_ERR_PARSE = 2,               /* malformed line, empty category, CSV */
  DLD_ERR_VOCABULARY_TOO_SMALL = 3,
  DLD_ERR_ID_MISMATCH = 4,
  DLD_ERR_INSUFFICIENT_POINTS = 5,
  DLD_ERR_DIVERGENCE = 6,
  DLD_ERR_IO = 7,
  DLD_ERR_CONFIG = 8,
  DLD_ERR_RECORD_MISMATCH = 9,
  DLD_ERR_UNKNOWN_CATEGORY = 10,
  DLD_ERR_SCHEDULE_SINGULAR = 11,
  DLD_ERR_ILL_CONDITIONED = 12,
  DLD_ERR_INVALID_RATIO = 13,
  DLD_ERR_INTERNAL = 99
} dld_status;

DLD_API const char* dld_last_error(void);
DLD_API const char* dld_status_name(dld_status status);

/* ---- geometry ----------------------------------------------------------- */

typedef struct dld_obb {
  double cx, cy, w, h, angle; /* pixels, radians CCW */
} dld_obb;

DLD_API dld_status dld_obb_corners(const dld_obb* box, double out_xy[8]);
DLD_API dld_status dld_rotated_iou(const dld_obb* a, const dld_obb* b,
                                   double* out_iou);
DLD_API dld_status dld_quad_iou(const double a_xy[8], const double b_xy[8],
                                double* out_iou);

/* ---- annotations ------------------------------------------------------- */

typedef struct dld_dataset dld_dataset;
typedef struct dld_noise_record dld_noise_record;

DLD_API dld_status dld_dataset_load_dir(const char* dir, dld_dataset** out);
DLD_API dld_status dld_dataset_parse(const char* text, const char* image_id,
                                     dld_dataset** out);
DLD_API dld_status dld_dataset_save_dir(const dld_dataset* ds, const char* dir);
DLD_API size_t dld_dataset_image_count(const dld_dataset* ds);
DLD_API size_t dld_dataset_instance_count(const dld_dataset* ds);
DLD_API void dld_dataset_free(dld_dataset* ds);

/* vocabulary may be NULL (derived from the dataset). */
DLD_API dld_status dld_inject_noise(const dld_dataset* ds, double ratio,
                                    uint64_t seed,
                                    const char* const* vocabulary,
                                    size_t vocabulary_size,
                                    dld_dataset** out_noisy,
                                    dld_noise_record** out_record);
/* One category per line. */
DLD_API dld_status dld_vocabulary_load(const char* path, char*** out_items,
                                       size_t* out_count);
DLD_API void dld_vocabulary_free(char** items, size_t count);

DLD_API dld_status dld_noise_record_load(const char* path,
                                         dld_noise_record** out);
DLD_API dld_status dld_noise_record_save(const dld_noise_record* rec,
                                         const char* path);
DLD_API size_t dld_noise_record_size(const dld_noise_record* rec);
DLD_API void dld_noise_record_free(dld_noise_record* rec);

/* Sizes of the clean and corrupted partitions of ds under rec. */
DLD_API dld_status dld_partition_sizes(const dld_dataset* ds,
                                       const dld_noise_record* rec,
                                       size_t* out_clean, size_t* out_corrupted);

/* ---- metrics ----------------------------------------------------------- */

typedef struct dld_detections dld_detections;
typedef struct dld_eval_report dld_eval_report;

typedef enum dld_ap_mode { DLD_AP_VOC07 = 0, DLD_AP_ALL_POINT = 1 } dld_ap_mode;

typedef struct dld_eval_config {
  double iou_threshold;
  dld_ap_mode ap_mode;
  int ignore_difficult;
} dld_eval_config;

DLD_API dld_eval_config dld_eval_config_default(void);

DLD_API dld_status dld_detections_load_dir(const char* dir,
                                           dld_detections** out);
DLD_API void dld_detections_free(dld_detections* dets);

/* record may be NULL. Image id sets must match (DLD_ERR_ID_MISMATCH). */
DLD_API dld_status dld_evaluate(const dld_detections* dets,
                                const dld_dataset* gt,
                                const dld_noise_record* record,
                                const dld_eval_config* cfg,
                                dld_eval_report** out);
DLD_API double dld_eval_report_map(const dld_eval_report* r);
DLD_API double dld_eval_report_acc(const dld_eval_report* r);
/* Return 0 and leave *out untouched when no record was given. */
DLD_API int dld_eval_report_map_correct(const dld_eval_report* r, double* out);
DLD_API int dld_eval_report_map_incorrect(const dld_eval_report* r,
                                          double* out);
DLD_API dld_status dld_eval_report_write(const dld_eval_report* r,
                                         const char* csv_path,
                                         const char* txt_path);
DLD_API void dld_eval_report_free(dld_eval_report* r);

/* ---- dynamics ---------------------------------------------------------- */

typedef struct dld_series dld_series;
typedef struct dld_el_report dld_el_report;

DLD_API dld_status dld_series_load_csv(const char* path, const char* metric,
                                       dld_series** out);
DLD_API dld_status dld_series_from_arrays(const int* epochs,
                                          const double* values, size_t n,
                                          dld_series** out);
DLD_API size_t dld_series_size(const dld_series* s);
DLD_API dld_status dld_series_scale(dld_series* s, double factor);
DLD_API void dld_series_free(dld_series* s);

typedef enum dld_el_scan {
  DLD_EL_SCAN_CAUSAL = 0,  /* fit [1, e], evaluate at e */
  DLD_EL_SCAN_POSTHOC = 1  /* one fit over the whole series */
} dld_el_scan;

DLD_API dld_status dld_detect_el(const dld_series* s, double eta, int degree,
                                 int min_epochs, dld_el_scan scan,
                                 dld_el_report** out);
/* Returns 1 and sets *out_el when EL was found, 0 otherwise. */
DLD_API int dld_el_report_el(const dld_el_report* r, int* out_el);
DLD_API int dld_el_report_immediate(const dld_el_report* r);
DLD_API dld_status dld_el_report_write_csv(const dld_el_report* r,
                                           const char* path);
DLD_API void dld_el_report_free(dld_el_report* r);

/* ---- loss ---------------------------------------------------------------- */

typedef enum dld_schedule {
  DLD_SCHEDULE_EXP_DECAY = 0,
  DLD_SCHEDULE_PAPER_LITERAL = 1
} dld_schedule;

DLD_API dld_status dld_ce_loss(const double* probs, size_t num_classes,
                               size_t label, double* out);
DLD_API dld_status dld_alpha(int ec, int el, dld_schedule schedule, double tau,
                             double* out);
/* out_weights may be NULL; otherwise it receives n weights. */
DLD_API dld_status dld_dld_loss(const double* losses, size_t n, int ec, int el,
                                double k_fraction, dld_schedule schedule,
                                double tau, double* out_loss,
                                double* out_weights);

/* ---- experiments -------------------------------------------------------- */

typedef struct dld_experiment dld_experiment;
typedef struct dld_train_log dld_train_log;

/* allow_grid != 0 accepts sweep keys. */
DLD_API dld_status dld_experiment_load(const char* path, int allow_grid,
                                       dld_experiment** out);
/* NULL when the config has no such key. */
DLD_API const char* dld_experiment_output(const dld_experiment* e);
DLD_API const char* dld_experiment_plot(const dld_experiment* e);
DLD_API int dld_experiment_seeds(const dld_experiment* e);
DLD_API void dld_experiment_free(dld_experiment* e);

/* On DLD_ERR_DIVERGENCE *out still receives the partial log. */
DLD_API dld_status dld_train(const dld_experiment* e, dld_train_log** out);
DLD_API size_t dld_train_log_rows(const dld_train_log* log);
DLD_API int dld_train_log_el(const dld_train_log* log, int* out_el);
DLD_API dld_status dld_train_log_write_csv(const dld_train_log* log,
                                           const char* path);
DLD_API dld_status dld_train_log_write_svg(const dld_train_log* log,
                                           const char* path);
DLD_API void dld_train_log_free(dld_train_log* log);

/* Writes the sweep CSV and, when the grid has offsets or top-K values,
 * "<stem>_el_table.csv" / "<stem>_topk_table.csv" beside it. seeds < 1 uses
 * the config's value. */
DLD_API dld_status dld_sweep(const dld_experiment* e, int seeds,
                             const char* csv_path, size_t* out_rows);

#ifdef __cplusplus
}
#endif

#endif /* DLDKIT_DLD_H_ */
