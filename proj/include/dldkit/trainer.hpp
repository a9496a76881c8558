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

#ifndef DLDKIT_TRAINER_HPP_
#define DLDKIT_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dldkit/dynamics.hpp"
#include "dldkit/error.hpp"
#include "dldkit/loss.hpp"

namespace dldkit::trainer {

// Independent child seeds for the data, initialisation and shuffling streams.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

struct DatasetSpec {
  int classes = 4;
  int dim = 2;
  int samples = 2000;
  double separation = 3.0;
  double noise_ratio = 0.4;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct SyntheticDataset {
  Eigen::MatrixXd features;  // samples x dim
  Eigen::MatrixXd means;     // classes x dim
  std::vector<int> clean_labels;
  std::vector<int> noisy_labels;
  std::vector<bool> corrupted;  // clean != noisy
  DatasetSpec spec;

  std::size_t size() const { return clean_labels.size(); }
  std::size_t CorruptedCount() const;
};

// Class means sit at mutually equidistant points `separation` apart when
// dim >= classes - 1 (scaled basis vectors, or a centred simplex when
// dim == classes - 1). With fewer dimensions they sit on a regular polygon in the first two coordinates with neighbouring means
// `separation` apart. Samples are drawn round-robin over classes with unit
// isotropic noise; labels are then corrupted with the same symmetric-noise
// draw used for annotation files.
SyntheticDataset GenerateDataset(const DatasetSpec& spec);

// Two-layer perceptron: dim -> hidden (ReLU) -> classes, softmax output.
struct MlpModel {
  Eigen::MatrixXd w1;  // dim x hidden
  Eigen::VectorXd b1;  // hidden
  Eigen::MatrixXd w2;  // hidden x classes
  Eigen::VectorXd b2;  // classes

  int dim() const { return static_cast<int>(w1.rows()); }
  int hidden() const { return static_cast<int>(w1.cols()); }
  int classes() const { return static_cast<int>(w2.cols()); }

  static MlpModel Zeros(int dim, int hidden, int classes);
  // Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  static MlpModel Random(int dim, int hidden, int classes, std::uint64_t seed);
};

// Row-wise softmax probabilities (max-subtracted) for a batch of inputs.
Eigen::MatrixXd ForwardBatch(const MlpModel& model, const Eigen::MatrixXd& x);
loss::ProbVector Forward(const MlpModel& model, std::span<const double> x);

struct Gradients {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
};

// Gradient of (1/B) sum_i w_i * CE(p_i, target_i) where the target is the
// one-hot label smoothed by `smoothing`. The output-layer error of sample i
// is w_i (p_i - target_i) / B.
Gradients Backward(const MlpModel& model, const Eigen::MatrixXd& x,
                   std::span<const int> labels, std::span<const double> weights,
                   double smoothing = 0.0);

// Per-sample losses for the current model (CE, or LS when smoothing > 0).
std::vector<double> SampleLosses(const Eigen::MatrixXd& probs,
                                 std::span<const int> labels,
                                 double smoothing = 0.0);

enum class LossMode { kBaseline, kLabelSmoothing, kDld };

LossMode ParseLossMode(std::string_view name);
std::string_view LossModeName(LossMode mode);

enum class ElSource { kFixed, kAuto };

struct TrainSpec {
  int hidden = 256;
  double learning_rate = 0.05;
  int batch_size = 64;
  int epochs = 36;
  LossMode loss_mode = LossMode::kBaseline;
  double ls_epsilon = 0.1;
  // `dld.el` is used when el_source == kFixed.
  loss::DldConfig dld;
  ElSource el_source = ElSource::kFixed;
  dynamics::ElParams el_params;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct TrainRow {
  int epoch = 0;
  double acc = 0.0;                 // agreement with noisy labels
  double clean_acc = 0.0;           // agreement with clean labels
  double correct_subset_acc = 0.0;  // over samples whose label is intact
  double corrupted_fit = 0.0;       // corrupted samples predicted as corrupted
  double loss = 0.0;                // sum of w_i l_i over the epoch / N
  double alpha = 1.0;
  std::size_t topk_size = 0;        // samples decayed during the epoch
};

struct TrainLog {
  std::vector<TrainRow> rows;
  std::optional<int> el;     // resolved EL (fixed, or detected)
  bool el_detected = false;  // auto EL fired
  bool el_missing = false;   // auto EL requested but never fired
  bool diverged = false;

  // "epoch,acc,clean_acc,correct_subset_acc,corrupted_fit,loss,alpha,topk_size"
  std::string ToCsv() const;
  dynamics::EpochSeries AccSeries() const;
};

// Thrown when a batch loss becomes non-finite; carries the rows completed so
// far.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& message, TrainLog partial)
      : Error(ErrorCode::kDivergenceDetected, message),
        partial_(std::move(partial)) {}
  const TrainLog& partial_log() const { return partial_; }

 private:
  TrainLog partial_;
};

// Observes every optimisation step: epoch, the batch's losses and the
// weighted loss applied to it.
using BatchObserver = std::function<void(int, const loss::LossBatch&,
                                         const loss::WeightedLoss&)>;

// Plain SGD with a fixed seed-determined shuffling sequence. With kDld the
// top-K decay applies from the resolved EL on; with kAuto, EL is detected on
// the noisy-label ACC series accumulated so far and decay starts the epoch
// after it fires.
TrainLog Train(const SyntheticDataset& data, const TrainSpec& spec,
               const BatchObserver& observer = {});

// ---------------------------------------------------------------------------
// Sweeps.

struct SweepGrid {
  std::vector<double> noise_ratio;
  std::vector<LossMode> loss_mode;
  std::vector<double> k_fraction;
  // Offsets from a base EL. The base EL is detected on a baseline run of the
  // same noise ratio and seed (el_source = auto) or taken from the spec.
  std::vector<int> el_offset;
};

struct SweepRow {
  double noise_ratio = 0.0;
  LossMode loss_mode = LossMode::kBaseline;
  std::optional<double> k_fraction;  // dld cells only
  std::optional<int> el_offset;      // dld cells with an offset grid
  std::optional<std::uint64_t> seed; // empty on seed-mean rows
  std::optional<int> el;             // EL in force (mean rows: none)
  int best_epoch = 0;
  double best_clean_acc = 0.0;
  double final_clean_acc = 0.0;
  double final_acc = 0.0;
  double final_corrupted_fit = 0.0;
  std::string status = "ok";
};

// Runs every (cell, seed) pair in canonical order: noise ratio, loss mode,
// k_fraction, el_offset, then seeds, each cell followed by its seed-mean row.
// Baseline and label-smoothing cells ignore k_fraction and el_offset. A
// failing run becomes a row with a non-"ok" status.
std::vector<SweepRow> Sweep(const DatasetSpec& data_spec,
                            const TrainSpec& train_spec, const SweepGrid& grid,
                            std::span<const std::uint64_t> seeds);

std::string SweepCsv(std::span<const SweepRow> rows);

// Mean best clean accuracy laid out with one row per EL offset ("EL-8" ...
// "EL+8") and one column per noise ratio.
std::string ElOffsetTable(std::span<const SweepRow> rows);
// One row per noise ratio; columns "baseline" (when present) then
// "top-<k>%" per k_fraction.
std::string TopKTable(std::span<const SweepRow> rows);

}  // namespace dldkit::trainer

#endif  // DLDKIT_TRAINER_HPP_
