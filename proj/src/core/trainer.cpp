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

#include "dldkit/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "dldkit/annotations.hpp"
#include "dldkit/text.hpp"

namespace dldkit::trainer {

namespace {

constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kInitStream = 3;
constexpr std::uint64_t kShuffleStream = 4;

Eigen::MatrixXd Rows(const Eigen::MatrixXd& m, std::span<const std::size_t> idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
  }
  return out;
}

std::vector<int> Predict(const MlpModel& model, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd probs = ForwardBatch(model, x);
  std::vector<int> out(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index arg = 0;
    probs.row(i).maxCoeff(&arg);
    out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return out;
}

void FillAccuracies(const SyntheticDataset& data, const std::vector<int>& pred,
                    TrainRow& row) {
  std::size_t agree_noisy = 0;
  std::size_t agree_clean = 0;
  std::size_t n_clean = 0;
  std::size_t ok_clean = 0;
  std::size_t n_corrupt = 0;
  std::size_t fit_corrupt = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    agree_noisy += pred[i] == data.noisy_labels[i];
    agree_clean += pred[i] == data.clean_labels[i];
    if (data.corrupted[i]) {
      ++n_corrupt;
      fit_corrupt += pred[i] == data.noisy_labels[i];
    } else {
      ++n_clean;
      ok_clean += pred[i] == data.clean_labels[i];
    }
  }
  const auto frac = [](std::size_t a, std::size_t b) {
    return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0;
  };
  row.acc = frac(agree_noisy, data.size());
  row.clean_acc = frac(agree_clean, data.size());
  row.correct_subset_acc = frac(ok_clean, n_clean);
  row.corrupted_fit = frac(fit_corrupt, n_corrupt);
}

std::string PercentLabel(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", std::round(fraction * 100.0 * 1e6) / 1e6);
  return buf;
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser over the combined value.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void DatasetSpec::Validate() const {
  if (classes < 2 || dim < 1 || samples < classes || !std::isfinite(separation) ||
      separation < 0.0 || !(noise_ratio >= 0.0 && noise_ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid dataset spec: need classes >= 2, dim >= 1, "
                "samples >= classes, separation >= 0, noise ratio in [0, 1]");
  }
}

std::size_t SyntheticDataset::CorruptedCount() const {
  return static_cast<std::size_t>(
      std::count(corrupted.begin(), corrupted.end(), true));
}

SyntheticDataset GenerateDataset(const DatasetSpec& spec) {
  spec.Validate();
  const int c = spec.classes;
  const int d = spec.dim;
  SyntheticDataset out;
  out.spec = spec;
  out.means = Eigen::MatrixXd::Zero(c, d);
  if (d >= c) {
    for (int k = 0; k < c; ++k) out.means(k, k) = spec.separation / std::sqrt(2.0);
  } else if (d == c - 1 && d >= 2) {
    // Centred basis vectors expressed in an orthonormal basis of their span.
    const Eigen::MatrixXd centred =
        Eigen::MatrixXd::Identity(c, c) -
        Eigen::MatrixXd::Constant(c, c, 1.0 / static_cast<double>(c));
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(centred)
                                  .householderQ() *
                              Eigen::MatrixXd::Identity(c, d);
    out.means = (spec.separation / std::sqrt(2.0)) * centred * q;
  } else if (d >= 2) {
    const double radius = spec.separation / (2.0 * std::sin(std::numbers::pi / c));
    for (int k = 0; k < c; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / c;
      out.means(k, 0) = radius * std::cos(theta);
      out.means(k, 1) = radius * std::sin(theta);
    }
  } else {
    for (int k = 0; k < c; ++k) {
      out.means(k, 0) = spec.separation * (k - 0.5 * (c - 1));
    }
  }

  const auto n = static_cast<std::size_t>(spec.samples);
  std::mt19937_64 rng(DeriveSeed(spec.seed, kDataStream));
  std::normal_distribution<double> gauss(0.0, 1.0);
  out.features.resize(static_cast<Eigen::Index>(n), d);
  out.clean_labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(c));
    out.clean_labels[i] = label;
    for (int j = 0; j < d; ++j) {
      out.features(static_cast<Eigen::Index>(i), j) = out.means(label, j) + gauss(rng);
    }
  }

  std::vector<std::size_t> labels(out.clean_labels.begin(), out.clean_labels.end());
  out.noisy_labels = out.clean_labels;
  out.corrupted.assign(n, false);
  for (const auto& flip : annotations::DrawSymmetricNoise(
           labels, static_cast<std::size_t>(c), spec.noise_ratio,
           DeriveSeed(spec.seed, kNoiseStream))) {
    out.noisy_labels[flip.position] = static_cast<int>(flip.corrupted);
    out.corrupted[flip.position] = true;
  }
  return out;
}

MlpModel MlpModel::Zeros(int dim, int hidden, int classes) {
  MlpModel m;
  m.w1 = Eigen::MatrixXd::Zero(dim, hidden);
  m.b1 = Eigen::VectorXd::Zero(hidden);
  m.w2 = Eigen::MatrixXd::Zero(hidden, classes);
  m.b2 = Eigen::VectorXd::Zero(classes);
  return m;
}

MlpModel MlpModel::Random(int dim, int hidden, int classes, std::uint64_t seed) {
  if (dim < 1 || hidden < 1 || classes < 2) {
    throw Error(ErrorCode::kInvalidArgument, "invalid model shape");
  }
  MlpModel m = Zeros(dim, hidden, classes);
  std::mt19937_64 rng(seed);
  const double a1 = 1.0 / std::sqrt(static_cast<double>(dim));
  const double a2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  std::uniform_real_distribution<double> u1(-a1, a1);
  std::uniform_real_distribution<double> u2(-a2, a2);
  for (Eigen::Index j = 0; j < m.w1.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.w1.rows(); ++i) m.w1(i, j) = u1(rng);
  }
  for (Eigen::Index j = 0; j < m.b1.size(); ++j) m.b1(j) = u1(rng);
  for (Eigen::Index j = 0; j < m.w2.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.w2.rows(); ++i) m.w2(i, j) = u2(rng);
  }
  for (Eigen::Index j = 0; j < m.b2.size(); ++j) m.b2(j) = u2(rng);
  return m;
}

Eigen::MatrixXd ForwardBatch(const MlpModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.w1.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "input dimension mismatch");
  }
  const Eigen::MatrixXd hidden =
      ((x * model.w1).rowwise() + model.b1.transpose()).cwiseMax(0.0);
  Eigen::MatrixXd logits = (hidden * model.w2).rowwise() + model.b2.transpose();
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double top = logits.row(i).maxCoeff();
    logits.row(i) = (logits.row(i).array() - top).exp().matrix();
    logits.row(i) /= logits.row(i).sum();
  }
  return logits;
}

loss::ProbVector Forward(const MlpModel& model, std::span<const double> x) {
  Eigen::MatrixXd row(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j) row(0, static_cast<Eigen::Index>(j)) = x[j];
  const Eigen::MatrixXd p = ForwardBatch(model, row);
  return loss::ProbVector(std::vector<double>(p.data(), p.data() + p.size()));
}

Gradients Backward(const MlpModel& model, const Eigen::MatrixXd& x,
                   std::span<const int> labels, std::span<const double> weights,
                   double smoothing) {
  const Eigen::Index b = x.rows();
  if (static_cast<std::size_t>(b) != labels.size() ||
      labels.size() != weights.size() || b == 0) {
    throw Error(ErrorCode::kInvalidArgument, "batch shape mismatch");
  }
  const Eigen::Index c = model.w2.cols();
  const Eigen::MatrixXd pre = (x * model.w1).rowwise() + model.b1.transpose();
  const Eigen::MatrixXd act = pre.cwiseMax(0.0);
  Eigen::MatrixXd logits = (act * model.w2).rowwise() + model.b2.transpose();

  // Output error: w_i (p_i - target_i) / B.
  Eigen::MatrixXd err(b, c);
  for (Eigen::Index i = 0; i < b; ++i) {
    const double top = logits.row(i).maxCoeff();
    Eigen::RowVectorXd p = (logits.row(i).array() - top).exp().matrix();
    p /= p.sum();
    const auto label = static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)]);
    if (label < 0 || label >= c) {
      throw Error(ErrorCode::kInvalidArgument, "label out of range");
    }
    Eigen::RowVectorXd target =
        Eigen::RowVectorXd::Constant(c, smoothing / static_cast<double>(c));
    target(label) += 1.0 - smoothing;
    err.row(i) = (p - target) * (weights[static_cast<std::size_t>(i)] /
                                 static_cast<double>(b));
  }

  Gradients g;
  g.w2 = act.transpose() * err;
  g.b2 = err.colwise().sum().transpose();
  Eigen::MatrixXd back = err * model.w2.transpose();
  back = back.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
  g.w1 = x.transpose() * back;
  g.b1 = back.colwise().sum().transpose();
  return g;
}

std::vector<double> SampleLosses(const Eigen::MatrixXd& probs,
                                 std::span<const int> labels, double smoothing) {
  std::vector<double> out(labels.size());
  const double c = static_cast<double>(probs.cols());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    if (smoothing == 0.0) {
      out[i] = -std::log(std::max(probs(row, labels[i]), loss::kProbabilityFloor));
      continue;
    }
    double l = 0.0;
    for (Eigen::Index k = 0; k < probs.cols(); ++k) {
      const double target = (k == labels[i] ? 1.0 - smoothing : 0.0) + smoothing / c;
      l -= target * std::log(std::max(probs(row, k), loss::kProbabilityFloor));
    }
    out[i] = l;
  }
  return out;
}

LossMode ParseLossMode(std::string_view name) {
  if (name == "baseline") return LossMode::kBaseline;
  if (name == "ls") return LossMode::kLabelSmoothing;
  if (name == "dld") return LossMode::kDld;
  throw Error(ErrorCode::kConfig, "unknown loss mode '" + std::string(name) +
                                      "' (expected baseline|ls|dld)");
}

std::string_view LossModeName(LossMode mode) {
  switch (mode) {
    case LossMode::kBaseline: return "baseline";
    case LossMode::kLabelSmoothing: return "ls";
    case LossMode::kDld: return "dld";
  }
  return "baseline";
}

void TrainSpec::Validate() const {
  if (hidden < 1 || !(learning_rate > 0.0) || batch_size < 1 || epochs < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid training spec: need hidden >= 1, learning_rate > 0, "
                "batch_size >= 1, epochs >= 1");
  }
  if (!(ls_epsilon >= 0.0 && ls_epsilon < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "ls_epsilon must lie in [0, 1)");
  }
  dld.Validate();
}

std::string TrainLog::ToCsv() const {
  std::ostringstream out;
  out << "epoch,acc,clean_acc,correct_subset_acc,corrupted_fit,loss,alpha,"
         "topk_size\n";
  for (const auto& r : rows) {
    out << r.epoch << ',' << text::FormatReal(r.acc) << ','
        << text::FormatReal(r.clean_acc) << ','
        << text::FormatReal(r.correct_subset_acc) << ','
        << text::FormatReal(r.corrupted_fit) << ','
        << text::FormatReal(r.loss) << ',' << text::FormatReal(r.alpha) << ','
        << r.topk_size << '\n';
  }
  return out.str();
}

dynamics::EpochSeries TrainLog::AccSeries() const {
  dynamics::EpochSeries s("acc", {}, {});
  for (const auto& r : rows) s.Append(r.epoch, r.acc);
  return s;
}

TrainLog Train(const SyntheticDataset& data, const TrainSpec& spec,
               const BatchObserver& observer) {
  spec.Validate();
  const int classes = data.spec.classes;
  MlpModel model = MlpModel::Random(data.spec.dim, spec.hidden, classes,
                                    DeriveSeed(spec.seed, kInitStream));
  std::mt19937_64 shuffle_rng(DeriveSeed(spec.seed, kShuffleStream));
  const std::size_t n = data.size();
  const double smoothing =
      spec.loss_mode == LossMode::kLabelSmoothing ? spec.ls_epsilon : 0.0;
  const bool use_dld = spec.loss_mode == LossMode::kDld;

  TrainLog log;
  loss::DldConfig dld = spec.dld;
  std::optional<int> el;
  if (spec.el_source == ElSource::kFixed) el = dld.el;
  log.el = el;
  dynamics::EpochSeries acc_series("acc", {}, {});

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 1; epoch <= spec.epochs; ++epoch) {
    bool decay = false;
    double alpha = 1.0;
    if (use_dld && el) {
      dld.el = *el;
      decay = loss::DecayActive(epoch, dld);
      if (decay) alpha = loss::Alpha(epoch, dld.el, dld.schedule, dld.tau);
    }

    // Per-epoch selection ranks every sample once with the model as it
    // stands at the start of the epoch.
    std::vector<bool> epoch_top(n, false);
    if (decay && dld.selection_scope == loss::SelectionScope::kPerEpoch) {
      const Eigen::MatrixXd probs = ForwardBatch(model, data.features);
      loss::LossBatch all;
      all.losses = SampleLosses(probs, data.noisy_labels, smoothing);
      all.indices.resize(n);
      std::iota(all.indices.begin(), all.indices.end(), std::size_t{0});
      for (std::size_t pos : loss::SelectTopK(all, dld.k_fraction).top_k) {
        epoch_top[pos] = true;
      }
    }

    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double weighted_sum = 0.0;
    std::size_t decayed = 0;
    for (std::size_t start = 0; start < n;
         start += static_cast<std::size_t>(spec.batch_size)) {
      const std::size_t stop =
          std::min(n, start + static_cast<std::size_t>(spec.batch_size));
      const std::span<const std::size_t> idx(order.data() + start, stop - start);
      const Eigen::MatrixXd x = Rows(data.features, idx);
      std::vector<int> labels(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) labels[i] = data.noisy_labels[idx[i]];

      loss::LossBatch batch;
      batch.losses = SampleLosses(ForwardBatch(model, x), labels, smoothing);
      batch.indices.assign(idx.begin(), idx.end());

      loss::WeightedLoss weighted;
      if (!decay) {
        weighted = loss::ApplyDecay(batch, {}, 1.0);
      } else if (dld.selection_scope == loss::SelectionScope::kPerBatch) {
        weighted = loss::DldLoss(batch, epoch, dld);
      } else {
        std::vector<std::size_t> top;
        for (std::size_t i = 0; i < idx.size(); ++i) {
          if (epoch_top[idx[i]]) top.push_back(i);
        }
        weighted = loss::ApplyDecay(batch, top, alpha);
      }
      if (!std::isfinite(weighted.value)) {
        log.diverged = true;
        throw TrainingDiverged("non-finite loss at epoch " + std::to_string(epoch),
                               log);
      }
      if (observer) observer(epoch, batch, weighted);

      const Gradients g = Backward(model, x, labels, weighted.weights, smoothing);
      model.w1 -= spec.learning_rate * g.w1;
      model.b1 -= spec.learning_rate * g.b1;
      model.w2 -= spec.learning_rate * g.w2;
      model.b2 -= spec.learning_rate * g.b2;

      weighted_sum += weighted.value * static_cast<double>(idx.size());
      decayed += weighted.top_k_size;
    }

    TrainRow row;
    row.epoch = epoch;
    FillAccuracies(data, Predict(model, data.features), row);
    row.loss = weighted_sum / static_cast<double>(n);
    row.alpha = alpha;
    row.topk_size = decayed;
    if (!std::isfinite(row.loss) || !model.w1.allFinite() || !model.w2.allFinite()) {
      log.diverged = true;
      throw TrainingDiverged("non-finite state at epoch " + std::to_string(epoch),
                             log);
    }
    log.rows.push_back(row);

    if (spec.el_source == ElSource::kAuto && !el) {
      acc_series.Append(epoch, row.acc);
      if (static_cast<int>(acc_series.size()) >= spec.el_params.EffectiveMinEpochs()) {
        const auto report = dynamics::DetectEl(acc_series, spec.el_params);
        if (report.el) {
          el = report.el;
          log.el = el;
          log.el_detected = true;
        }
      }
    }
  }
  log.el_missing = spec.el_source == ElSource::kAuto && !el;
  return log;
}

// ---------------------------------------------------------------------------

namespace {

struct Cell {
  double noise_ratio;
  LossMode mode;
  std::optional<double> k_fraction;
  std::optional<int> el_offset;
};

void FillSummary(const TrainLog& log, SweepRow& row) {
  row.el = log.el;
  double best = -1.0;
  for (const auto& r : log.rows) {
    if (r.clean_acc > best) {
      best = r.clean_acc;
      row.best_epoch = r.epoch;
    }
  }
  row.best_clean_acc = best;
  const TrainRow& last = log.rows.back();
  row.final_clean_acc = last.clean_acc;
  row.final_acc = last.acc;
  row.final_corrupted_fit = last.corrupted_fit;
}

SweepRow MeanRow(const Cell& cell, std::span<const SweepRow> runs) {
  SweepRow mean;
  mean.noise_ratio = cell.noise_ratio;
  mean.loss_mode = cell.mode;
  mean.k_fraction = cell.k_fraction;
  mean.el_offset = cell.el_offset;
  std::size_t ok = 0;
  double best_epoch = 0.0;
  for (const auto& r : runs) {
    if (r.status != "ok") continue;
    ++ok;
    best_epoch += r.best_epoch;
    mean.best_clean_acc += r.best_clean_acc;
    mean.final_clean_acc += r.final_clean_acc;
    mean.final_acc += r.final_acc;
    mean.final_corrupted_fit += r.final_corrupted_fit;
  }
  if (ok == 0) {
    mean.status = "no_successful_seeds";
    return mean;
  }
  const double k = static_cast<double>(ok);
  mean.best_epoch = static_cast<int>(std::lround(best_epoch / k));
  mean.best_clean_acc /= k;
  mean.final_clean_acc /= k;
  mean.final_acc /= k;
  mean.final_corrupted_fit /= k;
  return mean;
}

}  // namespace

std::vector<SweepRow> Sweep(const DatasetSpec& data_spec,
                            const TrainSpec& train_spec, const SweepGrid& grid,
                            std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sweep needs at least one seed");
  }
  const std::vector<double> ratios =
      grid.noise_ratio.empty() ? std::vector<double>{data_spec.noise_ratio}
                               : grid.noise_ratio;
  const std::vector<LossMode> modes =
      grid.loss_mode.empty() ? std::vector<LossMode>{train_spec.loss_mode}
                             : grid.loss_mode;
  const std::vector<double> ks =
      grid.k_fraction.empty() ? std::vector<double>{train_spec.dld.k_fraction}
                              : grid.k_fraction;

  std::vector<Cell> cells;
  for (double ratio : ratios) {
    for (LossMode mode : modes) {
      if (mode != LossMode::kDld) {
        cells.push_back({ratio, mode, std::nullopt, std::nullopt});
        continue;
      }
      for (double k : ks) {
        if (grid.el_offset.empty()) {
          cells.push_back({ratio, mode, k, std::nullopt});
        } else {
          for (int off : grid.el_offset) cells.push_back({ratio, mode, k, off});
        }
      }
    }
  }

  std::map<std::pair<double, std::uint64_t>, SyntheticDataset> datasets;
  auto dataset_for = [&](double ratio, std::uint64_t seed) -> const SyntheticDataset& {
    auto it = datasets.find({ratio, seed});
    if (it == datasets.end()) {
      DatasetSpec ds = data_spec;
      ds.noise_ratio = ratio;
      ds.seed = seed;
      it = datasets.emplace(std::make_pair(ratio, seed), GenerateDataset(ds)).first;
    }
    return it->second;
  };
  // Base EL per (ratio, seed) for offset cells.
  std::map<std::pair<double, std::uint64_t>, std::optional<int>> base_el;
  auto base_el_for = [&](double ratio, std::uint64_t seed) -> std::optional<int> {
    if (train_spec.el_source == ElSource::kFixed) return train_spec.dld.el;
    auto it = base_el.find({ratio, seed});
    if (it == base_el.end()) {
      TrainSpec probe = train_spec;
      probe.loss_mode = LossMode::kBaseline;
      probe.seed = seed;
      probe.el_source = ElSource::kAuto;
      it = base_el.emplace(std::make_pair(ratio, seed),
                           Train(dataset_for(ratio, seed), probe).el)
               .first;
    }
    return it->second;
  };

  std::vector<SweepRow> rows;
  for (const Cell& cell : cells) {
    std::vector<SweepRow> runs;
    for (std::uint64_t seed : seeds) {
      SweepRow row;
      row.noise_ratio = cell.noise_ratio;
      row.loss_mode = cell.mode;
      row.k_fraction = cell.k_fraction;
      row.el_offset = cell.el_offset;
      row.seed = seed;
      try {
        TrainSpec ts = train_spec;
        ts.seed = seed;
        ts.loss_mode = cell.mode;
        if (cell.k_fraction) ts.dld.k_fraction = *cell.k_fraction;
        if (cell.el_offset) {
          const auto base = base_el_for(cell.noise_ratio, seed);
          if (!base) {
            row.status = "el_not_detected";
            runs.push_back(row);
            continue;
          }
          ts.el_source = ElSource::kFixed;
          ts.dld.el = std::max(1, *base + *cell.el_offset);
        }
        const TrainLog log = Train(dataset_for(cell.noise_ratio, seed), ts);
        FillSummary(log, row);
        if (cell.mode == LossMode::kDld && log.el_missing) {
          row.status = "el_not_detected";
        }
      } catch (const Error& e) {
        row.status = std::string("error:") + ErrorCodeName(e.code());
      }
      runs.push_back(row);
    }
    rows.insert(rows.end(), runs.begin(), runs.end());
    rows.push_back(MeanRow(cell, runs));
  }
  return rows;
}

std::string SweepCsv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "noise_ratio,loss,k_fraction,el_offset,seed,el,best_epoch,"
         "best_clean_acc,final_clean_acc,final_acc,final_corrupted_fit,status\n";
  for (const auto& r : rows) {
    out << text::FormatReal(r.noise_ratio) << ',' << LossModeName(r.loss_mode)
        << ',' << (r.k_fraction ? text::FormatReal(*r.k_fraction) : "") << ','
        << (r.el_offset ? std::to_string(*r.el_offset) : "") << ','
        << (r.seed ? std::to_string(*r.seed) : "mean") << ','
        << (r.el ? std::to_string(*r.el) : "") << ',' << r.best_epoch << ','
        << text::FormatReal(r.best_clean_acc) << ','
        << text::FormatReal(r.final_clean_acc) << ','
        << text::FormatReal(r.final_acc) << ','
        << text::FormatReal(r.final_corrupted_fit) << ',' << r.status << '\n';
  }
  return out.str();
}

std::string ElOffsetTable(std::span<const SweepRow> rows) {
  std::vector<int> offsets;
  std::vector<std::pair<double, double>> columns;  // (ratio, k)
  std::map<std::tuple<int, double, double>, double> value;
  for (const auto& r : rows) {
    if (r.seed || r.loss_mode != LossMode::kDld || !r.el_offset) continue;
    const double k = r.k_fraction.value_or(0.0);
    if (std::find(offsets.begin(), offsets.end(), *r.el_offset) == offsets.end()) {
      offsets.push_back(*r.el_offset);
    }
    if (std::find(columns.begin(), columns.end(), std::make_pair(r.noise_ratio, k)) ==
        columns.end()) {
      columns.emplace_back(r.noise_ratio, k);
    }
    value[{*r.el_offset, r.noise_ratio, k}] = r.best_clean_acc;
  }
  std::set<double> distinct_k;
  for (const auto& c : columns) distinct_k.insert(c.second);

  std::ostringstream out;
  out << "el";
  for (const auto& [ratio, k] : columns) {
    out << ',' << PercentLabel(ratio) << '%';
    if (distinct_k.size() > 1) out << "-top" << PercentLabel(k) << '%';
  }
  out << '\n';
  for (int off : offsets) {
    out << "EL";
    if (off > 0) out << '+' << off;
    if (off < 0) out << off;
    for (const auto& [ratio, k] : columns) {
      const auto it = value.find({off, ratio, k});
      out << ',' << (it == value.end() ? "" : text::FormatReal(it->second));
    }
    out << '\n';
  }
  return out.str();
}

std::string TopKTable(std::span<const SweepRow> rows) {
  std::vector<double> ratios;
  std::vector<double> ks;
  bool has_baseline = false;
  std::map<double, double> baseline;
  std::map<std::pair<double, double>, double> value;
  for (const auto& r : rows) {
    if (r.seed) continue;
    if (std::find(ratios.begin(), ratios.end(), r.noise_ratio) == ratios.end()) {
      ratios.push_back(r.noise_ratio);
    }
    if (r.loss_mode == LossMode::kBaseline) {
      has_baseline = true;
      baseline[r.noise_ratio] = r.best_clean_acc;
    } else if (r.loss_mode == LossMode::kDld && r.k_fraction &&
               r.el_offset.value_or(0) == 0) {
      if (std::find(ks.begin(), ks.end(), *r.k_fraction) == ks.end()) {
        ks.push_back(*r.k_fraction);
      }
      value[{r.noise_ratio, *r.k_fraction}] = r.best_clean_acc;
    }
  }
  std::ostringstream out;
  out << "noise";
  if (has_baseline) out << ",baseline";
  for (double k : ks) out << ",top-" << PercentLabel(k) << '%';
  out << '\n';
  for (double ratio : ratios) {
    out << PercentLabel(ratio) << '%';
    if (has_baseline) {
      const auto it = baseline.find(ratio);
      out << ',' << (it == baseline.end() ? "" : text::FormatReal(it->second));
    }
    for (double k : ks) {
      const auto it = value.find({ratio, k});
      out << ',' << (it == value.end() ? "" : text::FormatReal(it->second));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace dldkit::trainer
