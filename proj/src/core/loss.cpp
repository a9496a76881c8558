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

#include "dldkit/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dldkit/error.hpp"
#include "dldkit/text.hpp"

namespace dldkit::loss {

ProbVector::ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "a probability vector needs at least 2 classes");
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "probability outside [0, 1]: " + text::FormatReal(p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "probabilities sum to " + text::FormatReal(sum));
  }
}

double CrossEntropy(const ProbVector& p, std::size_t label) {
  if (label >= p.size()) {
    throw Error(ErrorCode::kInvalidArgument, "label out of range");
  }
  return -std::log(std::max(p[label], kProbabilityFloor));
}

double LabelSmoothingLoss(const ProbVector& p, std::size_t label,
                          double epsilon) {
  if (label >= p.size()) {
    throw Error(ErrorCode::kInvalidArgument, "label out of range");
  }
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "label smoothing epsilon must lie in [0, 1)");
  }
  const double c = static_cast<double>(p.size());
  double loss = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double target = (k == label ? 1.0 - epsilon : 0.0) + epsilon / c;
    if (target == 0.0) continue;
    loss -= target * std::log(std::max(p[k], kProbabilityFloor));
  }
  return loss;
}

void LossBatch::Validate() const {
  if (losses.size() != indices.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "loss and index arrays differ in length");
  }
  for (double l : losses) {
    if (!std::isfinite(l) || l < 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "per-sample loss must be finite and non-negative, got " +
                      text::FormatReal(l));
    }
  }
}

std::size_t TopKCount(double k_fraction, std::size_t n) {
  if (!(k_fraction >= 0.0 && k_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "k_fraction must lie in [0, 1]");
  }
  if (k_fraction == 0.0 || n == 0) return 0;
  const double exact = k_fraction * static_cast<double>(n);
  const auto count =
      static_cast<std::size_t>(std::ceil(exact - 1e-9 * (1.0 + exact)));
  return std::clamp<std::size_t>(count, 1, n);
}

TopKSplit SelectTopK(const LossBatch& batch, double k_fraction) {
  batch.Validate();
  const std::size_t n = batch.size();
  const std::size_t k = TopKCount(k_fraction, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (batch.losses[a] != batch.losses[b]) {
      return batch.losses[a] > batch.losses[b];
    }
    if (batch.indices[a] != batch.indices[b]) {
      return batch.indices[a] < batch.indices[b];
    }
    return a < b;
  });
  TopKSplit split;
  split.top_k.assign(order.begin(), order.begin() + static_cast<long>(k));
  split.rest.assign(order.begin() + static_cast<long>(k), order.end());
  std::sort(split.top_k.begin(), split.top_k.end());
  std::sort(split.rest.begin(), split.rest.end());
  return split;
}

Schedule ParseSchedule(std::string_view name) {
  if (name == "exp_decay") return Schedule::kExpDecay;
  if (name == "paper_literal") return Schedule::kPaperLiteral;
  throw Error(ErrorCode::kConfig, "unknown schedule '" + std::string(name) +
                                      "' (expected exp_decay|paper_literal)");
}

std::string_view ScheduleName(Schedule s) {
  return s == Schedule::kExpDecay ? "exp_decay" : "paper_literal";
}

SelectionScope ParseSelectionScope(std::string_view name) {
  if (name == "per_batch") return SelectionScope::kPerBatch;
  if (name == "per_epoch") return SelectionScope::kPerEpoch;
  throw Error(ErrorCode::kConfig, "unknown selection scope '" +
                                      std::string(name) +
                                      "' (expected per_batch|per_epoch)");
}

std::string_view SelectionScopeName(SelectionScope s) {
  return s == SelectionScope::kPerBatch ? "per_batch" : "per_epoch";
}

void DldConfig::Validate() const {
  if (!(k_fraction >= 0.0 && k_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "k_fraction must lie in [0, 1]");
  }
  if (el < 1) throw Error(ErrorCode::kInvalidArgument, "el must be >= 1");
  if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau must be > 0");
}

double Alpha(int ec, int el, Schedule schedule, double tau) {
  if (ec < el) {
    throw Error(ErrorCode::kInvalidArgument,
                "decay factor is defined for ec >= el (ec=" +
                    std::to_string(ec) + ", el=" + std::to_string(el) + ")");
  }
  const double gap = static_cast<double>(ec - el);
  switch (schedule) {
    case Schedule::kExpDecay:
      if (!(tau > 0.0)) {
        throw Error(ErrorCode::kInvalidArgument, "tau must be > 0");
      }
      return std::exp(-gap / tau);
    case Schedule::kPaperLiteral:
      if (ec == el) {
        throw Error(ErrorCode::kScheduleSingular,
                    "exp(10 / (ec - el)) is undefined at ec == el == " +
                        std::to_string(el) + "; start the decay at el + 1");
      }
      return std::exp(10.0 / gap);
  }
  return 1.0;
}

bool DecayActive(int ec, const DldConfig& cfg) {
  if (cfg.schedule == Schedule::kPaperLiteral) return ec > cfg.el;
  return ec >= cfg.el;
}

double MeanLoss(std::span<const double> losses) {
  if (losses.empty()) return 0.0;
  double sum = 0.0;
  for (double l : losses) sum += l;
  return sum / static_cast<double>(losses.size());
}

double WeightedMean(std::span<const double> losses,
                    std::span<const double> weights) {
  if (losses.size() != weights.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "loss and weight arrays differ in length");
  }
  if (losses.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) sum += weights[i] * losses[i];
  return sum / static_cast<double>(losses.size());
}

WeightedLoss ApplyDecay(const LossBatch& batch,
                        std::span<const std::size_t> top_k_positions,
                        double alpha) {
  WeightedLoss out;
  out.weights.assign(batch.size(), 1.0);
  for (std::size_t pos : top_k_positions) {
    if (pos >= batch.size()) {
      throw Error(ErrorCode::kInvalidArgument, "top-k position out of range");
    }
    out.weights[pos] = alpha;
  }
  out.alpha = alpha;
  out.top_k_size = top_k_positions.size();
  out.value = WeightedMean(batch.losses, out.weights);
  return out;
}

WeightedLoss DldLoss(const LossBatch& batch, int ec, const DldConfig& cfg) {
  batch.Validate();
  cfg.Validate();
  if (ec < 1) throw Error(ErrorCode::kInvalidArgument, "ec must be >= 1");
  if (ec < cfg.el) return ApplyDecay(batch, {}, 1.0);
  const double a = Alpha(ec, cfg.el, cfg.schedule, cfg.tau);
  const TopKSplit split = SelectTopK(batch, cfg.k_fraction);
  return ApplyDecay(batch, split.top_k, a);
}

}  // namespace dldkit::loss
