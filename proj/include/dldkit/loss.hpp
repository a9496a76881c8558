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

#ifndef DLDKIT_LOSS_HPP_
#define DLDKIT_LOSS_HPP_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace dldkit::loss {

// Probabilities are floored here before taking logs.
inline constexpr double kProbabilityFloor = 1e-12;

// C >= 2 probabilities in [0, 1] summing to 1 within 1e-9.
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> values() const { return probs_; }

 private:
  std::vector<double> probs_;
};

// -log p[label], with p floored at kProbabilityFloor.
double CrossEntropy(const ProbVector& p, std::size_t label);

// Cross-entropy against (1 - epsilon) * onehot + epsilon / C.
double LabelSmoothingLoss(const ProbVector& p, std::size_t label,
                          double epsilon);

// Per-sample losses of one batch (or one epoch for per-epoch selection).
struct LossBatch {
  std::vector<double> losses;
  std::vector<std::size_t> indices;  // sample ids, used for tie-breaking

  std::size_t size() const { return losses.size(); }
  // Throws kInvalidArgument on length mismatch, negative or non-finite loss.
  void Validate() const;
};

// Positions into a LossBatch.
struct TopKSplit {
  std::vector<std::size_t> top_k;  // ascending positions
  std::vector<std::size_t> rest;   // ascending positions
};

// ceil(k_fraction * N), tolerant of representation error; 0 when
// k_fraction == 0.
std::size_t TopKCount(double k_fraction, std::size_t n);

// The TopKCount largest losses; equal losses are ranked by ascending sample
// index.
TopKSplit SelectTopK(const LossBatch& batch, double k_fraction);

enum class Schedule {
  // exp(-(ec - el) / tau): 1 at ec == el, decaying towards 0.
  kExpDecay,
  // exp(10 / (ec - el)) as printed: singular at ec == el and > 1 afterwards.
  kPaperLiteral,
};

enum class SelectionScope { kPerBatch, kPerEpoch };

Schedule ParseSchedule(std::string_view name);
std::string_view ScheduleName(Schedule s);
SelectionScope ParseSelectionScope(std::string_view name);
std::string_view SelectionScopeName(SelectionScope s);

struct DldConfig {
  double k_fraction = 0.05;
  int el = 1;
  Schedule schedule = Schedule::kExpDecay;
  double tau = 10.0;
  SelectionScope selection_scope = SelectionScope::kPerBatch;

  void Validate() const;
};

// Decay factor at epoch `ec` (ec >= el). Throws kScheduleSingular for the
// literal schedule at ec == el.
double Alpha(int ec, int el, Schedule schedule, double tau);

// Whether the decayed branch applies at `ec`. The literal schedule starts one
// epoch late because it is undefined at ec == el.
bool DecayActive(int ec, const DldConfig& cfg);

struct WeightedLoss {
  double value = 0.0;
  std::vector<double> weights;  // per batch position
  double alpha = 1.0;
  std::size_t top_k_size = 0;
};

// sum_i losses[i] / N, accumulated in position order.
double MeanLoss(std::span<const double> losses);

// sum_i w_i l_i / N, accumulated in position order.
double WeightedMean(std::span<const double> losses,
                    std::span<const double> weights);

// Applies `alpha` to the given positions and 1 elsewhere.
WeightedLoss ApplyDecay(const LossBatch& batch,
                        std::span<const std::size_t> top_k_positions,
                        double alpha);

// Two-phase objective: the plain mean before EL; from EL on the top-K losses
// are scaled by Alpha() and everything is divided by the full batch size.
WeightedLoss DldLoss(const LossBatch& batch, int ec, const DldConfig& cfg);

}  // namespace dldkit::loss

#endif  // DLDKIT_LOSS_HPP_
