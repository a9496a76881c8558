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

#ifndef DLDKIT_EXPERIMENT_HPP_
#define DLDKIT_EXPERIMENT_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "dldkit/trainer.hpp"

namespace dldkit::experiment {

// Flat "key = value" text; '#' starts a comment. Duplicate keys and lines
// without '=' are rejected with kConfig naming the line.
std::map<std::string, std::string> ParseKeyValues(std::string_view text);

struct Experiment {
  trainer::DatasetSpec data;
  trainer::TrainSpec train;
  trainer::SweepGrid grid;
  std::uint64_t seed = 0;
  int seeds = 1;
  std::optional<std::string> output;
  std::optional<std::string> plot;
};

// Keys: seed, classes, dim, samples, separation, noise_ratio, hidden,
// learning_rate, batch_size, epochs, loss (baseline|ls|dld), ls_epsilon,
// k_fraction, schedule (exp_decay|paper_literal), tau, selection_scope
// (per_batch|per_epoch), el_source (fixed|auto), el, eta, degree,
// min_epochs, output, plot. With `allow_grid`, also seeds and the
// comma-separated lists grid_noise_ratio, grid_loss, grid_k_fraction,
// grid_el_offset. Unknown keys throw kConfig.
Experiment ParseExperiment(std::string_view text, bool allow_grid);

// Throws kConfig when an output path's parent directory does not exist.
void ValidateOutputPath(const std::string& path);

// Train spec and dataset spec tied to the experiment's seed.
trainer::TrainLog RunExperiment(const Experiment& experiment);

}  // namespace dldkit::experiment

#endif  // DLDKIT_EXPERIMENT_HPP_
