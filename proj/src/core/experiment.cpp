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

#include "dldkit/experiment.hpp"

#include <filesystem>
#include <functional>
#include <set>

#include "dldkit/error.hpp"
#include "dldkit/text.hpp"

namespace dldkit::experiment {

namespace {

[[noreturn]] void ConfigError(const std::string& what) {
  throw Error(ErrorCode::kConfig, what);
}

double RealValue(const std::string& key, const std::string& value) {
  const auto v = text::ParseReal(value);
  if (!v) ConfigError("'" + key + "' expects a number, got '" + value + "'");
  return *v;
}

long long IntValue(const std::string& key, const std::string& value) {
  const auto v = text::ParseInt(value);
  if (!v) ConfigError("'" + key + "' expects an integer, got '" + value + "'");
  return *v;
}

int SmallInt(const std::string& key, const std::string& value) {
  const long long v = IntValue(key, value);
  if (v < -1'000'000'000 || v > 1'000'000'000) {
    ConfigError("'" + key + "' is out of range");
  }
  return static_cast<int>(v);
}

template <typename T, typename Fn>
std::vector<T> ListValue(const std::string& key, const std::string& value,
                         Fn&& parse) {
  std::vector<T> out;
  for (auto item : text::Split(value, ',')) {
    const auto trimmed = std::string(text::Trim(item));
    if (trimmed.empty()) ConfigError("'" + key + "' has an empty list item");
    out.push_back(parse(key, trimmed));
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> ParseKeyValues(std::string_view content) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  for (std::string_view raw : text::Split(content, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = text::Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      ConfigError("config line " + std::to_string(line_no) +
                  ": expected key=value");
    }
    const std::string key(text::Trim(line.substr(0, eq)));
    const std::string value(text::Trim(line.substr(eq + 1)));
    if (key.empty()) {
      ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    if (!out.emplace(key, value).second) {
      ConfigError("config line " + std::to_string(line_no) +
                  ": duplicate key '" + key + "'");
    }
  }
  return out;
}

Experiment ParseExperiment(std::string_view content, bool allow_grid) {
  using Setter = std::function<void(Experiment&, const std::string&, const std::string&)>;
  const std::map<std::string, Setter> common = {
      {"seed", [](Experiment& e, const std::string& k, const std::string& v) {
         const long long s = IntValue(k, v);
         if (s < 0) ConfigError("'seed' must be non-negative");
         e.seed = static_cast<std::uint64_t>(s);
       }},
      {"classes", [](Experiment& e, const std::string& k, const std::string& v) { e.data.classes = SmallInt(k, v); }},
      {"dim", [](Experiment& e, const std::string& k, const std::string& v) { e.data.dim = SmallInt(k, v); }},
      {"samples", [](Experiment& e, const std::string& k, const std::string& v) { e.data.samples = SmallInt(k, v); }},
      {"separation", [](Experiment& e, const std::string& k, const std::string& v) { e.data.separation = RealValue(k, v); }},
      {"noise_ratio", [](Experiment& e, const std::string& k, const std::string& v) { e.data.noise_ratio = RealValue(k, v); }},
      {"hidden", [](Experiment& e, const std::string& k, const std::string& v) { e.train.hidden = SmallInt(k, v); }},
      {"learning_rate", [](Experiment& e, const std::string& k, const std::string& v) { e.train.learning_rate = RealValue(k, v); }},
      {"batch_size", [](Experiment& e, const std::string& k, const std::string& v) { e.train.batch_size = SmallInt(k, v); }},
      {"epochs", [](Experiment& e, const std::string& k, const std::string& v) { e.train.epochs = SmallInt(k, v); }},
      {"loss", [](Experiment& e, const std::string&, const std::string& v) { e.train.loss_mode = trainer::ParseLossMode(v); }},
      {"ls_epsilon", [](Experiment& e, const std::string& k, const std::string& v) { e.train.ls_epsilon = RealValue(k, v); }},
      {"k_fraction", [](Experiment& e, const std::string& k, const std::string& v) { e.train.dld.k_fraction = RealValue(k, v); }},
      {"schedule", [](Experiment& e, const std::string&, const std::string& v) { e.train.dld.schedule = loss::ParseSchedule(v); }},
      {"tau", [](Experiment& e, const std::string& k, const std::string& v) { e.train.dld.tau = RealValue(k, v); }},
      {"selection_scope", [](Experiment& e, const std::string&, const std::string& v) { e.train.dld.selection_scope = loss::ParseSelectionScope(v); }},
      {"el_source", [](Experiment& e, const std::string&, const std::string& v) {
         if (v == "fixed") e.train.el_source = trainer::ElSource::kFixed;
         else if (v == "auto") e.train.el_source = trainer::ElSource::kAuto;
         else ConfigError("'el_source' must be fixed or auto, got '" + v + "'");
       }},
      {"el", [](Experiment& e, const std::string& k, const std::string& v) { e.train.dld.el = SmallInt(k, v); }},
      {"eta", [](Experiment& e, const std::string& k, const std::string& v) { e.train.el_params.eta = RealValue(k, v); }},
      {"degree", [](Experiment& e, const std::string& k, const std::string& v) { e.train.el_params.degree = SmallInt(k, v); }},
      {"el_scan", [](Experiment& e, const std::string&, const std::string& v) { e.train.el_params.scan = dynamics::ParseElScan(v); }},
      {"min_epochs", [](Experiment& e, const std::string& k, const std::string& v) { e.train.el_params.min_epochs = SmallInt(k, v); }},
      {"output", [](Experiment& e, const std::string&, const std::string& v) { e.output = v; }},
      {"plot", [](Experiment& e, const std::string&, const std::string& v) { e.plot = v; }},
  };
  const std::map<std::string, Setter> grid = {
      {"seeds", [](Experiment& e, const std::string& k, const std::string& v) {
         e.seeds = SmallInt(k, v);
         if (e.seeds < 1) ConfigError("'seeds' must be >= 1");
       }},
      {"grid_noise_ratio", [](Experiment& e, const std::string& k, const std::string& v) {
         e.grid.noise_ratio = ListValue<double>(k, v, RealValue);
       }},
      {"grid_k_fraction", [](Experiment& e, const std::string& k, const std::string& v) {
         e.grid.k_fraction = ListValue<double>(k, v, RealValue);
       }},
      {"grid_el_offset", [](Experiment& e, const std::string& k, const std::string& v) {
         e.grid.el_offset = ListValue<int>(k, v, SmallInt);
       }},
      {"grid_loss", [](Experiment& e, const std::string& k, const std::string& v) {
         e.grid.loss_mode = ListValue<trainer::LossMode>(
             k, v, [](const std::string&, const std::string& item) {
               return trainer::ParseLossMode(item);
             });
       }},
  };

  Experiment exp;
  for (const auto& [key, value] : ParseKeyValues(content)) {
    if (const auto it = common.find(key); it != common.end()) {
      it->second(exp, key, value);
    } else if (const auto git = grid.find(key); allow_grid && git != grid.end()) {
      git->second(exp, key, value);
    } else {
      ConfigError("unknown config key '" + key + "'");
    }
  }
  exp.data.seed = exp.seed;
  exp.train.seed = exp.seed;
  try {
    exp.data.Validate();
    exp.train.Validate();
    if (exp.train.el_params.degree < 0 || !(exp.train.el_params.eta > 0.0)) {
      ConfigError("eta must be > 0 and degree >= 0");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    ConfigError(e.what());
  }
  if (exp.output) ValidateOutputPath(*exp.output);
  if (exp.plot) ValidateOutputPath(*exp.plot);
  return exp;
}

void ValidateOutputPath(const std::string& path) {
  namespace fs = std::filesystem;
  if (path.empty()) ConfigError("empty output path");
  const fs::path parent = fs::absolute(fs::path(path)).parent_path();
  std::error_code ec;
  if (!fs::is_directory(parent, ec)) {
    ConfigError("output directory does not exist: " + parent.string());
  }
}

trainer::TrainLog RunExperiment(const Experiment& experiment) {
  const auto data = trainer::GenerateDataset(experiment.data);
  return trainer::Train(data, experiment.train);
}

}  // namespace dldkit::experiment
