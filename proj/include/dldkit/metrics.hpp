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

#ifndef DLDKIT_METRICS_HPP_
#define DLDKIT_METRICS_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dldkit/annotations.hpp"
#include "dldkit/geometry.hpp"

namespace dldkit::metrics {

struct Detection {
  geometry::Quad corners;
  std::string category;
  double score = 0.0;
};

struct ImageDetections {
  std::string image_id;
  std::vector<Detection> detections;
};

// Detection file: one per image, lines "x1 y1 ... x4 y4 category score".
// The directory loader skips kNoiseRecordFileName.
ImageDetections ParseDetections(std::string_view text, std::string image_id);
std::string WriteDetections(const ImageDetections& detections);
std::vector<ImageDetections> LoadDetectionDirectory(
    const std::filesystem::path& dir);

enum class ApMode { kVoc07ElevenPoint, kAllPoint };

struct EvalConfig {
  double iou_threshold = 0.5;
  ApMode ap_mode = ApMode::kVoc07ElevenPoint;
  // Difficulty-1 GT are left out of AP denominators, and detections matched
  // to them are neither TP nor FP.
  bool ignore_difficult = true;

  // Throws kInvalidArgument unless 0 < iou_threshold < 1.
  void Validate() const;
};

enum class MatchFlag { kTruePositive, kFalsePositive, kIgnored };

// Greedy matching within one image and one class. Detections are visited in
// descending score (ties by input position); each takes the still-unmatched
// GT with the highest IoU >= threshold. Flags come back in input order.
std::vector<MatchFlag> MatchDetections(std::span<const Detection> detections,
                                       std::span<const annotations::Instance> gts,
                                       const EvalConfig& cfg);

// AP of flags already sorted by descending score. kIgnored entries are
// skipped. Returns 0 when num_gt == 0.
double AveragePrecision(std::span<const MatchFlag> ranked, std::size_t num_gt,
                        ApMode mode);

struct ClassStats {
  double ap = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t num_gt = 0;
};

struct EvalReport {
  std::map<std::string, ClassStats> per_class;
  double map = 0.0;
  // True when no class had a counted GT; map is then 0 by convention.
  bool empty_reference = false;
  std::optional<double> acc;
  std::optional<double> map_correct;
  std::optional<double> map_incorrect;
  bool correct_subset_empty = false;
  bool incorrect_subset_empty = false;

  // {"map": ..., "acc": ..., "per_class": {...}} as JSON text.
  std::string ToText() const;
  // "class,ap,tp,fp,gt" header plus one row per class.
  std::string ToCsv() const;
};

// Collects per-class scored flags image by image. Merging accumulators built
// over disjoint shards yields the same report as a single pass: the final
// ranking is keyed on (score desc, image id, position) and AP is computed once
// in Finalize.
class ApAccumulator {
 public:
  explicit ApAccumulator(EvalConfig cfg);

  // Throws kUnknownCategory when `vocabulary` is non-empty and a detection's
  // category is not in it.
  // A detection left unmatched that overlaps one of `ignore_regions` at the
  // IoU threshold (any class) is marked kIgnored instead of kFalsePositive.
  void AddImage(const std::string& image_id,
                std::span<const Detection> detections,
                std::span<const annotations::Instance> gts,
                std::span<const std::string> vocabulary = {},
                std::span<const geometry::Quad> ignore_regions = {});
  void Merge(const ApAccumulator& other);

  // Classes in `vocabulary` with no counted GT get AP 0 and are excluded from
  // the mean, as are classes only seen in detections.
  EvalReport Finalize() const;

 private:
  struct Scored {
    double score;
    std::string image_id;
    std::size_t position;
    MatchFlag flag;
  };
  struct ClassAccum {
    std::vector<Scored> ranked;
    std::size_t num_gt = 0;
  };

  EvalConfig cfg_;
  std::map<std::string, ClassAccum> classes_;
};

// Per-class AP over the dataset and their unweighted mean. Detections for an
// image id absent from `gts` throw kIdMismatch; GT images with no entry in
// `dets` count as having no detections. An empty vocabulary means "categories
// present in gts".
EvalReport MeanAp(std::span<const ImageDetections> dets,
                  const annotations::Dataset& gts, const EvalConfig& cfg,
                  std::span<const std::string> vocabulary = {});

// Class-agnostic one-to-one matching (each GT paired with the highest-scoring
// detection at IoU >= threshold), then the fraction of all GT whose matched
// detection carries the GT's category. Unmatched GT count as disagreements.
// Difficulty is not consulted.
double AccAgainstLabels(std::span<const ImageDetections> dets,
                        const annotations::Dataset& gts, const EvalConfig& cfg);

enum class Subset { kCorrect, kIncorrect };

struct SubsetMap {
  double map = 0.0;
  bool empty = false;  // the chosen partition had no counted GT
};

// mAP against the GT of one partition of the record. The incorrect partition
// is scored against the corrupted labels named in the record. Detections are
// not filtered. Throws kRecordMismatch for dangling record entries.
SubsetMap SubsetMeanAp(std::span<const ImageDetections> dets,
                       const annotations::Dataset& gts,
                       const annotations::NoiseRecord& record, Subset which,
                       const EvalConfig& cfg);

// The full report: mAP and per-class stats, ACC, and with a record the two
// subset mAPs. Requires the detection and GT image id sets to be identical
// (kIdMismatch lists the differences).
EvalReport Evaluate(std::span<const ImageDetections> dets,
                    const annotations::Dataset& gts,
                    const annotations::NoiseRecord* record,
                    const EvalConfig& cfg);

}  // namespace dldkit::metrics

#endif  // DLDKIT_METRICS_HPP_
