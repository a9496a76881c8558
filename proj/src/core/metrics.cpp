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

#include "dldkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dldkit/error.hpp"
#include "dldkit/text.hpp"

namespace dldkit::metrics {

namespace {

using annotations::Dataset;
using annotations::Instance;

// Positions of `scores` in descending score order, ties by position.
std::vector<std::size_t> RankByScore(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });
  return order;
}

// Greedy one-to-one assignment shared by per-class matching and ACC. Returns
// for each detection the matched GT position, or -1.
std::vector<long> GreedyAssign(std::span<const Detection> dets,
                               std::span<const Instance> gts, double threshold) {
  std::vector<long> assigned(dets.size(), -1);
  std::vector<bool> taken(gts.size(), false);
  for (std::size_t d : RankByScore(dets)) {
    double best_iou = -1.0;
    long best = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double iou = geometry::QuadIou(dets[d].corners, gts[g].corners);
      if (iou >= threshold && iou > best_iou) {
        best_iou = iou;
        best = static_cast<long>(g);
      }
    }
    if (best >= 0) {
      taken[static_cast<std::size_t>(best)] = true;
      assigned[d] = best;
    }
  }
  return assigned;
}

const annotations::ImageAnnotations* FindImage(const Dataset& gts,
                                               const std::string& id) {
  const auto it = std::lower_bound(
      gts.begin(), gts.end(), id,
      [](const annotations::ImageAnnotations& a, const std::string& key) {
        return a.image_id < key;
      });
  if (it != gts.end() && it->image_id == id) return &*it;
  // Datasets built by hand may not be sorted.
  for (const auto& image : gts) {
    if (image.image_id == id) return &image;
  }
  return nullptr;
}

std::vector<std::string> MergedVocabulary(const Dataset& gts,
                                          std::span<const std::string> extra) {
  std::set<std::string> cats(extra.begin(), extra.end());
  for (const auto& image : gts) {
    for (const auto& inst : image.instances) cats.insert(inst.category);
  }
  return {cats.begin(), cats.end()};
}

}  // namespace

ImageDetections ParseDetections(std::string_view content, std::string image_id) {
  ImageDetections out;
  out.image_id = std::move(image_id);
  std::size_t line_no = 0;
  for (std::string_view line : text::Split(content, '\n')) {
    ++line_no;
    const auto tokens = text::SplitWhitespace(line);
    if (tokens.empty()) continue;
    auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::kMalformedLine, out.image_id + ": line " +
                                                 std::to_string(line_no) +
                                                 ": " + what);
    };
    if (tokens.size() != 10) {
      fail("expected 10 tokens, found " + std::to_string(tokens.size()));
    }
    Detection det;
    for (int i = 0; i < 4; ++i) {
      const auto x = text::ParseReal(tokens[2 * i]);
      const auto y = text::ParseReal(tokens[2 * i + 1]);
      if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y)) {
        fail("non-numeric coordinate");
      }
      det.corners[i] = {*x, *y};
    }
    det.corners = geometry::MakeCounterClockwise(det.corners);
    det.category = std::string(tokens[8]);
    const auto score = text::ParseReal(tokens[9]);
    if (!score || !std::isfinite(*score)) fail("score must be a finite number");
    det.score = *score;
    out.detections.push_back(std::move(det));
  }
  return out;
}

std::string WriteDetections(const ImageDetections& detections) {
  std::string out;
  for (const auto& det : detections.detections) {
    for (const auto& p : det.corners) {
      out += text::FormatReal(p.x) + ' ' + text::FormatReal(p.y) + ' ';
    }
    out += det.category + ' ' + text::FormatReal(det.score) + '\n';
  }
  return out;
}

std::vector<ImageDetections> LoadDetectionDirectory(
    const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIo, "not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt" &&
        entry.path().filename() != annotations::kNoiseRecordFileName) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<ImageDetections> out;
  for (const auto& f : files) {
    out.push_back(ParseDetections(text::ReadFile(f), f.stem().string()));
  }
  return out;
}

void EvalConfig::Validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "iou threshold must lie in (0, 1), got " +
                    text::FormatReal(iou_threshold));
  }
}

std::vector<MatchFlag> MatchDetections(std::span<const Detection> detections,
                                       std::span<const Instance> gts,
                                       const EvalConfig& cfg) {
  const auto assigned = GreedyAssign(detections, gts, cfg.iou_threshold);
  std::vector<MatchFlag> flags(detections.size(), MatchFlag::kFalsePositive);
  for (std::size_t d = 0; d < detections.size(); ++d) {
    if (assigned[d] < 0) continue;
    const Instance& gt = gts[static_cast<std::size_t>(assigned[d])];
    flags[d] = (cfg.ignore_difficult && gt.difficulty != 0)
                   ? MatchFlag::kIgnored
                   : MatchFlag::kTruePositive;
  }
  return flags;
}

double AveragePrecision(std::span<const MatchFlag> ranked, std::size_t num_gt,
                        ApMode mode) {
  if (num_gt == 0) return 0.0;
  std::vector<double> recall;
  std::vector<double> precision;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (MatchFlag f : ranked) {
    if (f == MatchFlag::kIgnored) continue;
    (f == MatchFlag::kTruePositive ? tp : fp) += 1;
    recall.push_back(static_cast<double>(tp) / static_cast<double>(num_gt));
    precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
  }

  if (mode == ApMode::kVoc07ElevenPoint) {
    double sum = 0.0;
    for (int i = 0; i <= 10; ++i) {
      const double t = i / 10.0;
      double best = 0.0;
      for (std::size_t k = 0; k < recall.size(); ++k) {
        if (recall[k] >= t) best = std::max(best, precision[k]);
      }
      sum += best;
    }
    return sum / 11.0;
  }

  // All-point: area under the monotone precision envelope.
  std::vector<double> mrec{0.0};
  std::vector<double> mpre{0.0};
  mrec.insert(mrec.end(), recall.begin(), recall.end());
  mpre.insert(mpre.end(), precision.begin(), precision.end());
  mrec.push_back(1.0);
  mpre.push_back(0.0);
  for (std::size_t i = mpre.size() - 1; i > 0; --i) {
    mpre[i - 1] = std::max(mpre[i - 1], mpre[i]);
  }
  double ap = 0.0;
  for (std::size_t i = 1; i < mrec.size(); ++i) {
    if (mrec[i] != mrec[i - 1]) ap += (mrec[i] - mrec[i - 1]) * mpre[i];
  }
  return ap;
}

ApAccumulator::ApAccumulator(EvalConfig cfg) : cfg_(cfg) { cfg_.Validate(); }

void ApAccumulator::AddImage(const std::string& image_id,
                             std::span<const Detection> detections,
                             std::span<const Instance> gts,
                             std::span<const std::string> vocabulary,
                             std::span<const geometry::Quad> ignore_regions) {
  if (!vocabulary.empty()) {
    for (const auto& det : detections) {
      if (std::find(vocabulary.begin(), vocabulary.end(), det.category) ==
          vocabulary.end()) {
        throw Error(ErrorCode::kUnknownCategory,
                    image_id + ": detection category '" + det.category +
                        "' is not in the evaluation vocabulary");
      }
    }
    for (const auto& c : vocabulary) classes_[c];
  }

  std::map<std::string, std::vector<std::size_t>> det_by_class;
  std::map<std::string, std::vector<Instance>> gt_by_class;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    det_by_class[detections[i].category].push_back(i);
  }
  for (const auto& gt : gts) {
    gt_by_class[gt.category].push_back(gt);
    if (!(cfg_.ignore_difficult && gt.difficulty != 0)) {
      classes_[gt.category].num_gt += 1;
    } else {
      classes_[gt.category];
    }
  }

  for (const auto& [cls, positions] : det_by_class) {
    std::vector<Detection> subset;
    subset.reserve(positions.size());
    for (std::size_t p : positions) subset.push_back(detections[p]);
    const auto it = gt_by_class.find(cls);
    const std::span<const Instance> cls_gts =
        it == gt_by_class.end() ? std::span<const Instance>{}
                                : std::span<const Instance>(it->second);
    auto flags = MatchDetections(subset, cls_gts, cfg_);
    for (std::size_t k = 0; k < flags.size(); ++k) {
      if (flags[k] != MatchFlag::kFalsePositive) continue;
      for (const auto& region : ignore_regions) {
        if (geometry::QuadIou(subset[k].corners, region) >= cfg_.iou_threshold) {
          flags[k] = MatchFlag::kIgnored;
          break;
        }
      }
    }
    auto& accum = classes_[cls];
    for (std::size_t k = 0; k < positions.size(); ++k) {
      accum.ranked.push_back(
          {subset[k].score, image_id, positions[k], flags[k]});
    }
  }
}

void ApAccumulator::Merge(const ApAccumulator& other) {
  for (const auto& [cls, accum] : other.classes_) {
    auto& mine = classes_[cls];
    mine.num_gt += accum.num_gt;
    mine.ranked.insert(mine.ranked.end(), accum.ranked.begin(),
                       accum.ranked.end());
  }
}

EvalReport ApAccumulator::Finalize() const {
  EvalReport report;
  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& [cls, accum] : classes_) {
    std::vector<Scored> ranked = accum.ranked;
    std::sort(ranked.begin(), ranked.end(), [](const Scored& a, const Scored& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.image_id != b.image_id) return a.image_id < b.image_id;
      return a.position < b.position;
    });
    std::vector<MatchFlag> flags;
    flags.reserve(ranked.size());
    ClassStats stats;
    for (const auto& s : ranked) {
      flags.push_back(s.flag);
      if (s.flag == MatchFlag::kTruePositive) ++stats.tp;
      if (s.flag == MatchFlag::kFalsePositive) ++stats.fp;
    }
    stats.num_gt = accum.num_gt;
    stats.ap = AveragePrecision(flags, accum.num_gt, cfg_.ap_mode);
    if (accum.num_gt > 0) {
      sum += stats.ap;
      ++counted;
    }
    report.per_class.emplace(cls, stats);
  }
  report.empty_reference = counted == 0;
  report.map = counted ? sum / static_cast<double>(counted) : 0.0;
  return report;
}

namespace {

// mean_ap where the instances of `ignore` (same image ids as `gts`, or null)
// act as don't-care regions.
EvalReport MeanApIgnoring(std::span<const ImageDetections> dets,
                          const Dataset& gts, const EvalConfig& cfg,
                          std::span<const std::string> vocabulary,
                          const Dataset* ignore) {
  const std::vector<std::string> vocab =
      vocabulary.empty() ? MergedVocabulary(gts, {})
                         : std::vector<std::string>(vocabulary.begin(),
                                                    vocabulary.end());
  ApAccumulator accum(cfg);
  std::set<std::string> seen;
  for (const auto& image_dets : dets) {
    const auto* image = FindImage(gts, image_dets.image_id);
    if (image == nullptr) {
      throw Error(ErrorCode::kIdMismatch,
                  "detections for unknown image '" + image_dets.image_id + "'");
    }
    seen.insert(image_dets.image_id);
    std::vector<geometry::Quad> regions;
    if (ignore != nullptr) {
      if (const auto* other = FindImage(*ignore, image_dets.image_id)) {
        for (const auto& inst : other->instances) regions.push_back(inst.corners);
      }
    }
    accum.AddImage(image->image_id, image_dets.detections, image->instances,
                   vocab, regions);
  }
  for (const auto& image : gts) {
    if (!seen.contains(image.image_id)) {
      accum.AddImage(image.image_id, {}, image.instances, vocab);
    }
  }
  return accum.Finalize();
}

}  // namespace

EvalReport MeanAp(std::span<const ImageDetections> dets, const Dataset& gts,
                  const EvalConfig& cfg,
                  std::span<const std::string> vocabulary) {
  return MeanApIgnoring(dets, gts, cfg, vocabulary, nullptr);
}

double AccAgainstLabels(std::span<const ImageDetections> dets,
                        const Dataset& gts, const EvalConfig& cfg) {
  cfg.Validate();
  std::size_t total = 0;
  std::size_t agree = 0;
  for (const auto& image : gts) {
    total += image.instances.size();
    const ImageDetections* found = nullptr;
    for (const auto& d : dets) {
      if (d.image_id == image.image_id) {
        found = &d;
        break;
      }
    }
    if (found == nullptr) continue;
    const auto assigned =
        GreedyAssign(found->detections, image.instances, cfg.iou_threshold);
    for (std::size_t d = 0; d < assigned.size(); ++d) {
      if (assigned[d] < 0) continue;
      const auto& gt = image.instances[static_cast<std::size_t>(assigned[d])];
      if (gt.category == found->detections[d].category) ++agree;
    }
  }
  return total ? static_cast<double>(agree) / static_cast<double>(total) : 0.0;
}

SubsetMap SubsetMeanAp(std::span<const ImageDetections> dets,
                       const Dataset& gts,
                       const annotations::NoiseRecord& record, Subset which,
                       const EvalConfig& cfg) {
  // The incorrect partition is referenced to the corrupted labels whichever
  // label set `gts` carries.
  Dataset relabeled = gts;
  for (const auto& change : record.changes) {
    for (auto& image : relabeled) {
      if (image.image_id == change.image_id &&
          change.instance_index < image.instances.size()) {
        image.instances[change.instance_index].category =
            change.corrupted_category;
      }
    }
  }
  std::vector<std::string> extra = record.vocabulary;
  for (const auto& c : record.changes) {
    extra.push_back(c.original_category);
    extra.push_back(c.corrupted_category);
  }
  const auto vocab = MergedVocabulary(gts, extra);

  auto partition = annotations::PartitionByRecord(relabeled, record);
  const bool correct = which == Subset::kCorrect;
  const Dataset& ref = correct ? partition.clean : partition.corrupted;
  const Dataset& other = correct ? partition.corrupted : partition.clean;
  const EvalReport report = MeanApIgnoring(dets, ref, cfg, vocab, &other);
  return {report.map, report.empty_reference};
}

EvalReport Evaluate(std::span<const ImageDetections> dets, const Dataset& gts,
                    const annotations::NoiseRecord* record,
                    const EvalConfig& cfg) {
  cfg.Validate();
  std::set<std::string> gt_ids;
  std::set<std::string> det_ids;
  for (const auto& g : gts) gt_ids.insert(g.image_id);
  for (const auto& d : dets) det_ids.insert(d.image_id);
  if (gt_ids != det_ids) {
    std::ostringstream msg;
    msg << "image id mismatch;";
    std::vector<std::string> missing_pred;
    std::vector<std::string> missing_gt;
    std::set_difference(gt_ids.begin(), gt_ids.end(), det_ids.begin(),
                        det_ids.end(), std::back_inserter(missing_pred));
    std::set_difference(det_ids.begin(), det_ids.end(), gt_ids.begin(),
                        gt_ids.end(), std::back_inserter(missing_gt));
    if (!missing_pred.empty()) {
      msg << " missing predictions:";
      for (const auto& id : missing_pred) msg << ' ' << id;
      msg << ';';
    }
    if (!missing_gt.empty()) {
      msg << " missing ground truth:";
      for (const auto& id : missing_gt) msg << ' ' << id;
      msg << ';';
    }
    throw Error(ErrorCode::kIdMismatch, msg.str());
  }

  std::vector<std::string> extra;
  if (record) {
    extra = record->vocabulary;
    for (const auto& c : record->changes) {
      extra.push_back(c.original_category);
      extra.push_back(c.corrupted_category);
    }
  }
  const auto vocab = MergedVocabulary(gts, extra);
  EvalReport report = MeanAp(dets, gts, cfg, vocab);
  report.acc = AccAgainstLabels(dets, gts, cfg);
  if (record) {
    const auto correct = SubsetMeanAp(dets, gts, *record, Subset::kCorrect, cfg);
    const auto incorrect =
        SubsetMeanAp(dets, gts, *record, Subset::kIncorrect, cfg);
    report.map_correct = correct.map;
    report.correct_subset_empty = correct.empty;
    report.map_incorrect = incorrect.map;
    report.incorrect_subset_empty = incorrect.empty;
  }
  return report;
}

std::string EvalReport::ToText() const {
  nlohmann::ordered_json j;
  j["map"] = map;
  j["empty_reference"] = empty_reference;
  if (acc) j["acc"] = *acc;
  if (map_correct) {
    j["map_correct"] = *map_correct;
    j["correct_subset_empty"] = correct_subset_empty;
  }
  if (map_incorrect) {
    j["map_incorrect"] = *map_incorrect;
    j["incorrect_subset_empty"] = incorrect_subset_empty;
  }
  nlohmann::ordered_json classes = nlohmann::ordered_json::object();
  for (const auto& [cls, s] : per_class) {
    classes[cls] = {{"ap", s.ap}, {"tp", s.tp}, {"fp", s.fp}, {"gt", s.num_gt}};
  }
  j["per_class"] = std::move(classes);
  return j.dump(2) + "\n";
}

std::string EvalReport::ToCsv() const {
  std::ostringstream out;
  out << "class,ap,tp,fp,gt\n";
  for (const auto& [cls, s] : per_class) {
    out << cls << ',' << text::FormatReal(s.ap) << ',' << s.tp << ',' << s.fp
        << ',' << s.num_gt << '\n';
  }
  return out.str();
}

}  // namespace dldkit::metrics
