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

#ifndef DLDKIT_ANNOTATIONS_HPP_
#define DLDKIT_ANNOTATIONS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dldkit/geometry.hpp"

namespace dldkit::annotations {

// One labelled object. Corners are kept as parsed except that the vertex
// order is repaired to counter-clockwise.
struct Instance {
  geometry::Quad corners;
  std::string category;
  int difficulty = 0;

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct ImageAnnotations {
  std::string image_id;
  // Metadata lines such as "imagesource:GF2" or "gsd:0.5", in file order.
  std::vector<std::string> header;
  std::vector<Instance> instances;

  friend bool operator==(const ImageAnnotations&,
                         const ImageAnnotations&) = default;
};

// Images ordered by image_id; ids are unique.
using Dataset = std::vector<ImageAnnotations>;

std::size_t InstanceCount(const Dataset& dataset);

// Parses one DOTA label file. Errors carry the 1-based line number.
ImageAnnotations ParseDota(std::string_view text, std::string image_id);

std::string WriteDota(const ImageAnnotations& annotations);

// Name of the record file written next to corrupted annotations. Directory
// loaders skip it.
inline constexpr const char* kNoiseRecordFileName = "noise_record.txt";

// Loads every "*.txt" file of a directory; image_id is the file stem.
Dataset LoadDotaDirectory(const std::filesystem::path& dir);
void WriteDotaDirectory(const Dataset& dataset,
                        const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Symmetric category noise.

// floor(ratio * n), tolerant of representation error in ratio (0.29 * 100 is
// 28.999999999999996 in binary floating point and must still give 29).
std::size_t NoisyCount(double ratio, std::size_t n);

struct LabelFlip {
  std::size_t position;  // index into the label sequence
  std::size_t original;
  std::size_t corrupted;
};

// Selects NoisyCount(ratio, labels.size()) positions uniformly without
// replacement and draws a replacement uniformly from [0, num_classes) minus
// the original label. Labels >= num_classes (outside the vocabulary) draw
// from the whole range. Flips come back ordered by position. Deterministic
// in seed for a given build (std::mt19937_64).
std::vector<LabelFlip> DrawSymmetricNoise(std::span<const std::size_t> labels,
                                          std::size_t num_classes,
                                          double ratio, std::uint64_t seed);

struct NoiseChange {
  std::string image_id;
  std::size_t instance_index = 0;
  std::string original_category;
  std::string corrupted_category;

  friend bool operator==(const NoiseChange&, const NoiseChange&) = default;
};

struct NoiseRecord {
  double ratio = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> vocabulary;
  std::vector<NoiseChange> changes;

  friend bool operator==(const NoiseRecord&, const NoiseRecord&) = default;
};

struct NoisyDataset {
  Dataset dataset;
  NoiseRecord record;
};

// Sorted set of categories present in the dataset.
std::vector<std::string> DeriveVocabulary(const Dataset& dataset);

// Corrupts floor(ratio * N) instance labels across the whole dataset. Boxes
// and difficulty flags are untouched.
NoisyDataset InjectNoise(const Dataset& dataset, double ratio,
                         std::uint64_t seed,
                         std::optional<std::vector<std::string>> vocabulary =
                             std::nullopt);

// Text form: "ratio=<r> seed=<s>" followed by
// "image_id index original corrupted" per change. The vocabulary is carried
// on an optional "vocabulary=a,b,c" line after the header.
std::string WriteNoiseRecord(const NoiseRecord& record);
NoiseRecord ParseNoiseRecord(std::string_view text);

struct Partition {
  Dataset clean;      // instances not named by the record
  Dataset corrupted;  // instances named by the record
};

// Splits every image's instances by record membership. Both halves keep every
// image id (possibly with no instances). Throws kRecordMismatch if the record
// names an image or instance index absent from the dataset.
Partition PartitionByRecord(const Dataset& dataset, const NoiseRecord& record);

}  // namespace dldkit::annotations

#endif  // DLDKIT_ANNOTATIONS_HPP_
