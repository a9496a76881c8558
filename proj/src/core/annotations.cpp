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

#include "dldkit/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "dldkit/error.hpp"
#include "dldkit/text.hpp"

namespace dldkit::annotations {

namespace {

[[noreturn]] void LineError(ErrorCode code, std::string_view image_id,
                            std::size_t line_no, const std::string& what) {
  std::ostringstream msg;
  msg << image_id << ": line " << line_no << ": " << what;
  throw Error(code, msg.str());
}

bool IsHeaderLine(const std::vector<std::string_view>& tokens) {
  return tokens.size() == 1 && tokens[0].find(':') != std::string_view::npos;
}

}  // namespace

std::size_t InstanceCount(const Dataset& dataset) {
  std::size_t n = 0;
  for (const auto& image : dataset) n += image.instances.size();
  return n;
}

ImageAnnotations ParseDota(std::string_view text, std::string image_id) {
  ImageAnnotations out;
  out.image_id = std::move(image_id);
  std::size_t line_no = 0;
  for (std::string_view line : text::Split(text, '\n')) {
    ++line_no;
    const auto tokens = text::SplitWhitespace(line);
    if (tokens.empty()) continue;
    if (IsHeaderLine(tokens)) {
      out.header.emplace_back(tokens[0]);
      continue;
    }
    if (tokens.size() != 10 && tokens.size() != 9) {
      LineError(ErrorCode::kMalformedLine, out.image_id, line_no,
                "expected 10 tokens, found " + std::to_string(tokens.size()));
    }
    std::array<double, 8> xy{};
    for (int i = 0; i < 8; ++i) {
      const auto v = text::ParseReal(tokens[i]);
      if (!v || !std::isfinite(*v)) {
        LineError(ErrorCode::kMalformedLine, out.image_id, line_no,
                  "non-numeric coordinate '" + std::string(tokens[i]) + "'");
      }
      xy[i] = *v;
    }
    if (tokens.size() == 9) {
      // Eight coordinates and a difficulty flag: the category is missing.
      if (text::ParseInt(tokens[8])) {
        LineError(ErrorCode::kEmptyCategory, out.image_id, line_no,
                  "missing category");
      }
      LineError(ErrorCode::kMalformedLine, out.image_id, line_no,
                "expected 10 tokens, found 9");
    }
    const auto difficulty = text::ParseInt(tokens[9]);
    if (!difficulty || (*difficulty != 0 && *difficulty != 1)) {
      LineError(ErrorCode::kMalformedLine, out.image_id, line_no,
                "difficulty must be 0 or 1, found '" +
                    std::string(tokens[9]) + "'");
    }
    Instance inst;
    for (int i = 0; i < 4; ++i) inst.corners[i] = {xy[2 * i], xy[2 * i + 1]};
    inst.corners = geometry::MakeCounterClockwise(inst.corners);
    inst.category = std::string(tokens[8]);
    inst.difficulty = static_cast<int>(*difficulty);
    out.instances.push_back(std::move(inst));
  }
  return out;
}

std::string WriteDota(const ImageAnnotations& annotations) {
  std::string out;
  for (const auto& line : annotations.header) {
    out += line;
    out += '\n';
  }
  for (const auto& inst : annotations.instances) {
    for (const auto& p : inst.corners) {
      out += text::FormatReal(p.x);
      out += ' ';
      out += text::FormatReal(p.y);
      out += ' ';
    }
    out += inst.category;
    out += ' ';
    out += std::to_string(inst.difficulty);
    out += '\n';
  }
  return out;
}

Dataset LoadDotaDirectory(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIo, "not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt" &&
        entry.path().filename() != kNoiseRecordFileName) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  Dataset out;
  out.reserve(files.size());
  for (const auto& f : files) {
    out.push_back(ParseDota(text::ReadFile(f), f.stem().string()));
  }
  return out;
}

void WriteDotaDirectory(const Dataset& dataset,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& image : dataset) {
    text::WriteFile(dir / (image.image_id + ".txt"), WriteDota(image));
  }
}

std::size_t NoisyCount(double ratio, std::size_t n) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidRatio,
                "noise ratio must lie in [0, 1], got " + text::FormatReal(ratio));
  }
  const double exact = ratio * static_cast<double>(n);
  const auto count = static_cast<std::size_t>(std::floor(exact + 1e-9 * (1.0 + exact)));
  return std::min(count, n);
}

std::vector<LabelFlip> DrawSymmetricNoise(std::span<const std::size_t> labels,
                                          std::size_t num_classes,
                                          double ratio, std::uint64_t seed) {
  const std::size_t n = labels.size();
  const std::size_t m = NoisyCount(ratio, n);
  if (m == 0) return {};
  if (num_classes < 2) {
    throw Error(ErrorCode::kVocabularyTooSmall,
                "at least 2 categories are needed to draw a different label, "
                "vocabulary has " + std::to_string(num_classes));
  }

  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first m slots become a uniform m-subset.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  order.resize(m);
  std::sort(order.begin(), order.end());

  std::vector<LabelFlip> flips;
  flips.reserve(m);
  for (std::size_t pos : order) {
    const std::size_t original = labels[pos];
    std::size_t replacement = 0;
    if (original < num_classes) {
      std::uniform_int_distribution<std::size_t> draw(0, num_classes - 2);
      replacement = draw(rng);
      if (replacement >= original) ++replacement;
    } else {
      std::uniform_int_distribution<std::size_t> draw(0, num_classes - 1);
      replacement = draw(rng);
    }
    flips.push_back({pos, original, replacement});
  }
  return flips;
}

std::vector<std::string> DeriveVocabulary(const Dataset& dataset) {
  std::set<std::string> cats;
  for (const auto& image : dataset) {
    for (const auto& inst : image.instances) cats.insert(inst.category);
  }
  return {cats.begin(), cats.end()};
}

NoisyDataset InjectNoise(const Dataset& dataset, double ratio,
                         std::uint64_t seed,
                         std::optional<std::vector<std::string>> vocabulary) {
  NoisyDataset out;
  out.dataset = dataset;
  out.record.ratio = ratio;
  out.record.seed = seed;
  out.record.vocabulary =
      vocabulary ? std::move(*vocabulary) : DeriveVocabulary(dataset);
  const auto& vocab = out.record.vocabulary;

  // Validate before drawing so that ratio 0 still reports a bad vocabulary.
  NoisyCount(ratio, 0);
  if (vocab.size() < 2) {
    throw Error(ErrorCode::kVocabularyTooSmall,
                "at least 2 categories are needed to draw a different label, "
                "vocabulary has " + std::to_string(vocab.size()));
  }

  std::map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < vocab.size(); ++i) index_of.emplace(vocab[i], i);

  struct Slot {
    std::size_t image;
    std::size_t instance;
  };
  std::vector<Slot> slots;
  std::vector<std::size_t> labels;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (std::size_t j = 0; j < dataset[i].instances.size(); ++j) {
      slots.push_back({i, j});
      const auto it = index_of.find(dataset[i].instances[j].category);
      labels.push_back(it == index_of.end() ? vocab.size() : it->second);
    }
  }

  for (const LabelFlip& flip :
       DrawSymmetricNoise(labels, vocab.size(), ratio, seed)) {
    const Slot& slot = slots[flip.position];
    Instance& inst = out.dataset[slot.image].instances[slot.instance];
    NoiseChange change;
    change.image_id = dataset[slot.image].image_id;
    change.instance_index = slot.instance;
    change.original_category = inst.category;
    change.corrupted_category = vocab[flip.corrupted];
    inst.category = change.corrupted_category;
    out.record.changes.push_back(std::move(change));
  }
  return out;
}

std::string WriteNoiseRecord(const NoiseRecord& record) {
  std::ostringstream out;
  out << "ratio=" << text::FormatReal(record.ratio) << " seed=" << record.seed
      << '\n';
  if (!record.vocabulary.empty()) {
    out << "vocabulary=";
    for (std::size_t i = 0; i < record.vocabulary.size(); ++i) {
      if (i) out << ',';
      out << record.vocabulary[i];
    }
    out << '\n';
  }
  for (const auto& c : record.changes) {
    out << c.image_id << ' ' << c.instance_index << ' ' << c.original_category
        << ' ' << c.corrupted_category << '\n';
  }
  return out.str();
}

NoiseRecord ParseNoiseRecord(std::string_view content) {
  NoiseRecord record;
  bool have_header = false;
  std::size_t line_no = 0;
  for (std::string_view line : text::Split(content, '\n')) {
    ++line_no;
    const auto tokens = text::SplitWhitespace(line);
    if (tokens.empty()) continue;
    auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::kMalformedLine,
                  "noise record: line " + std::to_string(line_no) + ": " + what);
    };
    if (!have_header) {
      if (tokens.size() != 2 || !tokens[0].starts_with("ratio=") ||
          !tokens[1].starts_with("seed=")) {
        fail("expected header 'ratio=<r> seed=<s>'");
      }
      const auto ratio = text::ParseReal(tokens[0].substr(6));
      const auto seed = text::ParseInt(tokens[1].substr(5));
      if (!ratio || !seed || *seed < 0) fail("bad header values");
      record.ratio = *ratio;
      record.seed = static_cast<std::uint64_t>(*seed);
      have_header = true;
      continue;
    }
    if (tokens.size() == 1 && tokens[0].starts_with("vocabulary=")) {
      for (auto v : text::Split(tokens[0].substr(11), ',')) {
        if (!v.empty()) record.vocabulary.emplace_back(v);
      }
      continue;
    }
    if (tokens.size() != 4) fail("expected 'image_id index original corrupted'");
    const auto index = text::ParseInt(tokens[1]);
    if (!index || *index < 0) fail("bad instance index");
    record.changes.push_back({std::string(tokens[0]),
                              static_cast<std::size_t>(*index),
                              std::string(tokens[2]), std::string(tokens[3])});
  }
  if (!have_header) {
    throw Error(ErrorCode::kMalformedLine, "noise record: missing header");
  }
  return record;
}

Partition PartitionByRecord(const Dataset& dataset, const NoiseRecord& record) {
  std::map<std::string, std::size_t> image_pos;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    image_pos.emplace(dataset[i].image_id, i);
  }
  std::vector<std::vector<bool>> marked(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    marked[i].assign(dataset[i].instances.size(), false);
  }
  for (const auto& change : record.changes) {
    const auto it = image_pos.find(change.image_id);
    if (it == image_pos.end()) {
      throw Error(ErrorCode::kRecordMismatch,
                  "noise record names unknown image '" + change.image_id + "'");
    }
    if (change.instance_index >= marked[it->second].size()) {
      throw Error(ErrorCode::kRecordMismatch,
                  "noise record names instance " +
                      std::to_string(change.instance_index) + " of image '" +
                      change.image_id + "', which has only " +
                      std::to_string(marked[it->second].size()));
    }
    marked[it->second][change.instance_index] = true;
  }

  Partition out;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    ImageAnnotations clean{dataset[i].image_id, dataset[i].header, {}};
    ImageAnnotations corrupted{dataset[i].image_id, dataset[i].header, {}};
    for (std::size_t j = 0; j < dataset[i].instances.size(); ++j) {
      (marked[i][j] ? corrupted : clean)
          .instances.push_back(dataset[i].instances[j]);
    }
    out.clean.push_back(std::move(clean));
    out.corrupted.push_back(std::move(corrupted));
  }
  return out;
}

}  // namespace dldkit::annotations
