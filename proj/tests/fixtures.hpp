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

// Synthetic DOTA fixtures and a field-by-field dataset diff.

#ifndef DLDKIT_TESTS_FIXTURES_HPP_
#define DLDKIT_TESTS_FIXTURES_HPP_

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "dldkit/annotations.hpp"
#include "dldkit/geometry.hpp"

namespace testing_fixtures {

inline const std::vector<std::string>& Categories() {
  static const std::vector<std::string> kCats = {
      "plane", "ship", "storage-tank", "harbor", "bridge", "small-vehicle"};
  return kCats;
}

// `images` files with `per_image` instances each on integer pixel corners.
inline dldkit::annotations::Dataset MakeDataset(std::size_t images,
                                                std::size_t per_image,
                                                unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pos(0, 1000);
  std::uniform_int_distribution<int> ext(4, 60);
  std::uniform_int_distribution<std::size_t> cat(0, Categories().size() - 1);
  std::bernoulli_distribution hard(0.1);
  dldkit::annotations::Dataset ds;
  for (std::size_t i = 0; i < images; ++i) {
    dldkit::annotations::ImageAnnotations img;
    img.image_id = "P" + std::to_string(1000 + i);
    img.header = {"imagesource:GoogleEarth", "gsd:0.146343"};
    for (std::size_t j = 0; j < per_image; ++j) {
      const double x = pos(rng), y = pos(rng), w = ext(rng), h = ext(rng);
      dldkit::annotations::Instance inst;
      inst.corners = {dldkit::geometry::Point{x, y}, {x + w, y}, {x + w, y + h},
                      {x, y + h}};
      inst.category = Categories()[cat(rng)];
      inst.difficulty = hard(rng) ? 1 : 0;
      img.instances.push_back(inst);
    }
    ds.push_back(img);
  }
  return ds;
}

struct DatasetDiff {
  std::size_t label_changes = 0;
  std::size_t geometry_changes = 0;    // corners or difficulty
  std::size_t structure_changes = 0;   // ids, headers, instance counts
  std::size_t fixed_points = 0;        // reported change with equal labels
};

inline DatasetDiff Diff(const dldkit::annotations::Dataset& a,
                        const dldkit::annotations::Dataset& b) {
  DatasetDiff d;
  if (a.size() != b.size()) {
    d.structure_changes++;
    return d;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].image_id != b[i].image_id || a[i].header != b[i].header ||
        a[i].instances.size() != b[i].instances.size()) {
      d.structure_changes++;
      continue;
    }
    for (std::size_t j = 0; j < a[i].instances.size(); ++j) {
      const auto& x = a[i].instances[j];
      const auto& y = b[i].instances[j];
      if (x.category != y.category) d.label_changes++;
      if (x.corners != y.corners || x.difficulty != y.difficulty) {
        d.geometry_changes++;
      }
    }
  }
  return d;
}

}  // namespace testing_fixtures

#endif  // DLDKIT_TESTS_FIXTURES_HPP_
