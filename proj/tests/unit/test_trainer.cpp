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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dldkit/error.hpp"
#include "oracles.hpp"

namespace dldkit::trainer {
namespace {

using testing_oracles::MaxGradientError;
using testing_oracles::MlpObjective;

TEST(Backward, MatchesCentralDifferences) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    MlpModel model = MlpModel::Random(3, 8, 4, 100 + trial);
    Eigen::MatrixXd x(5, 3);
    for (int i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
    std::vector<int> labels = {0, 1, 2, 3, static_cast<int>(rng() % 4)};
    std::vector<double> w(5);
    for (double& v : w) v = u(rng);
    const double eps = trial % 2 ? 0.1 : 0.0;
    const Gradients g = Backward(model, x, labels, w, eps);
    auto obj = [&] { return MlpObjective(model, x, labels, w, eps); };
    const double worst = std::max({MaxGradientError(model.w1, g.w1, obj),
                                   MaxGradientError(model.b1, g.b1, obj),
                                   MaxGradientError(model.w2, g.w2, obj),
                                   MaxGradientError(model.b2, g.b2, obj)});
    EXPECT_LT(worst, 1e-5) << "trial " << trial;
  }
}

TEST(Backward, ZeroWhenPredictionsMatchTargets) {
  // Output bias set to the log of the smoothed target makes p equal the
  // target for every sample of that label.
  const double eps = 0.2;
  MlpModel m = MlpModel::Zeros(2, 4, 4);
  for (int o = 0; o < 4; ++o) m.b2(o) = std::log((o == 1 ? 1.0 - eps : 0.0) + eps / 4);
  Eigen::MatrixXd x(3, 2);
  x << 1, 2, -1, 0.5, 3, -2;
  const Gradients g = Backward(m, x, std::vector<int>{1, 1, 1},
                               std::vector<double>{1, 0.5, 2}, eps);
  EXPECT_LT(g.w1.norm() + g.b1.norm() + g.w2.norm() + g.b2.norm(), 1e-15);
}

TEST(Backward, SingleLinearLayerHandDerivation) {
  // One hidden unit fixed to the identity on positive inputs makes the
  // output layer linear in h; dL/dw2 = h (p - a)^T.
  MlpModel m = MlpModel::Zeros(1, 1, 3);
  m.w1(0, 0) = 1.0;
  m.w2 << 0.2, -0.1, 0.4;
  Eigen::MatrixXd x(1, 1);
  x << 2.0;
  const Gradients g = Backward(m, x, std::vector<int>{1}, std::vector<double>{1});
  const Eigen::VectorXd z = 2.0 * m.w2.row(0).transpose();
  Eigen::VectorXd p = (z.array() - z.maxCoeff()).exp();
  p /= p.sum();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(3);
  a(1) = 1;
  for (int o = 0; o < 3; ++o) {
    EXPECT_NEAR(g.w2(0, o), 2.0 * (p(o) - a(o)), 1e-12);
    EXPECT_NEAR(g.b2(o), p(o) - a(o), 1e-12);
  }
}

TEST(Forward, UniformStableAndNormalized) {
  const MlpModel zero = MlpModel::Zeros(2, 5, 4);
  const auto p = Forward(zero, std::vector<double>{3.0, -1.0});
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(p[i], 0.25);

  MlpModel big = MlpModel::Zeros(1, 1, 4);
  big.w1(0, 0) = 1.0;
  big.w2(0, 0) = 1000.0;
  const auto q = Forward(big, std::vector<double>{1.0});
  EXPECT_NEAR(q[0], 1.0, 1e-9);

  const MlpModel r = MlpModel::Random(3, 16, 5, 3);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 3);
  for (int i = 0; i < 50; ++i) {
    const auto v = Forward(r, std::vector<double>{n(rng), n(rng), n(rng)});
    double s = 0;
    for (double x : v.values()) s += x;
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(GenerateDataset, NoiseMaskAndDeterminism) {
  DatasetSpec spec;
  spec.samples = 1000;
  spec.noise_ratio = 0.4;
  spec.seed = 3;
  const SyntheticDataset a = GenerateDataset(spec);
  EXPECT_EQ(a.CorruptedCount(), 400u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.corrupted[i], a.clean_labels[i] != a.noisy_labels[i]);
  }
  const SyntheticDataset b = GenerateDataset(spec);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.noisy_labels, b.noisy_labels);
  spec.noise_ratio = 0.0;
  const SyntheticDataset c = GenerateDataset(spec);
  EXPECT_EQ(c.clean_labels, c.noisy_labels);
  EXPECT_EQ(c.CorruptedCount(), 0u);
}

TEST(GenerateDataset, MeansAreEquidistant) {
  for (int dim : {2, 3, 10}) {
    DatasetSpec spec;
    spec.classes = 4;
    spec.dim = dim;
    spec.separation = 2.5;
    const auto d = GenerateDataset(spec);
    std::vector<double> dist;
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        dist.push_back((d.means.row(i) - d.means.row(j)).norm());
      }
    }
    const double lo = *std::min_element(dist.begin(), dist.end());
    if (dim >= 3) {
      const double hi = *std::max_element(dist.begin(), dist.end());
      EXPECT_NEAR(lo, 2.5, 1e-12);
      EXPECT_NEAR(hi, 2.5, 1e-12);
    } else {
      // Four points in the plane cannot be equidistant; neighbours on the
      // regular polygon are at the separation.
      EXPECT_NEAR(lo, 2.5, 1e-12);
    }
  }
}

TEST(GenerateDataset, InvalidSpec) {
  DatasetSpec spec;
  spec.classes = 1;
  EXPECT_THROW(GenerateDataset(spec), Error);
  spec = {};
  spec.samples = 2;
  EXPECT_THROW(GenerateDataset(spec), Error);
  spec = {};
  spec.noise_ratio = 1.5;
  EXPECT_THROW(GenerateDataset(spec), Error);
}

TrainSpec Quick(LossMode mode = LossMode::kBaseline) {
  TrainSpec t;
  t.hidden = 32;
  t.epochs = 8;
  t.loss_mode = mode;
  t.seed = 9;
  return t;
}

SyntheticDataset SmallData(double rho) {
  DatasetSpec d;
  d.samples = 400;
  d.noise_ratio = rho;
  d.seed = 9;
  return GenerateDataset(d);
}

TEST(Train, DeterministicBytes) {
  const auto data = SmallData(0.4);
  EXPECT_EQ(Train(data, Quick()).ToCsv(), Train(data, Quick()).ToCsv());
  const std::string csv = Train(data, Quick()).ToCsv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "epoch,acc,clean_acc,correct_subset_acc,corrupted_fit,loss,alpha,"
            "topk_size");
}

TEST(Train, NoNoiseMeansAccEqualsCleanAcc) {
  const auto data = SmallData(0.0);
  for (LossMode mode : {LossMode::kBaseline, LossMode::kLabelSmoothing, LossMode::kDld}) {
    const TrainLog log = Train(data, Quick(mode));
    ASSERT_EQ(log.rows.size(), 8u);
    for (const auto& r : log.rows) EXPECT_NEAR(r.acc, r.clean_acc, 1e-12);
  }
}

TEST(Train, ZeroKDldEqualsBaseline) {
  const auto data = SmallData(0.4);
  TrainSpec dld = Quick(LossMode::kDld);
  dld.dld.k_fraction = 0.0;
  dld.dld.el = 2;
  const TrainLog a = Train(data, Quick());
  const TrainLog b = Train(data, dld);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].acc, b.rows[i].acc);
    EXPECT_EQ(a.rows[i].clean_acc, b.rows[i].clean_acc);
    EXPECT_EQ(a.rows[i].loss, b.rows[i].loss);
  }
}

TEST(Train, FixedElPhaseBoundary) {
  const auto data = SmallData(0.4);
  TrainSpec t = Quick(LossMode::kDld);
  t.epochs = 16;
  t.dld.el = 12;
  t.dld.k_fraction = 0.07;
  const TrainLog log = Train(data, t);
  for (const auto& r : log.rows) {
    if (r.epoch <= 12) {
      EXPECT_EQ(r.alpha, 1.0) << r.epoch;
    } else {
      EXPECT_LT(r.alpha, 1.0) << r.epoch;
    }
    EXPECT_EQ(r.topk_size > 0, r.epoch >= 12) << r.epoch;
  }
  EXPECT_EQ(log.el, 12);

  t.dld.schedule = loss::Schedule::kPaperLiteral;
  const TrainLog lit = Train(data, t);
  for (const auto& r : lit.rows) {
    EXPECT_EQ(r.topk_size > 0, r.epoch > 12) << r.epoch;
  }
}

TEST(Train, LoggedLossEqualsWeightedSum) {
  const auto data = SmallData(0.4);
  TrainSpec t = Quick(LossMode::kDld);
  t.dld.el = 3;
  t.dld.k_fraction = 0.1;
  std::vector<double> sums(t.epochs + 1, 0.0);
  const TrainLog log = Train(data, t, [&](int epoch, const loss::LossBatch& b,
                                          const loss::WeightedLoss& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) s += w.weights[i] * b.losses[i];
    sums[epoch] += s;
  });
  for (const auto& r : log.rows) {
    EXPECT_NEAR(r.loss, sums[r.epoch] / data.size(), 1e-12) << r.epoch;
  }
}

TEST(Train, PerEpochScopeRuns) {
  const auto data = SmallData(0.4);
  TrainSpec t = Quick(LossMode::kDld);
  t.dld.el = 3;
  t.dld.selection_scope = loss::SelectionScope::kPerEpoch;
  const TrainLog log = Train(data, t);
  ASSERT_EQ(log.rows.size(), 8u);
  EXPECT_EQ(log.rows[5].topk_size, loss::TopKCount(0.05, data.size()));
}

TEST(Train, BaselineLossDecreasesEarlyOnSeparableData) {
  DatasetSpec d;
  d.samples = 1000;
  d.separation = 6.0;
  d.noise_ratio = 0.0;
  d.seed = 4;
  TrainSpec t = Quick();
  t.epochs = 3;
  const TrainLog log = Train(GenerateDataset(d), t);
  EXPECT_LT(log.rows[1].loss, log.rows[0].loss);
  EXPECT_LT(log.rows[2].loss, log.rows[1].loss);
}

TEST(Train, NoSeparationStaysNearChance) {
  DatasetSpec d;
  d.samples = 4000;
  d.separation = 0.0;
  d.noise_ratio = 0.0;
  d.seed = 6;
  TrainSpec t;
  t.epochs = 10;
  t.seed = 6;
  const TrainLog log = Train(GenerateDataset(d), t);
  for (const auto& r : log.rows) EXPECT_LE(r.clean_acc, 0.25 + 0.05) << r.epoch;
}

TEST(Train, DivergenceReportsPartialLog) {
  const auto data = SmallData(0.4);
  TrainSpec t = Quick();
  t.learning_rate = 1e6;
  try {
    Train(data, t);
    FAIL() << "expected divergence";
  } catch (const TrainingDiverged& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivergenceDetected);
    EXPECT_TRUE(e.partial_log().diverged);
    EXPECT_LT(e.partial_log().rows.size(), 8u);
  }
}

TEST(Sweep, LayoutAndSingleCellConsistency) {
  DatasetSpec d;
  d.samples = 300;
  TrainSpec t = Quick(LossMode::kDld);
  t.epochs = 10;
  t.el_source = ElSource::kFixed;
  t.dld.el = 5;
  SweepGrid g;
  g.noise_ratio = {0.2, 0.4};
  g.loss_mode = {LossMode::kBaseline, LossMode::kDld};
  g.k_fraction = {0.03, 0.05, 0.07, 0.10};
  const std::vector<std::uint64_t> seeds = {1, 2};
  const auto rows = Sweep(d, t, g, seeds);
  // Per ratio: 1 baseline cell + 4 dld cells, each with 2 seed rows + mean.
  ASSERT_EQ(rows.size(), 2u * 5u * 3u);
  EXPECT_EQ(rows[0].seed, 1u);
  EXPECT_EQ(rows[1].seed, 2u);
  EXPECT_FALSE(rows[2].seed.has_value());
  EXPECT_NEAR(rows[2].final_clean_acc,
              (rows[0].final_clean_acc + rows[1].final_clean_acc) / 2, 1e-12);
  EXPECT_EQ(SweepCsv(rows), SweepCsv(Sweep(d, t, g, seeds)));
  const std::string table = TopKTable(rows);
  EXPECT_EQ(table.substr(0, table.find('\n')),
            "noise,baseline,top-3%,top-5%,top-7%,top-10%");
  EXPECT_NE(table.find("\n20%,"), std::string::npos);
  EXPECT_NE(table.find("\n40%,"), std::string::npos);

  // A 1x1 grid reproduces a direct run.
  SweepGrid one;
  one.loss_mode = {LossMode::kBaseline};
  d.seed = 1;
  TrainSpec direct = t;
  direct.loss_mode = LossMode::kBaseline;
  direct.seed = 1;
  const TrainLog log = Train(GenerateDataset(d), direct);
  const auto single = Sweep(d, t, one, std::vector<std::uint64_t>{1});
  ASSERT_EQ(single.size(), 2u);
  EXPECT_EQ(single[0].final_clean_acc, log.rows.back().clean_acc);
}

TEST(Sweep, ElOffsetRows) {
  DatasetSpec d;
  d.samples = 300;
  TrainSpec t = Quick(LossMode::kDld);
  t.epochs = 20;
  t.el_source = ElSource::kFixed;
  t.dld.el = 10;
  SweepGrid g;
  g.loss_mode = {LossMode::kDld};
  g.el_offset = {-8, -4, 0, 4, 8};
  const auto rows = Sweep(d, t, g, std::vector<std::uint64_t>{1});
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0].el, 2);
  EXPECT_EQ(rows[8].el, 18);
  const std::string table = ElOffsetTable(rows);
  std::vector<std::string> labels;
  std::size_t pos = table.find('\n') + 1;
  while (pos < table.size()) {
    labels.push_back(table.substr(pos, table.find(',', pos) - pos));
    pos = table.find('\n', pos) + 1;
  }
  EXPECT_EQ(labels, (std::vector<std::string>{"EL-8", "EL-4", "EL", "EL+4", "EL+8"}));
}

TEST(DeriveSeed, StreamsDiffer) {
  EXPECT_NE(DeriveSeed(1, 1), DeriveSeed(1, 2));
  EXPECT_NE(DeriveSeed(1, 1), DeriveSeed(2, 1));
  EXPECT_EQ(DeriveSeed(5, 3), DeriveSeed(5, 3));
}

}  // namespace
}  // namespace dldkit::trainer
