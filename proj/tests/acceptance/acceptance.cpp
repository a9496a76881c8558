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

// Prints one PASS/FAIL line per acceptance criterion, followed by indented
// detail lines. Exit status is non-zero if any criterion fails that was not
// named in --expect-fail.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dldkit/annotations.hpp"
#include "dldkit/dynamics.hpp"
#include "dldkit/error.hpp"
#include "dldkit/geometry.hpp"
#include "dldkit/loss.hpp"
#include "dldkit/metrics.hpp"
#include "dldkit/text.hpp"
#include "dldkit/trainer.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;
namespace an = dldkit::annotations;
namespace dy = dldkit::dynamics;
namespace geo = dldkit::geometry;
namespace lo = dldkit::loss;
namespace me = dldkit::metrics;
namespace tr = dldkit::trainer;
using dldkit::ErrorCode;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void Check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void Note(const std::string& what) { details.push_back("note " + what); }
};

std::string Fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

template <typename F>
std::optional<ErrorCode> CodeOf(F&& f) {
  try {
    f();
  } catch (const dldkit::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

Outcome Geometry() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2026);
  double worst_mc = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto [a, b] = testing_oracles::RandomOverlappingPair(rng);
    const double mc = testing_oracles::MonteCarloIou(a, b, 1000000, 7000 + i);
    worst_mc = std::max(worst_mc, std::abs(geo::RotatedIou(a, b) - mc));
  }
  out.Check(worst_mc < 0.01,
            "200 rotated pairs, max |iou - monte carlo(1e6)| = " + Fmt("%.5f", worst_mc));

  std::uniform_real_distribution<double> pos(-50, 50), ext(1, 40);
  double worst_axis = 0.0;
  for (int i = 0; i < 100; ++i) {
    const geo::OrientedBox a(pos(rng), pos(rng), ext(rng), ext(rng), 0.0);
    const geo::OrientedBox b(a.cx() + 0.5 * pos(rng), a.cy() + 0.5 * pos(rng),
                             ext(rng), ext(rng), 0.0);
    worst_axis = std::max(worst_axis, std::abs(geo::RotatedIou(a, b) -
                                               testing_oracles::AxisAlignedIou(a, b)));
  }
  out.Check(worst_axis < 1e-12,
            "100 axis-aligned pairs, max |iou - closed form| = " + Fmt("%.3g", worst_axis));
  const double secs = Seconds(start);
  out.Check(secs < 60.0, "runtime " + Fmt("%.1f s", secs));
  return out;
}

geo::Quad Rect(double x0, double y0, double x1, double y1) {
  return {geo::Point{x0, y0}, geo::Point{x1, y0}, geo::Point{x1, y1},
          geo::Point{x0, y1}};
}

Outcome Ap() {
  Outcome out;
  using F = me::MatchFlag;
  const std::vector<F> ranked = {F::kTruePositive, F::kFalsePositive, F::kTruePositive};
  // All-point: precision envelope 1 on recall (0, .5], 2/3 on (.5, 1].
  const double all_point = 0.5 * 1.0 + 0.5 * (2.0 / 3.0);
  // Eleven-point: six thresholds at precision 1, five at 2/3.
  const double voc07 = (6 * 1.0 + 5 * (2.0 / 3.0)) / 11.0;
  const double got_all = me::AveragePrecision(ranked, 2, me::ApMode::kAllPoint);
  const double got_voc = me::AveragePrecision(ranked, 2, me::ApMode::kVoc07ElevenPoint);
  out.Check(std::abs(got_all - all_point) < 1e-9,
            "all-point AP " + Fmt("%.12f", got_all) + " vs 5/6");
  out.Check(std::abs(got_voc - voc07) < 1e-9,
            "voc07 AP " + Fmt("%.12f", got_voc) + " vs 28/33");

  const std::vector<an::Instance> gts = {{Rect(0, 0, 10, 10), "a", 0},
                                         {Rect(5, 0, 15, 10), "a", 0}};
  const std::vector<me::Detection> dets = {{Rect(4, 0, 14, 10), "a", 0.9},
                                           {Rect(5, 0, 15, 10), "a", 0.8},
                                           {Rect(0, 0, 10, 10), "a", 0.7}};
  out.Check(me::MatchDetections(dets, gts, {}) ==
                testing_oracles::ExhaustiveMatch(dets, gts, 0.5),
            "3x2 crafted case equals exhaustive assignment");

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> p(0, 20), e(4, 12), s(0, 1);
  int agree = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<an::Instance> g;
    std::vector<me::Detection> d;
    for (int i = 0; i < 3; ++i) {
      const double x = p(rng), y = p(rng);
      g.push_back({Rect(x, y, x + e(rng), y + e(rng)), "a", 0});
    }
    for (int i = 0; i < 4; ++i) {
      const double x = p(rng), y = p(rng);
      d.push_back({Rect(x, y, x + e(rng), y + e(rng)), "a", s(rng)});
    }
    agree += me::MatchDetections(d, g, {}) == testing_oracles::ExhaustiveMatch(d, g, 0.5);
  }
  out.Check(agree == 300, std::to_string(agree) + "/300 random 4x3 scenes equal the oracle");
  return out;
}

Outcome Noise() {
  Outcome out;
  const an::Dataset ds = testing_fixtures::MakeDataset(50, 20, 77);
  out.Check(an::InstanceCount(ds) == 1000, "fixture has 1000 instances");
  const std::vector<std::pair<double, std::size_t>> cases = {
      {0.2, 200}, {0.3, 300}, {0.4, 400}};
  for (const auto& [rho, expected] : cases) {
    const auto a = an::InjectNoise(ds, rho, 1234);
    const auto b = an::InjectNoise(ds, rho, 1234);
    const auto diff = testing_fixtures::Diff(ds, a.dataset);
    // Byte comparison of every serialized line with the category token removed.
    std::size_t byte_diffs = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const std::string sa = an::WriteDota(ds[i]);
      const std::string sb = an::WriteDota(a.dataset[i]);
      const auto la = dldkit::text::Split(sa, '\n');
      const auto lb = dldkit::text::Split(sb, '\n');
      if (la.size() != lb.size()) {
        ++byte_diffs;
        continue;
      }
      for (std::size_t j = 0; j < la.size(); ++j) {
        auto ta = dldkit::text::SplitWhitespace(la[j]);
        auto tb = dldkit::text::SplitWhitespace(lb[j]);
        if (ta.size() == 10 && tb.size() == 10) {
          ta.erase(ta.begin() + 8);
          tb.erase(tb.begin() + 8);
        }
        byte_diffs += ta != tb;
      }
    }
    const std::string tag = "rho=" + Fmt("%.1f", rho) + ": ";
    out.Check(diff.label_changes == expected && a.record.changes.size() == expected,
              tag + std::to_string(diff.label_changes) + " labels changed, expected " +
                  std::to_string(expected));
    out.Check(byte_diffs == 0 && diff.geometry_changes == 0 && diff.structure_changes == 0,
              tag + std::to_string(byte_diffs) + " non-label lines differ");
    out.Check(diff.fixed_points == 0,
              tag + std::to_string(diff.fixed_points) + " fixed points");
    out.Check(a.dataset == b.dataset && a.record == b.record, tag + "two runs identical");
  }
  return out;
}

dy::EpochSeries Series(const std::function<double(int)>& f, int epochs = 36) {
  dy::EpochSeries s("acc", {}, {});
  for (int t = 1; t <= epochs; ++t) s.Append(t, f(t));
  return s;
}

std::string ElText(const std::optional<int>& el) {
  return el ? std::to_string(*el) : "none";
}

Outcome Endpoint() {
  Outcome out;
  const auto sat = Series([](int t) { return 0.8 * (1 - std::exp(-t / 4.0)); });
  dy::ElParams causal;
  const auto c = dy::DetectEl(sat, causal).el;
  out.Check(c && *c >= 14 && *c <= 18,
            "saturating series, causal scan (eta 0.001, degree 4): EL=" + ElText(c) +
                ", target [14, 18]");
  dy::ElParams posthoc;
  posthoc.scan = dy::ElScan::kPosthoc;
  const auto p = dy::DetectEl(sat, posthoc).el;
  out.Note("posthoc scan on the same series: EL=" + ElText(p));
  dy::ElParams quintic;
  quintic.degree = 5;
  out.Note("causal scan at degree 5: EL=" + ElText(dy::DetectEl(sat, quintic).el));
  // Independent check of the causal reading: long-double normal equations
  // on each prefix.
  std::optional<int> oracle;
  for (int e = causal.EffectiveMinEpochs(); e <= 36 && !oracle; ++e) {
    std::vector<double> t, y;
    for (int k = 1; k <= e; ++k) {
      t.push_back(k);
      y.push_back(0.8 * (1 - std::exp(-k / 4.0)));
    }
    const auto coef = testing_oracles::NormalEquationsFit(t, y, 4);
    if (std::abs(static_cast<double>(testing_oracles::EvalSecondDerivative(coef, e))) <
        0.001) {
      oracle = e;
    }
  }
  out.Note("independent prefix-fit oracle for the causal scan: EL=" + ElText(oracle));

  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> amp(0.4, 0.9), rate(2.5, 9.0),
      drift(-0.004, 0.004), wob(0.0, 0.02), phase(0, 6.28);
  const std::vector<double> etas = {0.01, 0.003, 0.001, 0.0003, 0.0001};
  int monotone = 0;
  for (int i = 0; i < 20; ++i) {
    const double a = amp(rng), r = rate(rng), d = drift(rng), w = wob(rng), ph = phase(rng);
    const auto s = Series([&](int t) {
      return a * (1 - std::exp(-t / r)) + d * t + w * std::sin(t / 5.0 + ph);
    });
    bool ok = true;
    for (dy::ElScan scan : {dy::ElScan::kCausal, dy::ElScan::kPosthoc}) {
      int prev = 0;
      for (double eta : etas) {
        dy::ElParams q;
        q.eta = eta;
        q.scan = scan;
        const auto el = dy::DetectEl(s, q).el;
        const int v = el ? *el : 1000;
        ok = ok && v >= prev;
        prev = v;
      }
    }
    monotone += ok;
  }
  out.Check(monotone == 20, std::to_string(monotone) +
                                "/20 random series: EL non-decreasing as eta shrinks");

  int identical = 0, total = 0;
  for (double scale : {100.0, 0.01, 0.5, 4.0}) {
    for (double eta : {0.01, 0.001, 0.0001}) {
      for (dy::ElScan scan : {dy::ElScan::kCausal, dy::ElScan::kPosthoc}) {
        dy::ElParams q1, q2;
        q1.eta = eta;
        q2.eta = eta / scale;
        q1.scan = q2.scan = scan;
        identical += dy::DetectEl(sat.Scaled(scale), q1).el == dy::DetectEl(sat, q2).el;
        ++total;
      }
    }
  }
  out.Check(identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                    " scale identity cases agree");
  return out;
}

Outcome Gradient() {
  Outcome out;
  std::mt19937_64 rng(55);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    tr::MlpModel model = tr::MlpModel::Random(3, 8, 4, 900 + trial);
    Eigen::MatrixXd x(6, 3);
    for (int i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
    std::vector<int> labels(6);
    for (int& l : labels) l = static_cast<int>(rng() % 4);
    std::vector<double> w(6);
    for (double& v : w) v = u(rng);
    const double eps = trial % 2 ? 0.1 : 0.0;
    const tr::Gradients g = tr::Backward(model, x, labels, w, eps);
    auto obj = [&] { return testing_oracles::MlpObjective(model, x, labels, w, eps); };
    worst = std::max({worst, testing_oracles::MaxGradientError(model.w1, g.w1, obj),
                      testing_oracles::MaxGradientError(model.b1, g.b1, obj),
                      testing_oracles::MaxGradientError(model.w2, g.w2, obj),
                      testing_oracles::MaxGradientError(model.b2, g.b2, obj)});
  }
  out.Check(worst < 1e-5, "10 models (d=3, H=8, C=4), max relative error " +
                              Fmt("%.2e", worst));
  return out;
}

Outcome LossAlgebra() {
  Outcome out;
  lo::LossBatch batch;
  batch.losses = {5, 1, 0.5, 0.2};
  batch.indices = {0, 1, 2, 3};
  lo::DldConfig cfg;
  cfg.k_fraction = 0.25;
  cfg.el = 12;
  const double expected = (std::exp(-1.0) * 5 + 1 + 0.5 + 0.2) / 4;
  const double got = lo::DldLoss(batch, 22, cfg).value;
  out.Check(std::abs(got - expected) < 1e-12,
            "ec-el=10, tau=10, k=0.25: " + Fmt("%.12f", got) + " (0.8849)");

  std::mt19937_64 rng(8);
  std::exponential_distribution<double> ex(1.0);
  bool bitwise = true;
  for (int trial = 0; trial < 50; ++trial) {
    lo::LossBatch b;
    for (std::size_t i = 0; i < 64; ++i) {
      b.losses.push_back(ex(rng));
      b.indices.push_back(i);
    }
    lo::DldConfig zero;
    zero.k_fraction = 0.0;
    zero.el = 3;
    bitwise = bitwise && lo::DldLoss(b, 20, zero).value == lo::MeanLoss(b.losses);
  }
  tr::DatasetSpec ds;
  ds.samples = 400;
  ds.seed = 4;
  const auto data = tr::GenerateDataset(ds);
  tr::TrainSpec base;
  base.hidden = 16;
  base.epochs = 6;
  base.seed = 4;
  tr::TrainSpec k0 = base;
  k0.loss_mode = tr::LossMode::kDld;
  k0.dld.k_fraction = 0.0;
  k0.dld.el = 2;
  // The alpha column reports the schedule even when nothing is decayed.
  const tr::TrainLog lb = tr::Train(data, base);
  const tr::TrainLog lk = tr::Train(data, k0);
  bitwise = bitwise && lb.rows.size() == lk.rows.size();
  for (std::size_t i = 0; bitwise && i < lb.rows.size(); ++i) {
    const auto& x = lb.rows[i];
    const auto& y = lk.rows[i];
    bitwise = x.acc == y.acc && x.clean_acc == y.clean_acc &&
              x.correct_subset_acc == y.correct_subset_acc &&
              x.corrupted_fit == y.corrupted_fit && x.loss == y.loss && y.topk_size == 0;
  }
  out.Check(bitwise, "k=0 equals the mean loss and the baseline run bitwise");

  const double at = lo::Alpha(12, 12, lo::Schedule::kExpDecay, 10);
  const double next = lo::Alpha(13, 12, lo::Schedule::kExpDecay, 10);
  out.Check(at == 1.0 && next < 1.0 && next > 0.9,
            "exp_decay alpha 1 at EC==EL, " + Fmt("%.6f", next) + " one epoch later");
  out.Check(CodeOf([] { lo::Alpha(12, 12, lo::Schedule::kPaperLiteral, 10); }) ==
                ErrorCode::kScheduleSingular,
            "paper_literal at EC==EL raises ScheduleSingular");
  return out;
}

struct MemorizationStats {
  double rise = 0.0;
  double final_clean = 0.0;
  int el_missing = 0;
};

MemorizationStats RunArm(int dim, tr::LossMode mode, int seeds, double* max_seconds) {
  MemorizationStats s;
  for (int seed = 1; seed <= seeds; ++seed) {
    const auto start = std::chrono::steady_clock::now();
    tr::DatasetSpec ds;
    ds.dim = dim;
    ds.seed = static_cast<std::uint64_t>(seed);
    tr::TrainSpec t;
    t.seed = static_cast<std::uint64_t>(seed);
    t.loss_mode = mode;
    if (mode == tr::LossMode::kDld) {
      t.el_source = tr::ElSource::kAuto;
      t.dld.k_fraction = 0.07;
    }
    const tr::TrainLog log = tr::Train(tr::GenerateDataset(ds), t);
    s.rise += log.rows[35].corrupted_fit - log.rows[4].corrupted_fit;
    s.final_clean += log.rows[35].clean_acc;
    s.el_missing += log.el_missing;
    *max_seconds = std::max(*max_seconds, Seconds(start));
  }
  s.rise /= seeds;
  s.final_clean /= seeds;
  return s;
}

Outcome Memorization() {
  Outcome out;
  const int seeds = 5;
  double slowest = 0.0;
  const auto base = RunArm(2, tr::LossMode::kBaseline, seeds, &slowest);
  const auto dld = RunArm(2, tr::LossMode::kDld, seeds, &slowest);
  out.Check(base.rise > 0.10, "(a) baseline corrupted_fit rise epoch 5 to 36: " +
                                  Fmt("%+.4f", base.rise) + " (needs > 0.10)");
  out.Check(dld.final_clean >= base.final_clean && dld.final_clean - base.final_clean > 0,
            "(b) final clean_acc dld " + Fmt("%.4f", dld.final_clean) + " vs baseline " +
                Fmt("%.4f", base.final_clean));
  out.Check(dld.rise < base.rise, "(c) corrupted_fit rise dld " + Fmt("%+.4f", dld.rise) +
                                      " vs baseline " + Fmt("%+.4f", base.rise));
  out.Check(slowest < 600.0, "slowest single run " + Fmt("%.1f s", slowest));
  out.Note("auto EL never fired in " + std::to_string(dld.el_missing) + "/" +
           std::to_string(seeds) + " dld runs (those runs train as baseline)");

  double ignored = 0.0;
  const auto base50 = RunArm(50, tr::LossMode::kBaseline, seeds, &ignored);
  const auto dld50 = RunArm(50, tr::LossMode::kDld, seeds, &ignored);
  out.Note("same protocol at d=50: baseline rise " + Fmt("%+.4f", base50.rise) +
           ", dld rise " + Fmt("%+.4f", dld50.rise) + ", final clean_acc baseline " +
           Fmt("%.4f", base50.final_clean) + ", dld " + Fmt("%.4f", dld50.final_clean));
  return out;
}

std::vector<std::string> FirstColumn(const std::string& table) {
  std::vector<std::string> out;
  for (auto line : dldkit::text::Split(table, '\n')) {
    if (line.empty()) continue;
    out.emplace_back(line.substr(0, line.find(',')));
  }
  return out;
}

Outcome SweepLayout() {
  Outcome out;
  tr::DatasetSpec d;
  d.samples = 300;
  tr::TrainSpec t;
  t.hidden = 16;
  t.epochs = 20;
  t.loss_mode = tr::LossMode::kDld;
  t.el_source = tr::ElSource::kFixed;
  t.dld.el = 10;
  const std::vector<std::uint64_t> seeds = {1, 2};

  tr::SweepGrid el_grid;
  el_grid.noise_ratio = {0.2, 0.3, 0.4};
  el_grid.loss_mode = {tr::LossMode::kDld};
  el_grid.el_offset = {-8, -4, 0, 4, 8};
  const auto el_rows = tr::Sweep(d, t, el_grid, seeds);
  const std::string el_table = tr::ElOffsetTable(el_rows);
  out.Check(FirstColumn(el_table) ==
                std::vector<std::string>{"el", "EL-8", "EL-4", "EL", "EL+4", "EL+8"},
            "EL offset table rows EL-8 EL-4 EL EL+4 EL+8, columns " +
                el_table.substr(0, el_table.find('\n')));

  tr::SweepGrid k_grid;
  k_grid.noise_ratio = {0.2, 0.3, 0.4};
  k_grid.loss_mode = {tr::LossMode::kBaseline, tr::LossMode::kDld};
  k_grid.k_fraction = {0.03, 0.05, 0.07, 0.10};
  const auto k_rows = tr::Sweep(d, t, k_grid, seeds);
  const std::string k_table = tr::TopKTable(k_rows);
  out.Check(k_table.substr(0, k_table.find('\n')) ==
                "noise,baseline,top-3%,top-5%,top-7%,top-10%",
            "top-K table columns: " + k_table.substr(0, k_table.find('\n')));
  out.Check(FirstColumn(k_table) == std::vector<std::string>{"noise", "20%", "30%", "40%"},
            "top-K table rows 20% 30% 40%");
  out.Check(tr::SweepCsv(k_rows) == tr::SweepCsv(tr::Sweep(d, t, k_grid, seeds)) &&
                el_table == tr::ElOffsetTable(tr::Sweep(d, t, el_grid, seeds)),
            "repeat sweeps are byte-identical");
  return out;
}

int RunTool(const std::string& args, std::string* stdout_text) {
  const fs::path capture = fs::temp_directory_path() / "dldkit_acceptance_cli.out";
  const std::string cmd = std::string(DLDTOOL_PATH) + " " + args + " >'" +
                          capture.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  *stdout_text = dldkit::text::ReadFile(capture);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::optional<double> Field(const std::string& line, const std::string& key) {
  const auto pos = line.find(key + "=");
  if (pos == std::string::npos) return std::nullopt;
  return dldkit::text::ParseReal(
      dldkit::text::SplitWhitespace(line.substr(pos + key.size() + 1))[0]);
}

Outcome EndToEnd() {
  Outcome out;
  const fs::path root = fs::temp_directory_path() / "dldkit_acceptance_e2e";
  fs::remove_all(root);
  const an::Dataset clean = testing_fixtures::MakeDataset(40, 25, 5);
  an::WriteDotaDirectory(clean, root / "clean");
  fs::create_directories(root / "pred");
  for (const auto& image : clean) {
    me::ImageDetections d;
    d.image_id = image.image_id;
    for (const auto& inst : image.instances) d.detections.push_back({inst.corners, inst.category, 1.0});
    dldkit::text::WriteFile(root / "pred" / (image.image_id + ".txt"), me::WriteDetections(d));
  }
  auto q = [](const fs::path& p) { return "'" + p.string() + "'"; };
  std::string text;
  int code = RunTool("eval --gt " + q(root / "clean") + " --pred " + q(root / "pred") +
                         " --out-dir " + q(root / "eval_clean"),
                     &text);
  const auto acc_clean = Field(text, "ACC");
  out.Check(code == 0 && acc_clean.has_value(), "clean eval: " + text.substr(0, text.find('\n')));
  for (double rho : {0.2, 0.3, 0.4}) {
    const std::string tag = Fmt("%.1f", rho);
    const fs::path noisy = root / ("noisy_" + tag);
    code = RunTool("inject-noise " + q(root / "clean") + " " + q(noisy) + " --ratio " + tag +
                       " --seed 21",
                   &text);
    if (code != 0) {
      out.Check(false, "inject-noise rho=" + tag + " exit " + std::to_string(code));
      continue;
    }
    code = RunTool("eval --gt " + q(noisy) + " --pred " + q(root / "pred") + " --record " +
                       q(noisy / "noise_record.txt") + " --out-dir " + q(noisy / "eval"),
                   &text);
    const auto acc_noisy = Field(text, "ACC");
    const auto map_noisy = Field(text, "mAP");
    if (code != 0 || !acc_noisy || !acc_clean) {
      out.Check(false, "eval rho=" + tag + ": " + text);
      continue;
    }
    const double delta = *acc_clean - *acc_noisy;
    out.Check(std::abs(delta - rho) < 0.02,
              "rho=" + tag + ": ACC clean " + Fmt("%.4f", *acc_clean) + ", noisy " +
                  Fmt("%.4f", *acc_noisy) + ", |delta - rho| = " +
                  Fmt("%.4f", std::abs(delta - rho)) + "; mAP against noisy labels " +
                  Fmt("%.4f", map_noisy.value_or(-1)));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> expect_fail;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--expect-fail" && i + 1 < argc) {
      for (auto id : dldkit::text::Split(argv[++i], ',')) expect_fail.emplace(id);
    } else {
      std::cerr << "usage: acceptance [--expect-fail 4,7]\n";
      return 2;
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1", Geometry},     {"2", Ap},           {"3", Noise},
      {"4", Endpoint},     {"5", Gradient},     {"6", LossAlgebra},
      {"7", Memorization}, {"8", SweepLayout},  {"9", EndToEnd}};
  const std::vector<std::string> titles = {
      "rotated IoU against sampling and closed form",
      "AP values and greedy matching",
      "label noise injection",
      "early-learning endpoint detection",
      "backward pass against finite differences",
      "decayed loss algebra",
      "memorization and rescue, 5 seeds",
      "sweep table layout",
      "end-to-end CLI, ACC against noisy labels"};
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [id, run] = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.Check(false, std::string("exception: ") + e.what());
    }
    const bool known = expect_fail.count(id) > 0;
    std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << " "
              << titles[i] << Fmt(" (%.1f s)", Seconds(start))
              << (!o.pass && known ? " [expected failure]" : "") << '\n';
    for (const auto& d : o.details) std::cout << "    " << d << '\n';
    std::cout.flush();
    if (!o.pass && !known) ++unexpected;
  }
  std::cout << "unexpected failures: " << unexpected << '\n';
  return unexpected == 0 ? 0 : 1;
}
