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

#ifndef DLDKIT_DYNAMICS_HPP_
#define DLDKIT_DYNAMICS_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dldkit::dynamics {

// A per-epoch scalar curve. Epochs are 1-based and strictly increasing.
class EpochSeries {
 public:
  EpochSeries() = default;
  // Throws kInvalidArgument on non-increasing epochs, epochs < 1, a size
  // mismatch, or non-finite values.
  EpochSeries(std::string metric, std::vector<int> epochs,
              std::vector<double> values);

  const std::string& metric() const { return metric_; }
  const std::vector<int>& epochs() const { return epochs_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return epochs_.size(); }

  // Appends one point; the epoch must exceed the last one.
  void Append(int epoch, double value);
  EpochSeries Prefix(std::size_t count) const;
  EpochSeries Scaled(double factor) const;

 private:
  std::string metric_;
  std::vector<int> epochs_;
  std::vector<double> values_;
};

// Reads "epoch,<metric>,..." CSV and extracts one column. Errors name `source`.
EpochSeries ParseSeriesCsv(std::string_view csv, const std::string& metric,
                           const std::string& source = "csv");

// A polynomial in the epoch variable: value(t) = sum_k coefficients[k] t^k.
struct PolyFit {
  std::vector<double> coefficients;
  int degree = 0;
  int first_epoch = 0;
  int last_epoch = 0;
  double residual_rms = 0.0;

  double Evaluate(double t) const;
};

// Least-squares polynomial fit. The system is solved by column-pivoted
// Householder QR on a Vandermonde matrix in a centred and scaled variable,
// then mapped back to monomials in the epoch. Throws kInsufficientPoints when
// fewer than degree + 1 points are given and kIllConditioned when the scaled
// design matrix is rank deficient.
PolyFit FitPoly(const EpochSeries& series, int degree);

// Analytic derivative of the given order; degree drops by `order` (floor 0).
PolyFit PolyDerivative(const PolyFit& fit, int order);

// kCausal fits epochs [1, e] for each candidate e and evaluates at e, so the
// result only uses data available at epoch e. kPosthoc fits the whole series
// once and scans its second derivative from the first admissible epoch.
enum class ElScan { kCausal, kPosthoc };

ElScan ParseElScan(std::string_view name);
std::string_view ElScanName(ElScan scan);

struct ElParams {
  double eta = 0.001;
  int degree = 4;
  int min_epochs = 6;
  ElScan scan = ElScan::kCausal;

  // max(min_epochs, degree + 2): smaller windows interpolate exactly.
  int EffectiveMinEpochs() const;
};

struct ElTraceRow {
  int epoch = 0;
  double fitted_value = 0.0;
  double first_derivative = 0.0;
  double second_derivative = 0.0;
  bool triggered = false;
};

struct ElReport {
  std::optional<int> el;
  double eta = 0.0;
  int degree = 0;
  int min_epochs = 0;
  ElScan scan = ElScan::kCausal;
  // EL fired on the first candidate window; typical of curves with no
  // curvature at all (e.g. linear), where the endpoint is not informative.
  bool immediate_trigger = false;
  std::vector<ElTraceRow> trace;

  std::string ToText() const;
  // "epoch,fitted_value,first_deriv,second_deriv,triggered"
  std::string ToCsv() const;
};

// Causal scan for the end of early learning. For each candidate epoch e (the
// series' own epochs from the EffectiveMinEpochs()-th point on), a degree-d
// polynomial is fit to all points up to e and EL is the first e with
// |Poly''(e)| < eta. The whole series is traced even after EL fires.
// Values are expected on a [0, 1] scale; eta is defined at that scale.
ElReport DetectEl(const EpochSeries& series, const ElParams& params = {});

}  // namespace dldkit::dynamics

#endif  // DLDKIT_DYNAMICS_HPP_
