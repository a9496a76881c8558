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

#include "dldkit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <sstream>

#include <Eigen/Dense>

#include "dldkit/error.hpp"
#include "dldkit/text.hpp"

namespace dldkit::dynamics {

EpochSeries::EpochSeries(std::string metric, std::vector<int> epochs,
                         std::vector<double> values)
    : metric_(std::move(metric)) {
  if (epochs.size() != values.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "epoch and value columns differ in length");
  }
  for (std::size_t i = 0; i < epochs.size(); ++i) Append(epochs[i], values[i]);
}

void EpochSeries::Append(int epoch, double value) {
  if (epoch < 1 || (!epochs_.empty() && epoch <= epochs_.back())) {
    throw Error(ErrorCode::kInvalidArgument,
                "epochs must be >= 1 and strictly increasing (got " +
                    std::to_string(epoch) + ")");
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument,
                "non-finite value at epoch " + std::to_string(epoch));
  }
  epochs_.push_back(epoch);
  values_.push_back(value);
}

EpochSeries EpochSeries::Prefix(std::size_t count) const {
  count = std::min(count, size());
  EpochSeries out;
  out.metric_ = metric_;
  out.epochs_.assign(epochs_.begin(), epochs_.begin() + count);
  out.values_.assign(values_.begin(), values_.begin() + count);
  return out;
}

EpochSeries EpochSeries::Scaled(double factor) const {
  EpochSeries out = *this;
  for (double& v : out.values_) v *= factor;
  return out;
}

EpochSeries ParseSeriesCsv(std::string_view csv, const std::string& metric,
                           const std::string& source) {
  const auto lines = text::Split(csv, '\n');
  std::size_t line_no = 0;
  long epoch_col = -1;
  long metric_col = -1;
  std::size_t columns = 0;
  std::vector<int> epochs;
  std::vector<double> values;
  for (std::string_view raw : lines) {
    ++line_no;
    const std::string_view line = text::Trim(raw);
    if (line.empty()) continue;
    const auto fields = text::Split(line, ',');
    auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::kMalformedLine,
                  source + ": line " + std::to_string(line_no) + ": " + what);
    };
    if (epoch_col < 0) {
      columns = fields.size();
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto name = text::Trim(fields[i]);
        if (name == "epoch") epoch_col = static_cast<long>(i);
        if (name == metric) metric_col = static_cast<long>(i);
      }
      if (epoch_col < 0) fail("header has no 'epoch' column");
      if (metric_col < 0) fail("header has no '" + metric + "' column");
      continue;
    }
    if (fields.size() != columns) {
      fail("expected " + std::to_string(columns) + " fields, found " +
           std::to_string(fields.size()));
    }
    const auto e = text::ParseInt(text::Trim(fields[epoch_col]));
    const auto v = text::ParseReal(text::Trim(fields[metric_col]));
    if (!e) fail("bad epoch '" + std::string(fields[epoch_col]) + "'");
    if (!v || !std::isfinite(*v)) {
      fail("bad value '" + std::string(fields[metric_col]) + "'");
    }
    if (*e < 1 || (!epochs.empty() && *e <= epochs.back())) {
      fail("epochs must be >= 1 and strictly increasing");
    }
    epochs.push_back(static_cast<int>(*e));
    values.push_back(*v);
  }
  if (epoch_col < 0) {
    throw Error(ErrorCode::kMalformedLine, source + ": empty");
  }
  return EpochSeries(metric, std::move(epochs), std::move(values));
}

double PolyFit::Evaluate(double t) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
    acc = acc * t + *it;
  }
  return acc;
}

PolyFit FitPoly(const EpochSeries& series, int degree) {
  if (degree < 0) {
    throw Error(ErrorCode::kInvalidArgument, "degree must be >= 0");
  }
  const auto n = static_cast<Eigen::Index>(series.size());
  const Eigen::Index cols = degree + 1;
  if (n < cols) {
    throw Error(ErrorCode::kInsufficientPoints,
                "degree " + std::to_string(degree) + " fit needs " +
                    std::to_string(cols) + " points, have " +
                    std::to_string(n));
  }
  const double first = series.epochs().front();
  const double last = series.epochs().back();
  const double mid = 0.5 * (first + last);
  const double half = last > first ? 0.5 * (last - first) : 1.0;

  Eigen::MatrixXd design(n, cols);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (series.epochs()[i] - mid) / half;
    double p = 1.0;
    for (Eigen::Index k = 0; k < cols; ++k) {
      design(i, k) = p;
      p *= u;
    }
    y(i) = series.values()[i];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < cols) {
    throw Error(ErrorCode::kIllConditioned,
                "polynomial design matrix is rank deficient (rank " +
                    std::to_string(qr.rank()) + " of " + std::to_string(cols) +
                    ")");
  }
  const Eigen::VectorXd scaled = qr.solve(y);
  const Eigen::VectorXd residual = design * scaled - y;

  // Expand sum_k a_k ((t - mid) / half)^k into monomials of t.
  std::vector<double> coeffs(static_cast<std::size_t>(cols), 0.0);
  for (Eigen::Index k = 0; k < cols; ++k) {
    const double ak = scaled(k) / std::pow(half, static_cast<double>(k));
    double binom = 1.0;  // C(k, j)
    for (Eigen::Index j = 0; j <= k; ++j) {
      coeffs[j] += ak * binom * std::pow(-mid, static_cast<double>(k - j));
      binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
    }
  }

  PolyFit fit;
  fit.coefficients = std::move(coeffs);
  fit.degree = degree;
  fit.first_epoch = series.epochs().front();
  fit.last_epoch = series.epochs().back();
  fit.residual_rms = std::sqrt(residual.squaredNorm() / static_cast<double>(n));
  return fit;
}

PolyFit PolyDerivative(const PolyFit& fit, int order) {
  if (order < 1) {
    throw Error(ErrorCode::kInvalidArgument, "derivative order must be >= 1");
  }
  PolyFit out = fit;
  for (int o = 0; o < order; ++o) {
    if (out.coefficients.size() <= 1) {
      out.coefficients.assign(1, 0.0);
      out.degree = 0;
      continue;
    }
    std::vector<double> next(out.coefficients.size() - 1);
    for (std::size_t k = 1; k < out.coefficients.size(); ++k) {
      next[k - 1] = static_cast<double>(k) * out.coefficients[k];
    }
    out.coefficients = std::move(next);
    out.degree = static_cast<int>(out.coefficients.size()) - 1;
  }
  out.residual_rms = 0.0;
  return out;
}

ElScan ParseElScan(std::string_view name) {
  if (name == "causal") return ElScan::kCausal;
  if (name == "posthoc") return ElScan::kPosthoc;
  throw Error(ErrorCode::kConfig,
              "unknown EL scan '" + std::string(name) + "' (causal|posthoc)");
}

std::string_view ElScanName(ElScan scan) {
  return scan == ElScan::kPosthoc ? "posthoc" : "causal";
}

int ElParams::EffectiveMinEpochs() const {
  return std::max(min_epochs, degree + 2);
}

ElReport DetectEl(const EpochSeries& series, const ElParams& params) {
  if (!(params.eta > 0.0) || params.degree < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "eta must be positive and degree non-negative");
  }
  const int min_points = params.EffectiveMinEpochs();
  if (static_cast<int>(series.size()) < min_points) {
    throw Error(ErrorCode::kInsufficientPoints,
                "EL detection needs at least " + std::to_string(min_points) +
                    " epochs, series has " + std::to_string(series.size()));
  }

  ElReport report;
  report.eta = params.eta;
  report.degree = params.degree;
  report.min_epochs = min_points;
  report.scan = params.scan;
  std::optional<PolyFit> whole;
  if (params.scan == ElScan::kPosthoc) whole = FitPoly(series, params.degree);
  for (std::size_t count = static_cast<std::size_t>(min_points);
       count <= series.size(); ++count) {
    const PolyFit fit =
        whole ? *whole : FitPoly(series.Prefix(count), params.degree);
    const double e = series.epochs()[count - 1];
    ElTraceRow row;
    row.epoch = series.epochs()[count - 1];
    row.fitted_value = fit.Evaluate(e);
    row.first_derivative = PolyDerivative(fit, 1).Evaluate(e);
    row.second_derivative = PolyDerivative(fit, 2).Evaluate(e);
    row.triggered = std::abs(row.second_derivative) < params.eta;
    if (row.triggered && !report.el) {
      report.el = row.epoch;
      report.immediate_trigger = count == static_cast<std::size_t>(min_points);
    }
    report.trace.push_back(row);
  }
  return report;
}

std::string ElReport::ToText() const {
  std::ostringstream out;
  out << "EL=" << (el ? std::to_string(*el) : std::string("none")) << '\n'
      << "eta=" << text::FormatReal(eta) << '\n'
      << "degree=" << degree << '\n'
      << "min_epochs=" << min_epochs << '\n'
      << "scan=" << ElScanName(scan) << '\n'
      << "immediate_trigger=" << (immediate_trigger ? "true" : "false") << '\n';
  return out.str();
}

std::string ElReport::ToCsv() const {
  std::ostringstream out;
  out << "epoch,fitted_value,first_deriv,second_deriv,triggered\n";
  for (const auto& r : trace) {
    out << r.epoch << ',' << text::FormatReal(r.fitted_value) << ','
        << text::FormatReal(r.first_derivative) << ','
        << text::FormatReal(r.second_derivative) << ','
        << (r.triggered ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace dldkit::dynamics
