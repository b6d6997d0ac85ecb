// Copyright 2026 The Adtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "adtomo/stattest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "adtomo/status_macros.h"

namespace adtomo::stats {
namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 100000;

// Continued fraction for I_x(a, b), modified Lentz.
double BetaContinuedFraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double LowerGammaSeries(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double UpperGammaContinuedFraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

struct Moments {
  double mean;
  double variance;  // sample variance, n - 1 denominator
};

Moments SampleMoments(std::span<const double> v) {
  long double sum = 0;
  for (double x : v) sum += x;
  const long double mean = sum / static_cast<long double>(v.size());
  long double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {static_cast<double>(mean),
          static_cast<double>(ss / static_cast<long double>(v.size() - 1))};
}

}  // namespace

absl::Status ValidateStatConfig(const StatConfig& config) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    return absl::InvalidArgumentError("stats.alpha: must be in (0,1)");
  }
  if (!(config.min_expected >= 0.0)) {
    return absl::InvalidArgumentError("stats.min_expected: must be >= 0");
  }
  return absl::OkStatus();
}

double RegularizedIncompleteBeta(double a, double b, double x,
                                 double one_minus_x) {
  if (x <= 0.0) return 0.0;
  if (one_minus_x <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log(one_minus_x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaContinuedFraction(a, b, x) / a;
  }
  return 1.0 - front * BetaContinuedFraction(b, a, one_minus_x) / b;
}

double RegularizedUpperGamma(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - LowerGammaSeries(a, x);
  return UpperGammaContinuedFraction(a, x);
}

double StudentTTwoSidedP(double t, double df) {
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  const double denom = df + t2;
  const double p = RegularizedIncompleteBeta(df / 2.0, 0.5, df / denom,
                                             t2 / denom);
  return std::clamp(p, 0.0, 1.0);
}

double ChiSquareSurvival(double x, double df) {
  if (!(x > 0.0)) return 1.0;
  return std::clamp(RegularizedUpperGamma(df / 2.0, x / 2.0), 0.0, 1.0);
}

absl::StatusOr<TestResult> WelchTTest(std::span<const double> sample_a,
                                      std::span<const double> sample_b) {
  if (sample_a.size() < 2 || sample_b.size() < 2) {
    return absl::InvalidArgumentError(
        "welch t-test needs at least two values per sample");
  }
  const double na = static_cast<double>(sample_a.size());
  const double nb = static_cast<double>(sample_b.size());
  const Moments a = SampleMoments(sample_a);
  const Moments b = SampleMoments(sample_b);
  const double va = a.variance / na;
  const double vb = b.variance / nb;
  const double se2 = va + vb;

  TestResult result;
  if (se2 == 0.0) {
    result.df = na + nb - 2.0;
    if (a.mean == b.mean) {
      result.statistic = 0.0;
      result.p_value = 1.0;
    } else {
      result.statistic = a.mean > b.mean
                             ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
      result.p_value = 0.0;
      result.degenerate = true;
    }
    return result;
  }
  result.statistic = (a.mean - b.mean) / std::sqrt(se2);
  result.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  result.p_value = StudentTTwoSidedP(result.statistic, result.df);
  return result;
}

absl::StatusOr<TestResult> ChiSquareIndependence(std::span<const double> row_a,
                                                 std::span<const double> row_b,
                                                 const StatConfig& config) {
  RETURN_IF_ERROR(ValidateStatConfig(config));
  if (row_a.size() != row_b.size()) {
    return absl::InvalidArgumentError("chi-square rows differ in length");
  }
  double total = 0.0;
  for (size_t j = 0; j < row_a.size(); ++j) {
    if (!(row_a[j] >= 0.0) || !(row_b[j] >= 0.0) || std::isinf(row_a[j]) ||
        std::isinf(row_b[j])) {
      return absl::InvalidArgumentError(
          absl::StrCat("chi-square column ", j,
                       " has a negative or non-finite count"));
    }
    total += row_a[j] + row_b[j];
  }
  if (total <= 0.0) {
    return absl::InvalidArgumentError("chi-square table is all zero");
  }

  // Sparse columns pool into a residual column.
  std::vector<double> a, b;
  double residual_a = 0.0, residual_b = 0.0;
  for (size_t j = 0; j < row_a.size(); ++j) {
    if (row_a[j] + row_b[j] < config.min_expected) {
      residual_a += row_a[j];
      residual_b += row_b[j];
    } else {
      a.push_back(row_a[j]);
      b.push_back(row_b[j]);
    }
  }
  if (residual_a + residual_b > 0.0) {
    a.push_back(residual_a);
    b.push_back(residual_b);
  }
  if (a.size() < 2) {
    return absl::FailedPreconditionError(
        absl::StrCat("chi-square needs at least 2 effective columns, got ",
                     a.size()));
  }

  double ra = 0.0, rb = 0.0;
  for (size_t j = 0; j < a.size(); ++j) {
    ra += a[j];
    rb += b[j];
  }
  const double n = ra + rb;
  double stat = 0.0;
  for (size_t j = 0; j < a.size(); ++j) {
    const double col = a[j] + b[j];
    const double ea = ra * col / n;
    const double eb = rb * col / n;
    // A zero expectation means the whole row is empty; its cells are 0 too.
    if (ea > 0.0) stat += (a[j] - ea) * (a[j] - ea) / ea;
    if (eb > 0.0) stat += (b[j] - eb) * (b[j] - eb) / eb;
  }
  TestResult result;
  result.statistic = stat;
  result.df = static_cast<double>(a.size() - 1);
  result.p_value = ChiSquareSurvival(stat, result.df);
  return result;
}

absl::StatusOr<MeanStd> ComputeMeanStd(std::span<const double> values) {
  if (values.empty()) {
    return absl::InvalidArgumentError("mean/std of an empty list");
  }
  long double sum = 0;
  for (double v : values) sum += v;
  const long double mean = sum / static_cast<long double>(values.size());
  long double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return MeanStd{static_cast<double>(mean),
                 static_cast<double>(
                     std::sqrt(ss / static_cast<long double>(values.size())))};
}

}  // namespace adtomo::stats
