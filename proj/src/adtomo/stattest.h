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

#ifndef ADTOMO_STATTEST_H_
#define ADTOMO_STATTEST_H_

#include <span>

#include "absl/status/statusor.h"

namespace adtomo::stats {

struct TestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  // Set when the test statistic is undefined, e.g. two zero-variance samples
  // with different means.
  bool degenerate = false;
};

struct StatConfig {
  double alpha = 0.05;
  // Columns whose total count is below this are pooled into one residual
  // column before the chi-square test.
  double min_expected = 5.0;
};

absl::Status ValidateStatConfig(const StatConfig& config);

// Regularized incomplete beta I_x(a, b). `one_minus_x` lets callers pass 1-x
// without cancellation.
double RegularizedIncompleteBeta(double a, double b, double x,
                                 double one_minus_x);
inline double RegularizedIncompleteBeta(double a, double b, double x) {
  return RegularizedIncompleteBeta(a, b, x, 1.0 - x);
}

// Regularized upper incomplete gamma Q(a, x).
double RegularizedUpperGamma(double a, double x);

// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double StudentTTwoSidedP(double t, double df);

// P(X >= x) for a chi-square variable with `df` degrees of freedom.
double ChiSquareSurvival(double x, double df);

// Two-sided Welch (unequal variance) t-test with Welch-Satterthwaite degrees
// of freedom. Each sample needs at least two values.
absl::StatusOr<TestResult> WelchTTest(std::span<const double> sample_a,
                                      std::span<const double> sample_b);

// Chi-square test of independence on a 2 x V table given as two rows.
absl::StatusOr<TestResult> ChiSquareIndependence(std::span<const double> row_a,
                                                 std::span<const double> row_b,
                                                 const StatConfig& config);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

absl::StatusOr<MeanStd> ComputeMeanStd(std::span<const double> values);

}  // namespace adtomo::stats

#endif  // ADTOMO_STATTEST_H_
